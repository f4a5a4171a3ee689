// Registration, Karcher mean, and distance-matrix assembly. Pair fills run
// in parallel over a shared read-only chart; the BVP counter is the only
// shared mutable state.
#include "shapedist/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace shapedist {

namespace {

void parallel_for(int count, const std::function<void(int)>& body) {
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = static_cast<int>(
      std::min<unsigned>(hw == 0 ? 1 : hw, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void check_uniform(const std::vector<Vector>& points, const char* what) {
  if (points.size() < 1) throw SizeError(std::string(what) + ": empty dataset");
  for (const Vector& p : points)
    if (p.size() != points.front().size())
      throw SizeError(std::string(what) + ": points of mixed dimension");
}

DistanceMatrix blank_matrix(int n, DistanceMethod method) {
  DistanceMatrix dm;
  dm.n = n;
  dm.method = method;
  dm.values = Matrix::Zero(n, n);
  dm.nonconverged.assign(static_cast<std::size_t>(n) * n, 0);
  if (method == DistanceMethod::Taylor2)
    dm.negativity_flags.assign(static_cast<std::size_t>(n) * n, 0);
  return dm;
}

struct PairIndex {
  int i, j;
};

std::vector<PairIndex> upper_pairs(int n) {
  std::vector<PairIndex> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  return pairs;
}

}  // namespace

std::vector<Vector> Dataset::points() const {
  std::vector<Vector> out;
  out.reserve(configs.size());
  for (const LandmarkConfig& c : configs) out.push_back(c.coords);
  return out;
}

void Dataset::validate_configs() const {
  if (n() < 1) throw SizeError("Dataset: no configurations");
  if (!(sigma > 0.0)) throw Error("Dataset: sigma must be positive");
  for (const LandmarkConfig& c : configs) {
    if (c.d != d || c.m != m)
      throw SizeError("Dataset: configurations of mixed (d, m)");
    c.validate();
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n())
    throw SizeError("Dataset: label count mismatch");
}

void Dataset::validate() const {
  if (n() < 2) throw SizeError("Dataset: need at least 2 configurations");
  validate_configs();
}

int DistanceMatrix::count_negativity() const {
  int c = 0;
  for (auto f : negativity_flags) c += f != 0;
  return c / 2;
}

int DistanceMatrix::count_nonconverged() const {
  int c = 0;
  for (auto f : nonconverged) c += f != 0;
  return c / 2;
}

void DistanceMatrix::validate() const {
  if (values.rows() != n || values.cols() != n)
    throw SizeError("DistanceMatrix: shape mismatch");
  for (int i = 0; i < n; ++i) {
    if (values(i, i) != 0.0)
      throw Error("DistanceMatrix: nonzero diagonal");
    for (int j = 0; j < i; ++j) {
      if (values(i, j) != values(j, i))
        throw Error("DistanceMatrix: not symmetric");
      if (!std::isfinite(values(i, j)))
        throw Error("DistanceMatrix: non-finite entry");
      if (method != DistanceMethod::Taylor2 && values(i, j) < 0.0)
        throw Error("DistanceMatrix: negative distance");
    }
  }
}

Vector karcher_mean(const std::vector<Vector>& points,
                    const ManifoldChart& chart,
                    const GeodesicSolverConfig& cfg) {
  check_uniform(points, "karcher_mean");
  const int n = static_cast<int>(points.size());
  Vector mean = Vector::Zero(points.front().size());
  for (const Vector& p : points) mean += p;
  mean /= n;
  if (!chart.domain_check(mean))
    throw DomainError("karcher_mean: coordinate mean outside chart domain");

  for (int iter = 0; iter < 50; ++iter) {
    Vector w = Vector::Zero(mean.size());
    std::vector<Vector> tangents(n);
    parallel_for(n, [&](int i) {
      ShootingResult sr = shoot_log(chart, mean, points[i], cfg);
      if (!sr.converged) {
        std::ostringstream os;
        os << "karcher_mean: log failed for sample " << i << " (residual "
           << sr.residual << ")";
        throw ConvergenceError(os.str(), sr.v, sr.residual, sr.iterations);
      }
      tangents[i] = sr.v;
    });
    for (const Vector& t : tangents) w += t;
    w /= n;
    const MetricData md = chart.metric_at(mean, MetricLevel::Metric);
    if (md.norm(w) <= 1e-8) return mean;
    mean = exp_map(chart, mean, w, cfg);
  }
  throw ConvergenceError("karcher_mean: no convergence in 50 iterations", mean,
                         0.0, 50);
}

LandmarkConfig karcher_mean(const Dataset& ds, const ManifoldChart& chart,
                            const GeodesicSolverConfig& cfg) {
  ds.validate();
  return LandmarkConfig{ds.d, ds.m, karcher_mean(ds.points(), chart, cfg)};
}

Registration register_dataset(const std::vector<Vector>& points,
                              const Vector& template_point,
                              const ManifoldChart& chart,
                              const GeodesicSolverConfig& cfg) {
  check_uniform(points, "register_dataset");
  const int n = static_cast<int>(points.size());
  Registration reg;
  reg.template_point = template_point;
  reg.tangents.assign(n, Vector());
  reg.residuals.assign(n, 0.0);
  reg.converged.assign(n, 0);
  const std::uint64_t before = bvp_solve_count();
  parallel_for(n, [&](int i) {
    ShootingResult sr = shoot_log(chart, template_point, points[i], cfg);
    reg.tangents[i] = sr.v;
    reg.residuals[i] = sr.residual;
    reg.converged[i] = sr.converged ? 1 : 0;
  });
  reg.bvp_solves = bvp_solve_count() - before;
  return reg;
}

Registration register_dataset(const Dataset& ds, const LandmarkConfig& tmpl,
                              const ManifoldChart& chart,
                              const GeodesicSolverConfig& cfg) {
  ds.validate();
  tmpl.validate();
  return register_dataset(ds.points(), tmpl.coords, chart, cfg);
}

DistanceMatrix approx_distance_matrix(const Registration& reg,
                                      const ManifoldChart& chart,
                                      DistanceMethod method) {
  if (method == DistanceMethod::Exact)
    throw Error("approx_distance_matrix: method must be first, taylor2 or cc");
  const int n = reg.n();
  if (n < 1) throw SizeError("approx_distance_matrix: empty registration");

  // One metric (and, except for first, one curvature tensor) at the
  // template, reused for every pair; no BVP solves here.
  const bool needs_curvature = method != DistanceMethod::First;
  const MetricData md = chart.metric_at(
      reg.template_point,
      needs_curvature ? MetricLevel::SecondDerivs : MetricLevel::Metric);
  CurvatureTensor rt;
  if (needs_curvature) rt = curvature_tensor(chart, reg.template_point);

  DistanceMatrix dm = blank_matrix(n, method);
  dm.bvp_count = reg.bvp_solves;
  const std::vector<PairIndex> pairs = upper_pairs(n);
  parallel_for(static_cast<int>(pairs.size()), [&](int p) {
    const int i = pairs[p].i, j = pairs[p].j;
    const bool ok = reg.converged[i] && reg.converged[j];
    // Non-converged tangents keep the matrix complete via the first-order
    // value, flagged for the caller.
    const DistanceMethod use = ok ? method : DistanceMethod::First;
    const ApproxDistance ad = approx_distance(
        use, md, needs_curvature ? &rt : nullptr, reg.tangents[i],
        reg.tangents[j]);
    dm.values(i, j) = dm.values(j, i) = ad.value;
    if (!ok) {
      dm.nonconverged[static_cast<std::size_t>(i) * n + j] = 1;
      dm.nonconverged[static_cast<std::size_t>(j) * n + i] = 1;
    }
    if (method == DistanceMethod::Taylor2 && ad.taylor2_negative) {
      dm.negativity_flags[static_cast<std::size_t>(i) * n + j] = 1;
      dm.negativity_flags[static_cast<std::size_t>(j) * n + i] = 1;
    }
  });
  return dm;
}

DistanceMatrix exact_distance_matrix(const std::vector<Vector>& points,
                                     const ManifoldChart& chart,
                                     const GeodesicSolverConfig& cfg) {
  check_uniform(points, "exact_distance_matrix");
  const int n = static_cast<int>(points.size());
  DistanceMatrix dm = blank_matrix(n, DistanceMethod::Exact);
  const std::uint64_t before = bvp_solve_count();

  // Base-point metrics cached once per sample.
  std::vector<MetricData> metrics(n);
  for (int i = 0; i < n; ++i)
    metrics[i] = chart.metric_at(points[i], MetricLevel::Metric);

  const std::vector<PairIndex> pairs = upper_pairs(n);
  parallel_for(static_cast<int>(pairs.size()), [&](int p) {
    const int i = pairs[p].i, j = pairs[p].j;
    const ShootingResult sr = shoot_log(chart, points[i], points[j], cfg);
    dm.values(i, j) = dm.values(j, i) = metrics[i].norm(sr.v);
    if (!sr.converged) {
      dm.nonconverged[static_cast<std::size_t>(i) * n + j] = 1;
      dm.nonconverged[static_cast<std::size_t>(j) * n + i] = 1;
    }
  });
  dm.bvp_count = bvp_solve_count() - before;
  return dm;
}

DistanceMatrix exact_distance_matrix(const Dataset& ds,
                                     const ManifoldChart& chart,
                                     const GeodesicSolverConfig& cfg) {
  ds.validate();
  return exact_distance_matrix(ds.points(), chart, cfg);
}

}  // namespace shapedist
