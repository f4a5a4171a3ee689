#include "shapedist/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shapedist/io.hpp"
#include "shapedist/rng.hpp"

namespace shapedist {

namespace {

bool has_method(const ExperimentConfig& cfg, DistanceMethod m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) !=
         cfg.methods.end();
}

std::string check_line(const std::string& name, bool pass) {
  return "check " + name + (pass ? " PASS" : " FAIL");
}

}  // namespace

void ExperimentConfig::validate() const {
  template_config.validate();
  if (n < 2) throw SizeError("experiment: n must be >= 2");
  if (!(noise_scale > 0.0)) throw Error("experiment: noise_scale must be > 0");
  if (!(sigma > 0.0)) throw Error("experiment: sigma must be > 0");
  if (methods.empty()) throw Error("experiment: no methods requested");
  solver.validate();
}

Dataset synthesize_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  const int d = cfg.template_config.d, m = cfg.template_config.m;
  const ManifoldChart chart = landmark_chart(GaussianKernel{cfg.sigma}, d, m);
  const Vector& tmpl = cfg.template_config.coords;
  const MetricData md = chart.metric_at(tmpl, MetricLevel::Metric);

  // Coordinate covariance c * G at the template.
  Eigen::LLT<Matrix> llt(cfg.noise_scale * md.g);
  if (llt.info() != Eigen::Success)
    throw MetricError("synthesize_dataset: covariance not positive definite");
  const Matrix chol = llt.matrixL();

  SeededRng rng(cfg.seed);
  Dataset ds;
  ds.d = d;
  ds.m = m;
  ds.sigma = cfg.sigma;
  for (int i = 0; i < cfg.n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 10 && !placed; ++attempt) {
      const Vector v = chol * rng.gaussian_vector(chart.dim);
      try {
        Vector q = exp_map(chart, tmpl, v, cfg.solver);
        ds.configs.push_back(LandmarkConfig{d, m, std::move(q)});
        placed = true;
      } catch (const DomainEscapeError&) {
        // resample
      } catch (const IllConditionedError&) {
        // near-collision along the geodesic: resample
      }
    }
    if (!placed) {
      std::ostringstream os;
      os << "synthesize_dataset: sample " << i
         << " escaped the chart in 10 attempts; reduce noise_scale";
      throw Error(os.str());
    }
  }
  return ds;
}

const MethodReport& ExperimentResult::report_for(DistanceMethod m) const {
  for (const MethodReport& r : approx)
    if (r.method == m) return r;
  throw Error(std::string("experiment: method ") + method_name(m) +
              " was not computed");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.dataset = synthesize_dataset(cfg);
  const ManifoldChart chart =
      landmark_chart(GaussianKernel{cfg.sigma}, cfg.template_config.d,
                     cfg.template_config.m);

  res.registration = register_dataset(res.dataset, cfg.template_config, chart,
                                      cfg.solver);
  res.curvature =
      curvature_histogram(res.registration, chart, cfg.histogram_bins);
  res.mds_dim = std::min(2, cfg.n - 1);

  res.has_exact = has_method(cfg, DistanceMethod::Exact);
  if (res.has_exact) {
    res.exact = exact_distance_matrix(res.dataset, chart, cfg.solver);
    res.exact_embedding = classical_mds(res.exact, res.mds_dim);
  }
  for (DistanceMethod m : cfg.methods) {
    if (m == DistanceMethod::Exact) continue;
    MethodReport rep;
    rep.method = m;
    rep.matrix = approx_distance_matrix(res.registration, chart, m);
    rep.embedding = classical_mds(rep.matrix, res.mds_dim);
    if (res.has_exact) {
      rep.stats = error_stats(res.exact, rep.matrix, cfg.histogram_bins);
      rep.procrustes_vs_exact =
          procrustes_distance(rep.embedding, res.exact_embedding);
    }
    res.approx.push_back(std::move(rep));
  }
  return res;
}

void write_experiment_files(const std::string& dir,
                            const ExperimentConfig& cfg,
                            const ExperimentResult& res) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

  write_dataset(path("dataset.txt"), res.dataset);
  if (res.has_exact)
    write_distance_matrix_csv(path("dist_exact.csv"), res.exact);
  for (const MethodReport& rep : res.approx) {
    const std::string tag = method_name(rep.method);
    write_distance_matrix_csv(path("dist_" + tag + ".csv"), rep.matrix);
    if (res.has_exact)
      write_histogram_csv(path("err_" + tag + "_hist.csv"),
                          rep.stats.histogram,
                          "signed errors exact - " + tag);
    write_embedding_csv(path("mds_" + tag + ".csv"), rep.embedding);
  }
  if (res.has_exact)
    write_embedding_csv(path("mds_exact.csv"), res.exact_embedding);
  {
    std::ostringstream cm;
    cm << "sectional curvatures at template; mean="
       << format_double(res.curvature.mean)
       << " skipped=" << res.curvature.skipped;
    write_histogram_csv(path("curvature_hist.csv"), res.curvature.histogram,
                        cm.str());
  }

  std::ofstream out(path("report.txt"), std::ios::binary);
  if (!out) throw IoError("cannot write experiment report");
  out << "# experiment report\n";
  out << "template " << cfg.template_name << "\n";
  out << "d " << cfg.template_config.d << "\n";
  out << "m " << cfg.template_config.m << "\n";
  out << "n " << cfg.n << "\n";
  out << "sigma " << format_double(cfg.sigma) << "\n";
  out << "noise_scale " << format_double(cfg.noise_scale) << "\n";
  out << "seed " << cfg.seed << "\n";
  out << "steps " << cfg.solver.steps << "\n";
  out << "bvp_tol " << format_double(cfg.solver.bvp_tol) << "\n";
  out << "mds_dim " << res.mds_dim << "\n";
  out << "bvp_register " << res.registration.bvp_solves << "\n";
  int reg_bad = 0;
  for (auto c : res.registration.converged) reg_bad += c == 0;
  out << "register_nonconverged " << reg_bad << "\n";
  if (res.has_exact) {
    out << "bvp_exact " << res.exact.bvp_count << "\n";
    out << "exact_nonconverged_pairs " << res.exact.count_nonconverged()
        << "\n";
  }
  out << "curvature_pairs " << res.curvature.values.size() << "\n";
  out << "curvature_skipped " << res.curvature.skipped << "\n";
  out << "curvature_mean " << format_double(res.curvature.mean) << "\n";
  for (const MethodReport& rep : res.approx) {
    const std::string tag = method_name(rep.method);
    if (res.has_exact) {
      out << "stats " << tag
          << " mean_signed=" << format_double(rep.stats.mean_signed)
          << " mean_abs=" << format_double(rep.stats.mean_abs)
          << " variance=" << format_double(rep.stats.variance)
          << " variance_abs=" << format_double(rep.stats.variance_abs)
          << " max_abs=" << format_double(rep.stats.max_abs) << "\n";
      out << "procrustes " << tag << " "
          << format_double(rep.procrustes_vs_exact) << "\n";
    }
    if (rep.method == DistanceMethod::Taylor2)
      out << "taylor2_negative_pairs " << rep.matrix.count_negativity()
          << "\n";
  }

  // Accuracy-ordering checks, meaningful when exact, first and cc are all
  // present.
  const bool comparable = res.has_exact &&
                          std::any_of(res.approx.begin(), res.approx.end(),
                                      [](const MethodReport& r) {
                                        return r.method == DistanceMethod::CC;
                                      }) &&
                          std::any_of(res.approx.begin(), res.approx.end(),
                                      [](const MethodReport& r) {
                                        return r.method ==
                                               DistanceMethod::First;
                                      });
  if (comparable) {
    const MethodReport& first = res.report_for(DistanceMethod::First);
    const MethodReport& cc = res.report_for(DistanceMethod::CC);
    out << check_line("mean_abs_cc_lt_first",
                      cc.stats.mean_abs < first.stats.mean_abs)
        << "\n";
    out << check_line("variance_abs_cc_lt_first",
                      cc.stats.variance_abs < first.stats.variance_abs)
        << "\n";
    out << check_line("procrustes_cc_lt_first",
                      cc.procrustes_vs_exact < first.procrustes_vs_exact)
        << "\n";
    out << check_line("first_bias_positive_under_negative_curvature",
                      res.curvature.mean < 0.0 &&
                          first.stats.mean_signed > 0.0)
        << "\n";
  }
}

Fig1Curves fig1_curves(const std::vector<double>& ks, double phi,
                       double t_max, int t_steps) {
  if (t_steps < 1) throw SizeError("fig1_curves: t_steps must be >= 1");
  Fig1Curves out;
  out.ks = ks;
  out.ts.resize(t_steps + 1);
  for (int i = 0; i <= t_steps; ++i)
    out.ts[i] = t_max * static_cast<double>(i) / t_steps;

  MetricData flat;
  flat.g = Matrix::Identity(2, 2);
  flat.g_inv = Matrix::Identity(2, 2);
  Vector u(2), v(2);
  u << 1.0, 0.0;
  v << std::cos(phi), std::sin(phi);

  for (double k : ks) {
    const CurvatureTensor rt =
        constant_curvature_tensor(flat.g, k, Vector::Zero(2));
    std::vector<double> cc_row, t2_row;
    cc_row.reserve(out.ts.size());
    t2_row.reserve(out.ts.size());
    for (double t : out.ts) {
      const Vector tu = t * u, tv = t * v;
      cc_row.push_back(
          approx_distance(DistanceMethod::CC, flat, &rt, tu, tv).value);
      const double sq = taylor2_sq_distance(flat, rt, tu, tv);
      t2_row.push_back(sq >= 0.0 ? std::sqrt(sq) : -std::sqrt(-sq));
    }
    out.cc.push_back(std::move(cc_row));
    out.taylor2_signed.push_back(std::move(t2_row));
  }
  return out;
}

void write_fig1_csv(const std::string& path, const Fig1Curves& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "t";
  for (double k : curves.ks) out << ",cc_k=" << format_double(k);
  for (double k : curves.ks) out << ",taylor2_signed_k=" << format_double(k);
  out << "\n";
  for (std::size_t ti = 0; ti < curves.ts.size(); ++ti) {
    out << format_double(curves.ts[ti]);
    for (std::size_t ki = 0; ki < curves.ks.size(); ++ki)
      out << ',' << format_double(curves.cc[ki][ti]);
    for (std::size_t ki = 0; ki < curves.ks.size(); ++ki)
      out << ',' << format_double(curves.taylor2_signed[ki][ti]);
    out << "\n";
  }
}

}  // namespace shapedist
