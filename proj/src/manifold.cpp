// Generic Riemannian machinery driven by the metric-with-derivatives
// interface: Christoffels, curvature, RK4 geodesics, shooting log.
#include "shapedist/manifold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

namespace shapedist {

namespace {

std::atomic<std::uint64_t> g_bvp_counter{0};

void check_in_domain(const ManifoldChart& chart, const Vector& q,
                     const char* what) {
  if (q.size() != chart.dim) {
    std::ostringstream os;
    os << what << ": point has size " << q.size() << ", chart dim "
       << chart.dim;
    throw SizeError(os.str());
  }
  if (!chart.domain_check(q)) {
    std::ostringstream os;
    os << what << ": point outside chart domain";
    throw DomainError(os.str());
  }
}

MetricData metric_checked(const ManifoldChart& chart, const Vector& q,
                          MetricLevel level, const char* what) {
  check_in_domain(chart, q, what);
  return chart.metric_at(q, level);
}

// Lowered Christoffels: low[l](i,j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
std::vector<Matrix> christoffel_lowered(const MetricData& md) {
  const int n = static_cast<int>(md.g.rows());
  std::vector<Matrix> low(n, Matrix::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        double v = 0.5 * (md.dg[i](j, l) + md.dg[j](i, l) - md.dg[l](i, j));
        low[l](i, j) = v;
        low[l](j, i) = v;
      }
  return low;
}

// Geodesic acceleration  qddot = -g^{-1} a,
//   a_l = sum_ij (d_i g_jl) qd^i qd^j - 1/2 sum_ij (d_l g_ij) qd^i qd^j.
Vector geodesic_acceleration(const MetricData& md, const Vector& qd) {
  const int n = static_cast<int>(qd.size());
  Matrix s = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    if (qd[i] != 0.0) s.noalias() += qd[i] * md.dg[i];
  Vector a = s * qd;
  for (int l = 0; l < n; ++l) a[l] -= 0.5 * qd.dot(md.dg[l] * qd);
  return -(md.g_inv * a);
}

// RK4 over unit time with a per-step callback (step index, q, qdot).
template <typename Callback>
Vector integrate_geodesic(const ManifoldChart& chart, const Vector& q0,
                          const Vector& v, const GeodesicSolverConfig& cfg,
                          Callback&& on_step) {
  const double h = 1.0 / cfg.steps;
  Vector q = q0;
  Vector qd = v;
  on_step(0, q, qd);
  if (v.isZero(0.0)) {
    for (int s = 1; s <= cfg.steps; ++s) on_step(s, q, qd);
    return q;  // exp(q, 0) = q exactly
  }
  auto accel = [&](const Vector& qq, const Vector& qqd) {
    return geodesic_acceleration(chart.metric_at(qq, MetricLevel::FirstDerivs),
                                 qqd);
  };
  for (int s = 0; s < cfg.steps; ++s) {
    const Vector k1q = qd;
    const Vector k1v = accel(q, qd);
    const Vector k2q = qd + 0.5 * h * k1v;
    const Vector k2v = accel(q + 0.5 * h * k1q, qd + 0.5 * h * k1v);
    const Vector k3q = qd + 0.5 * h * k2v;
    const Vector k3v = accel(q + 0.5 * h * k2q, qd + 0.5 * h * k2v);
    const Vector k4q = qd + h * k3v;
    const Vector k4v = accel(q + h * k3q, qd + h * k3v);
    q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    qd += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!chart.domain_check(q)) {
      std::ostringstream os;
      os << "geodesic left chart domain at t = " << (s + 1) * h;
      throw DomainEscapeError(os.str(), (s + 1) * h);
    }
    on_step(s + 1, q, qd);
  }
  return q;
}

}  // namespace

double MetricData::norm(const Vector& u) const {
  return std::sqrt(std::max(0.0, u.dot(g * u)));
}

void GeodesicSolverConfig::validate() const {
  if (steps < 1) throw Error("GeodesicSolverConfig: steps must be >= 1");
  if (!(bvp_tol > 0.0)) throw Error("GeodesicSolverConfig: bvp_tol must be > 0");
  if (bvp_max_iter < 1)
    throw Error("GeodesicSolverConfig: bvp_max_iter must be >= 1");
  if (!(fd_step > 0.0)) throw Error("GeodesicSolverConfig: fd_step must be > 0");
}

double CurvatureTensor::max_abs() const {
  double m = 0.0;
  for (double x : r_) m = std::max(m, std::abs(x));
  return m;
}

double CurvatureTensor::sectional_numerator(const Vector& u,
                                            const Vector& v) const {
  // R(u,v,v,u) = sum R_ijkl u^i v^j v^k u^l
  double acc = 0.0;
  for (int i = 0; i < dim_; ++i) {
    if (u[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (v[j] == 0.0) continue;
      double inner_acc = 0.0;
      for (int k = 0; k < dim_; ++k) {
        if (v[k] == 0.0) continue;
        double row = 0.0;
        for (int l = 0; l < dim_; ++l)
          row += (*this)(i, j, k, l) * u[l];
        inner_acc += v[k] * row;
      }
      acc += u[i] * v[j] * inner_acc;
    }
  }
  return acc;
}

CurvatureTensor constant_curvature_tensor(const Matrix& g, double k,
                                          Vector base) {
  const int n = static_cast<int>(g.rows());
  CurvatureTensor rt(std::move(base), n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk)
        for (int l = 0; l < n; ++l)
          rt.at(i, j, kk, l) = k * (g(i, l) * g(j, kk) - g(i, kk) * g(j, l));
  return rt;
}

std::vector<Matrix> christoffel_from_metric(const MetricData& md) {
  if (!md.has_first())
    throw CapabilityError("christoffel: metric data lacks first derivatives");
  const int n = static_cast<int>(md.g.rows());
  std::vector<Matrix> low = christoffel_lowered(md);
  std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const double w = md.g_inv(k, l);
      if (w != 0.0) gamma[k].noalias() += w * low[l];
    }
  return gamma;
}

std::vector<Matrix> christoffel(const ManifoldChart& chart, const Vector& q) {
  return christoffel_from_metric(
      metric_checked(chart, q, MetricLevel::FirstDerivs, "christoffel"));
}

CurvatureTensor curvature_tensor(const ManifoldChart& chart, const Vector& q,
                                 const GeodesicSolverConfig& cfg,
                                 bool allow_fd_fallback) {
  MetricData md =
      metric_checked(chart, q, MetricLevel::SecondDerivs, "curvature_tensor");
  const int n = chart.dim;
  std::vector<Matrix> gamma = christoffel_from_metric(md);

  // dgamma[m][k](i,j) = d_m Gamma^k_ij
  std::vector<std::vector<Matrix>> dgamma(n);
  if (md.has_second()) {
    std::vector<Matrix> low = christoffel_lowered(md);
    for (int m = 0; m < n; ++m) {
      // d_m g^{kl} = -(g^-1 dg[m] g^-1)_{kl}
      Matrix dginv = -(md.g_inv * md.dg[m] * md.g_inv);
      // d_m of the lowered symbols
      std::vector<Matrix> dlow(n, Matrix::Zero(n, n));
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j <= i; ++j) {
            double v = 0.5 * (md.d2g[m][i](j, l) + md.d2g[m][j](i, l) -
                              md.d2g[m][l](i, j));
            dlow[l](i, j) = v;
            dlow[l](j, i) = v;
          }
      dgamma[m].assign(n, Matrix::Zero(n, n));
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (dginv(k, l) != 0.0) dgamma[m][k].noalias() += dginv(k, l) * low[l];
          if (md.g_inv(k, l) != 0.0)
            dgamma[m][k].noalias() += md.g_inv(k, l) * dlow[l];
        }
    }
  } else {
    if (!allow_fd_fallback)
      throw CapabilityError(
          "curvature_tensor: no second metric derivatives and finite-"
          "difference fallback disabled");
    cfg.validate();
    for (int m = 0; m < n; ++m) {
      const double h = cfg.fd_step * (1.0 + std::abs(q[m]));
      Vector qp = q, qm = q;
      qp[m] += h;
      qm[m] -= h;
      std::vector<Matrix> gp = christoffel_from_metric(
          metric_checked(chart, qp, MetricLevel::FirstDerivs, "curvature_tensor"));
      std::vector<Matrix> gm = christoffel_from_metric(
          metric_checked(chart, qm, MetricLevel::FirstDerivs, "curvature_tensor"));
      dgamma[m].reserve(n);
      for (int k = 0; k < n; ++k)
        dgamma[m].push_back((gp[k] - gm[k]) / (2.0 * h));
    }
  }

  // Upper tensor R^l_ijk of R(e_i,e_j) e_k, then lower the last index.
  CurvatureTensor rt(q, n);
  std::vector<double> up(static_cast<std::size_t>(n) * n * n * n, 0.0);
  auto upi = [n](int l, int i, int j, int k) {
    return ((static_cast<std::size_t>(l) * n + i) * n + j) * n + k;
  };
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double v = dgamma[i][l](j, k) - dgamma[j][l](i, k);
          for (int m = 0; m < n; ++m)
            v += gamma[l](i, m) * gamma[m](j, k) -
                 gamma[l](j, m) * gamma[m](i, k);
          up[upi(l, i, j, k)] = v;
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) v += md.g(l, m) * up[upi(m, i, j, k)];
          rt.at(i, j, k, l) = v;
        }
  return rt;
}

double sectional_curvature(const CurvatureTensor& rt, const MetricData& g,
                           const Vector& u, const Vector& v) {
  const double uu = g.inner(u, u);
  const double vv = g.inner(v, v);
  const double uv = g.inner(u, v);
  const double denom = uu * vv - uv * uv;
  if (!(denom > 1e-10 * uu * vv))
    throw DependenceError("sectional_curvature: tangents nearly dependent");
  return rt.sectional_numerator(u, v) / denom;
}

Vector exp_map(const ManifoldChart& chart, const Vector& q, const Vector& v,
               const GeodesicSolverConfig& cfg) {
  cfg.validate();
  check_in_domain(chart, q, "exp");
  return integrate_geodesic(chart, q, v, cfg,
                            [](int, const Vector&, const Vector&) {});
}

std::vector<std::pair<Vector, Vector>> exp_trajectory(
    const ManifoldChart& chart, const Vector& q, const Vector& v,
    const GeodesicSolverConfig& cfg) {
  cfg.validate();
  check_in_domain(chart, q, "exp");
  std::vector<std::pair<Vector, Vector>> traj;
  traj.reserve(cfg.steps + 1);
  integrate_geodesic(chart, q, v, cfg,
                     [&](int, const Vector& qq, const Vector& qd) {
                       traj.emplace_back(qq, qd);
                     });
  return traj;
}

namespace {

// One damped Gauss-Newton (Levenberg-Marquardt) descent on the shooting
// residual v -> exp(q, v) - y. Consumes at most `budget` iterations from
// *iters_left. Inadmissible trial velocities (domain escape or the
// ill-conditioning guard) are treated as rejected steps.
struct LmOutcome {
  Vector v;
  double residual_inf = std::numeric_limits<double>::infinity();
  bool converged = false;
};

LmOutcome lm_shoot(const ManifoldChart& chart, const Vector& q,
                   const Vector& y, const GeodesicSolverConfig& cfg,
                   double tol, Vector v, int* iters_left) {
  const int n = chart.dim;
  auto quiet_exp = [&](const Vector& vv, Vector& out) -> bool {
    try {
      out = integrate_geodesic(chart, q, vv, cfg,
                               [](int, const Vector&, const Vector&) {});
      return true;
    } catch (const DomainEscapeError&) {
      return false;
    } catch (const IllConditionedError&) {
      return false;
    }
  };

  LmOutcome out;
  // Shrink the start toward zero until the geodesic is admissible and the
  // endpoint is not absurdly far (wild velocities in near-degenerate metric
  // directions can produce enormous but in-domain endpoints).
  Vector endpoint;
  const double sane = 10.0 * (1.0 + (y - q).norm());
  for (int shrink = 0;; ++shrink) {
    if (quiet_exp(v, endpoint) && (endpoint - y).norm() <= sane) break;
    v *= 0.5;
    if (shrink > 60) {
      out.v = Vector::Zero(n);
      quiet_exp(out.v, endpoint);
      v = out.v;
      break;
    }
  }
  Vector r = endpoint - y;
  double r2 = r.squaredNorm();
  out.v = v;
  out.residual_inf = r.lpNorm<Eigen::Infinity>();

  double lambda = 1e-3;
  while (*iters_left > 0) {
    if (out.residual_inf <= tol) {
      out.converged = true;
      return out;
    }
    --*iters_left;
    // Forward-difference Jacobian of v -> exp(q, v).
    const double h = cfg.fd_step * (1.0 + v.lpNorm<Eigen::Infinity>());
    Matrix jac(n, n);
    bool jac_ok = true;
    for (int j = 0; j < n && jac_ok; ++j) {
      Vector vp = v;
      vp[j] += h;
      Vector ep;
      if (quiet_exp(vp, ep)) {
        jac.col(j) = (ep - endpoint) / h;
      } else {
        vp[j] = v[j] - h;
        if (quiet_exp(vp, ep))
          jac.col(j) = (endpoint - ep) / h;
        else
          jac_ok = false;
      }
    }
    if (!jac_ok) return out;

    const Matrix jtj = jac.transpose() * jac;
    const Vector jtr = jac.transpose() * r;
    const double diag_floor = 1e-12 * (1.0 + jtj.trace() / n);
    bool accepted = false;
    for (int trial = 0; trial < 14; ++trial) {
      Matrix a = jtj;
      for (int i = 0; i < n; ++i)
        a(i, i) += lambda * std::max(jtj(i, i), diag_floor);
      const Vector dv = a.ldlt().solve(-jtr);
      if (!dv.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const Vector vt = v + dv;
      Vector et;
      if (quiet_exp(vt, et)) {
        const double rt2 = (et - y).squaredNorm();
        if (rt2 < r2) {
          v = vt;
          endpoint = et;
          r = et - y;
          r2 = rt2;
          out.v = v;
          out.residual_inf = r.lpNorm<Eigen::Infinity>();
          lambda = std::max(lambda / 3.0, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!accepted) return out;  // stalled at this damping range
  }
  if (out.residual_inf <= tol) out.converged = true;
  return out;
}

}  // namespace

ShootingResult shoot_log(const ManifoldChart& chart, const Vector& q,
                         const Vector& y, const GeodesicSolverConfig& cfg) {
  cfg.validate();
  check_in_domain(chart, q, "log");
  check_in_domain(chart, y, "log");
  g_bvp_counter.fetch_add(1, std::memory_order_relaxed);

  const double tol = cfg.bvp_tol * (1.0 + y.lpNorm<Eigen::Infinity>());
  const int total = cfg.bvp_max_iter;
  int iters_left = std::min(total, std::max(30, total / 3));  // phase-1 share
  const int reserve = total - iters_left;

  // Plain solve from the coordinate-difference initialization.
  LmOutcome best = lm_shoot(chart, q, y, cfg, tol, y - q, &iters_left);
  iters_left += reserve;
  if (!best.converged && iters_left > 0) {
    // Deterministic continuation along the coordinate segment toward y,
    // warm-starting each stage; stages whose intermediate target violates
    // the domain are skipped.
    Vector v = Vector::Zero(chart.dim);
    double s_prev = 0.0;
    const double fractions[] = {0.125, 0.25, 0.375, 0.5,
                                0.625, 0.75, 0.875, 1.0};
    for (double s : fractions) {
      if (iters_left <= 0) break;
      const Vector target = q + s * (y - q);
      if (!chart.domain_check(target)) continue;
      const Vector guess =
          (s_prev == 0.0) ? Vector(s * (y - q)) : Vector(v * (s / s_prev));
      const double stage_tol =
          (s == 1.0) ? tol : 1e-6 * (1.0 + target.lpNorm<Eigen::Infinity>());
      LmOutcome stage =
          lm_shoot(chart, q, target, cfg, stage_tol, guess, &iters_left);
      if (s == 1.0) {
        if (stage.residual_inf < best.residual_inf || stage.converged)
          best = stage;
      } else if (stage.converged) {
        v = stage.v;
        s_prev = s;
      }
    }
  }

  ShootingResult res;
  res.v = best.v;
  res.residual = best.residual_inf;
  res.converged = best.converged;
  res.iterations = total - iters_left;
  return res;
}

Vector log_map(const ManifoldChart& chart, const Vector& q, const Vector& y,
               const GeodesicSolverConfig& cfg) {
  ShootingResult res = shoot_log(chart, q, y, cfg);
  if (!res.converged) {
    std::ostringstream os;
    os << "log: shooting residual " << res.residual << " above tolerance after "
       << res.iterations << " iterations";
    throw ConvergenceError(os.str(), res.v, res.residual, res.iterations);
  }
  return res.v;
}

std::uint64_t bvp_solve_count() {
  return g_bvp_counter.load(std::memory_order_relaxed);
}

void reset_bvp_solve_count() {
  g_bvp_counter.store(0, std::memory_order_relaxed);
}

}  // namespace shapedist
