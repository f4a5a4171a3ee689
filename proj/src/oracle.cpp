// Analytic sphere / plane / half-plane charts with exact distances.
#include "shapedist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shapedist {

namespace {

constexpr double kThetaMargin = 0.1;  // polar chart stays off the poles

MetricData sphere_metric(double r, const Vector& q, MetricLevel level) {
  const double theta = q[0];
  const double st = std::sin(theta);
  MetricData md;
  md.g = Matrix::Zero(2, 2);
  md.g(0, 0) = r * r;
  md.g(1, 1) = r * r * st * st;
  md.g_inv = Matrix::Zero(2, 2);
  md.g_inv(0, 0) = 1.0 / (r * r);
  md.g_inv(1, 1) = 1.0 / (r * r * st * st);
  if (level == MetricLevel::Metric) return md;
  md.dg.assign(2, Matrix::Zero(2, 2));
  md.dg[0](1, 1) = r * r * std::sin(2.0 * theta);
  if (level == MetricLevel::FirstDerivs) return md;
  md.d2g.assign(2, std::vector<Matrix>(2, Matrix::Zero(2, 2)));
  md.d2g[0][0](1, 1) = 2.0 * r * r * std::cos(2.0 * theta);
  return md;
}

MetricData flat_metric(MetricLevel level) {
  MetricData md;
  md.g = Matrix::Identity(2, 2);
  md.g_inv = Matrix::Identity(2, 2);
  if (level == MetricLevel::Metric) return md;
  md.dg.assign(2, Matrix::Zero(2, 2));
  if (level == MetricLevel::FirstDerivs) return md;
  md.d2g.assign(2, std::vector<Matrix>(2, Matrix::Zero(2, 2)));
  return md;
}

MetricData half_plane_metric(double r, const Vector& q, MetricLevel level) {
  const double y = q[1];
  const double r2 = r * r;
  MetricData md;
  md.g = (r2 / (y * y)) * Matrix::Identity(2, 2);
  md.g_inv = (y * y / r2) * Matrix::Identity(2, 2);
  if (level == MetricLevel::Metric) return md;
  md.dg.assign(2, Matrix::Zero(2, 2));
  md.dg[1] = (-2.0 * r2 / (y * y * y)) * Matrix::Identity(2, 2);
  if (level == MetricLevel::FirstDerivs) return md;
  md.d2g.assign(2, std::vector<Matrix>(2, Matrix::Zero(2, 2)));
  md.d2g[1][1] = (6.0 * r2 / (y * y * y * y)) * Matrix::Identity(2, 2);
  return md;
}

}  // namespace

ConstantCurvatureChart make_constant_curvature_chart(double k) {
  ConstantCurvatureChart cc;
  cc.k = k;
  cc.chart.dim = 2;
  cc.base = Vector(2);
  if (k > 0.0) {
    const double r = 1.0 / std::sqrt(k);
    cc.chart.metric_at = [r](const Vector& q, MetricLevel level) {
      return sphere_metric(r, q, level);
    };
    cc.chart.domain_check = [](const Vector& q) {
      return q.allFinite() && q[0] >= kThetaMargin &&
             q[0] <= std::numbers::pi - kThetaMargin;
    };
    cc.base << std::numbers::pi / 2.0, 0.0;
  } else if (k == 0.0) {
    cc.chart.metric_at = [](const Vector&, MetricLevel level) {
      return flat_metric(level);
    };
    cc.chart.domain_check = [](const Vector& q) { return q.allFinite(); };
    cc.base << 0.0, 0.0;
  } else {
    const double r = 1.0 / std::sqrt(-k);
    cc.chart.metric_at = [r](const Vector& q, MetricLevel level) {
      return half_plane_metric(r, q, level);
    };
    cc.chart.domain_check = [](const Vector& q) {
      return q.allFinite() && q[1] > 0.0;
    };
    cc.base << 0.0, 1.0;
  }
  return cc;
}

double exact_cc_distance(const ConstantCurvatureChart& c, const Vector& p,
                         const Vector& q) {
  if (!c.chart.domain_check(p) || !c.chart.domain_check(q))
    throw DomainError("exact_cc_distance: point outside chart domain");
  if (c.k > 0.0) {
    // Haversine on colatitude/longitude; stable for small separations.
    const double r = 1.0 / std::sqrt(c.k);
    const double sdt = std::sin(0.5 * (p[0] - q[0]));
    const double sdp = std::sin(0.5 * (p[1] - q[1]));
    const double h =
        sdt * sdt + std::sin(p[0]) * std::sin(q[0]) * sdp * sdp;
    return 2.0 * r * std::asin(std::min(1.0, std::sqrt(h)));
  }
  if (c.k == 0.0) return (p - q).norm();
  // Half-plane: r arccosh(1 + s), s = (dx^2 + dy^2) / (2 y1 y2), written
  // with log1p for small s.
  const double r = 1.0 / std::sqrt(-c.k);
  const double s = (p - q).squaredNorm() / (2.0 * p[1] * q[1]);
  return r * std::log1p(s + std::sqrt(s * (s + 2.0)));
}

double OracleConsistency::spread() const {
  const double lo = std::min({via_lemma3, via_exact, via_bvp});
  const double hi = std::max({via_lemma3, via_exact, via_bvp});
  return hi - lo;
}

OracleConsistency oracle_consistency(const ConstantCurvatureChart& c,
                                     const Vector& x, const Vector& u,
                                     const Vector& v,
                                     const GeodesicSolverConfig& cfg) {
  OracleConsistency out;
  const MetricData md = c.chart.metric_at(x, MetricLevel::SecondDerivs);
  const CurvatureTensor rt = curvature_tensor(c.chart, x, cfg);
  out.via_lemma3 = cc_distance(summarize_pair(md, rt, u, v));

  const Vector pu = exp_map(c.chart, x, u, cfg);
  const Vector pv = exp_map(c.chart, x, v, cfg);
  out.via_exact = exact_cc_distance(c, pu, pv);

  const ShootingResult sr = shoot_log(c.chart, pu, pv, cfg);
  out.bvp_converged = sr.converged;
  out.via_bvp = c.chart.metric_at(pu, MetricLevel::Metric).norm(sr.v);
  return out;
}

}  // namespace shapedist
