// Shared helpers for the test suites: independent oracles (great-circle
// arithmetic, finite-difference curvature pipeline) and seeded generators.
#pragma once

#include <cmath>
#include <vector>

#include "shapedist/landmark.hpp"
#include "shapedist/manifold.hpp"
#include "shapedist/rng.hpp"

namespace shapedist::testing {

// Exact exponential map on the unit sphere in the polar chart (theta, phi),
// via embedding into R^3 and great-circle arithmetic. Independent of the
// RK4 integrator.
inline Vector sphere_exp_exact(const Vector& q, const Vector& v) {
  const double theta = q[0], phi = q[1];
  Eigen::Vector3d p(std::sin(theta) * std::cos(phi),
                    std::sin(theta) * std::sin(phi), std::cos(theta));
  const Eigen::Vector3d e_theta(std::cos(theta) * std::cos(phi),
                                std::cos(theta) * std::sin(phi),
                                -std::sin(theta));
  const Eigen::Vector3d e_phi(-std::sin(theta) * std::sin(phi),
                              std::sin(theta) * std::cos(phi), 0.0);
  const Eigen::Vector3d w = v[0] * e_theta + v[1] * e_phi;
  const double speed = w.norm();
  Vector out(2);
  if (speed == 0.0) {
    out << theta, phi;
    return out;
  }
  const Eigen::Vector3d end =
      std::cos(speed) * p + std::sin(speed) * (w / speed);
  out << std::acos(std::clamp(end[2], -1.0, 1.0)), std::atan2(end[1], end[0]);
  return out;
}

// Christoffels from plain metric values only (no analytic derivatives):
// central differences of g with step h. A pipeline independent of the
// chart-provided dg.
inline std::vector<Matrix> fd_christoffel(const ManifoldChart& chart,
                                          const Vector& q, double h) {
  const int n = chart.dim;
  MetricData md;
  md.g = chart.metric_at(q, MetricLevel::Metric).g;
  md.g_inv = chart.metric_at(q, MetricLevel::Metric).g_inv;
  md.dg.assign(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    Vector qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    md.dg[k] = (chart.metric_at(qp, MetricLevel::Metric).g -
                chart.metric_at(qm, MetricLevel::Metric).g) /
               (2.0 * h);
  }
  return christoffel_from_metric(md);
}

// Sectional curvature through a fully finite-difference pipeline: both the
// Christoffels and their derivatives come from metric values, with steps
// h1 (inner) and h2 (outer) chosen differently from the library defaults.
inline double fd_sectional_curvature(const ManifoldChart& chart,
                                     const Vector& q, const Vector& u,
                                     const Vector& v, double h1, double h2) {
  const int n = chart.dim;
  std::vector<Matrix> gamma = fd_christoffel(chart, q, h1);
  std::vector<std::vector<Matrix>> dgamma(n);
  for (int m = 0; m < n; ++m) {
    Vector qp = q, qm = q;
    qp[m] += h2;
    qm[m] -= h2;
    std::vector<Matrix> gp = fd_christoffel(chart, qp, h1);
    std::vector<Matrix> gm = fd_christoffel(chart, qm, h1);
    dgamma[m].reserve(n);
    for (int k = 0; k < n; ++k)
      dgamma[m].push_back((gp[k] - gm[k]) / (2.0 * h2));
  }
  const Matrix g = chart.metric_at(q, MetricLevel::Metric).g;
  // R(u,v,v,u) = g( R(u,v)v, u ) assembled directly on the two vectors.
  Vector ruvv = Vector::Zero(n);
  for (int l = 0; l < n; ++l) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double r_lijk = dgamma[i][l](j, k) - dgamma[j][l](i, k);
          for (int m = 0; m < n; ++m)
            r_lijk += gamma[l](i, m) * gamma[m](j, k) -
                      gamma[l](j, m) * gamma[m](i, k);
          acc += r_lijk * u[i] * v[j] * v[k];
        }
    ruvv[l] = acc;
  }
  const double num = u.dot(g * ruvv);
  const double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
  return num / (uu * vv - uv * uv);
}

// Random landmark configuration with a minimum pairwise separation.
inline LandmarkConfig random_landmark_config(SeededRng& rng, int d, int m,
                                             double box = 1.5,
                                             double min_sep = 0.25) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    LandmarkConfig cfg;
    cfg.d = d;
    cfg.m = m;
    cfg.coords = Vector(d * m);
    for (int i = 0; i < d * m; ++i) cfg.coords[i] = rng.uniform(-box, box);
    if (cfg.m < 2 || cfg.min_separation() >= min_sep) return cfg;
  }
  throw std::runtime_error("random_landmark_config: rejection failed");
}

// Least-squares slope of log|err| against log t.
inline double loglog_slope(const std::vector<double>& ts,
                           const std::vector<double>& errs) {
  const int n = static_cast<int>(ts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(ts[i]);
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace shapedist::testing
