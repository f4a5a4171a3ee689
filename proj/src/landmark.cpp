// Landmark manifold with Gaussian kernel co-metric K_q; metric G = K^-1
// and its first/second coordinate derivatives in closed form.
#include "shapedist/landmark.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace shapedist {

namespace {

// One-norm condition estimate of K from K and its inverse.
double condition_estimate(const Matrix& k, const Matrix& g) {
  double nk = 0.0, ng = 0.0;
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    nk = std::max(nk, k.col(j).lpNorm<1>());
    ng = std::max(ng, g.col(j).lpNorm<1>());
  }
  return nk * ng;
}

Matrix cometric_unchecked(const GaussianKernel& kernel,
                          const LandmarkConfig& q) {
  const int d = q.d, m = q.m, n = q.dim();
  Matrix k = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double kv =
          (i == j) ? 1.0 : kernel((q.point(i) - q.point(j)).squaredNorm());
      for (int c = 0; c < d; ++c) {
        k(i * d + c, j * d + c) = kv;
        k(j * d + c, i * d + c) = kv;
      }
    }
  }
  return k;
}

}  // namespace

double LandmarkConfig::min_separation() const {
  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j)
      sep = std::min(sep, (point(i) - point(j)).norm());
  return sep;
}

bool LandmarkConfig::is_valid() const {
  if (d < 1 || m < 1 || coords.size() != static_cast<Eigen::Index>(d) * m)
    return false;
  if (!coords.allFinite()) return false;
  return m < 2 || min_separation() > kLandmarkSepEps;
}

void LandmarkConfig::validate() const {
  if (d < 1 || m < 1)
    throw DomainError("LandmarkConfig: d and m must be positive");
  if (coords.size() != static_cast<Eigen::Index>(d) * m)
    throw DomainError("LandmarkConfig: coords size must be d*m");
  if (!coords.allFinite())
    throw DomainError("LandmarkConfig: coordinates must be finite");
  if (m >= 2 && !(min_separation() > kLandmarkSepEps)) {
    std::ostringstream os;
    os << "LandmarkConfig: landmarks not distinct (min separation "
       << min_separation() << ")";
    throw DomainError(os.str());
  }
}

void GaussianKernel::validate() const {
  if (!(sigma > 0.0)) throw Error("GaussianKernel: sigma must be positive");
}

Matrix cometric_matrix(const GaussianKernel& kernel, const LandmarkConfig& q) {
  return landmark_metric(kernel, q, MetricLevel::Metric).g_inv;
}

std::vector<Matrix> cometric_first_derivs(const GaussianKernel& kernel,
                                          const LandmarkConfig& q) {
  const int d = q.d, m = q.m, n = q.dim();
  const double inv_s2 = 1.0 / (kernel.sigma * kernel.sigma);
  std::vector<Matrix> dk(n, Matrix::Zero(n, n));
  // d K / d q^a_e is nonzero only in row/column block a.
  for (int a = 0; a < m; ++a) {
    for (int j = 0; j < m; ++j) {
      if (j == a) continue;
      const Vector w = q.point(a) - q.point(j);
      const double kv = kernel(w.squaredNorm());
      for (int e = 0; e < d; ++e) {
        const double deriv = -kv * w[e] * inv_s2;
        Matrix& target = dk[a * d + e];
        for (int c = 0; c < d; ++c) {
          target(a * d + c, j * d + c) = deriv;
          target(j * d + c, a * d + c) = deriv;
        }
      }
    }
  }
  return dk;
}

std::vector<std::vector<Matrix>> cometric_second_derivs(
    const GaussianKernel& kernel, const LandmarkConfig& q) {
  const int d = q.d, m = q.m, n = q.dim();
  const double inv_s2 = 1.0 / (kernel.sigma * kernel.sigma);
  std::vector<std::vector<Matrix>> d2k(
      n, std::vector<Matrix>(n, Matrix::Zero(n, n)));
  // phi_eh(w) = kv (w_e w_h / s^4 - delta_eh / s^2), even in w.
  auto phi = [&](const Vector& w, double kv, int e, int h) {
    double v = kv * w[e] * w[h] * inv_s2 * inv_s2;
    if (e == h) v -= kv * inv_s2;
    return v;
  };
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b <= a; ++b) {
      if (a == b) {
        // d^2/(dq^a dq^a): contributes +phi on blocks (a,j) and (j,a).
        for (int j = 0; j < m; ++j) {
          if (j == a) continue;
          const Vector w = q.point(a) - q.point(j);
          const double kv = kernel(w.squaredNorm());
          for (int e = 0; e < d; ++e)
            for (int h = 0; h < d; ++h) {
              const double v = phi(w, kv, e, h);
              Matrix& target = d2k[a * d + e][a * d + h];
              for (int c = 0; c < d; ++c) {
                target(a * d + c, j * d + c) += v;
                target(j * d + c, a * d + c) += v;
              }
            }
        }
      } else {
        // d^2/(dq^a dq^b), a != b: -phi on blocks (a,b) and (b,a).
        const Vector w = q.point(a) - q.point(b);
        const double kv = kernel(w.squaredNorm());
        for (int e = 0; e < d; ++e)
          for (int h = 0; h < d; ++h) {
            const double v = -phi(w, kv, e, h);
            Matrix& tab = d2k[a * d + e][b * d + h];
            Matrix& tba = d2k[b * d + h][a * d + e];
            for (int c = 0; c < d; ++c) {
              tab(a * d + c, b * d + c) += v;
              tab(b * d + c, a * d + c) += v;
              tba(a * d + c, b * d + c) += v;
              tba(b * d + c, a * d + c) += v;
            }
          }
      }
    }
  }
  return d2k;
}

MetricData landmark_metric(const GaussianKernel& kernel,
                           const LandmarkConfig& q, MetricLevel level) {
  kernel.validate();
  q.validate();
  const int n = q.dim();
  Matrix k = cometric_unchecked(kernel, q);
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success)
    throw MetricError("landmark co-metric is not positive definite");
  Matrix g = llt.solve(Matrix::Identity(n, n));
  const double cond = condition_estimate(k, g);
  if (cond > kCometricMaxCondition) {
    std::ostringstream os;
    os << "landmark co-metric nearly singular (condition estimate " << cond
       << "); landmarks too close for kernel width " << kernel.sigma;
    throw IllConditionedError(os.str(), cond);
  }

  MetricData md;
  md.g = std::move(g);
  md.g_inv = std::move(k);
  if (level == MetricLevel::Metric) return md;

  std::vector<Matrix> dk = cometric_first_derivs(kernel, q);
  md.dg.reserve(n);
  for (int c = 0; c < n; ++c) md.dg.push_back(-(md.g * dk[c] * md.g));
  if (level == MetricLevel::FirstDerivs) return md;

  // d2G[c1][c2] = G dK1 G dK2 G + G dK2 G dK1 G - G d2K G
  //             = -dG1 dK2 G - G dK2 dG1 - G d2K G.
  std::vector<std::vector<Matrix>> d2k = cometric_second_derivs(kernel, q);
  md.d2g.assign(n, std::vector<Matrix>(n));
  std::vector<Matrix> gdk(n);  // G dK[c]
  for (int c = 0; c < n; ++c) gdk[c] = md.g * dk[c];
  for (int c1 = 0; c1 < n; ++c1)
    for (int c2 = 0; c2 <= c1; ++c2) {
      Matrix term = gdk[c1] * (gdk[c2] * md.g);
      Matrix v = term + term.transpose() - md.g * d2k[c1][c2] * md.g;
      md.d2g[c1][c2] = v;
      if (c2 != c1) md.d2g[c2][c1] = std::move(v);
    }
  return md;
}

ManifoldChart landmark_chart(const GaussianKernel& kernel, int d, int m) {
  kernel.validate();
  if (d < 1 || m < 1) throw Error("landmark_chart: d and m must be positive");
  ManifoldChart chart;
  chart.dim = d * m;
  chart.domain_check = [d, m](const Vector& q) {
    return LandmarkConfig{d, m, q}.is_valid();
  };
  chart.metric_at = [kernel, d, m](const Vector& q, MetricLevel level) {
    return landmark_metric(kernel, LandmarkConfig{d, m, q}, level);
  };
  return chart;
}

LandmarkConfig trapezoid_template() {
  LandmarkConfig cfg;
  cfg.d = 2;
  cfg.m = 4;
  cfg.coords = Vector(8);
  cfg.coords << 0.0, 0.0, 1.0, 0.0, 0.8, 1.0, 0.2, 1.0;
  return cfg;
}

}  // namespace shapedist
