// Landmark manifold Land^m(R^d) with Gaussian kernel co-metric.
#pragma once

#include <cmath>

#include "shapedist/manifold.hpp"

namespace shapedist {

inline constexpr double kLandmarkSepEps = 1e-8;
inline constexpr double kCometricMaxCondition = 1e12;

// m distinct labeled points in R^d stored as a flat coordinate vector;
// landmark i occupies coords[d*i .. d*i+d).
struct LandmarkConfig {
  int d = 0;
  int m = 0;
  Vector coords;

  int dim() const { return d * m; }
  Eigen::VectorBlock<const Vector> point(int i) const {
    return coords.segment(static_cast<Eigen::Index>(d) * i, d);
  }
  double min_separation() const;
  bool is_valid() const;
  void validate() const;  // throws DomainError
};

struct GaussianKernel {
  double sigma = 1.0;

  double operator()(double sq_dist) const {
    return std::exp(-sq_dist / (2.0 * sigma * sigma));
  }
  void validate() const;
};

// Block kernel matrix K_q with d x d block (i,j) = k(q^i, q^j) I. SPD for
// distinct landmarks; throws IllConditionedError past condition 1e12.
Matrix cometric_matrix(const GaussianKernel& kernel, const LandmarkConfig& q);

// Analytic derivatives of the co-metric, indexed by flat coordinate.
std::vector<Matrix> cometric_first_derivs(const GaussianKernel& kernel,
                                          const LandmarkConfig& q);
std::vector<std::vector<Matrix>> cometric_second_derivs(
    const GaussianKernel& kernel, const LandmarkConfig& q);

// Full metric data G = K^-1 with dG = -G (dK) G and its second-derivative
// extension, all from closed-form Gaussian kernel derivatives.
MetricData landmark_metric(const GaussianKernel& kernel,
                           const LandmarkConfig& q, MetricLevel level);

// Chart of dimension d*m over configurations of m distinct points.
ManifoldChart landmark_chart(const GaussianKernel& kernel, int d, int m);

// Four landmarks at (0,0), (1,0), (0.8,1), (0.2,1); the default synthetic
// template for experiments.
LandmarkConfig trapezoid_template();

}  // namespace shapedist
