// Analytic constant-curvature charts with closed-form exact distances,
// used as ground truth for the approximation machinery.
#pragma once

#include "shapedist/manifold.hpp"
#include "shapedist/model_space.hpp"

namespace shapedist {

// k > 0: polar chart (theta, phi) of the radius-r sphere, theta kept away
//        from the poles (theta in [0.1, pi - 0.1]);
// k = 0: the Euclidean plane;
// k < 0: half-plane (x, y), y > 0, metric (r^2/y^2) I.
struct ConstantCurvatureChart {
  double k = 0.0;
  ManifoldChart chart;
  Vector base;  // a convenient interior base point
};

ConstantCurvatureChart make_constant_curvature_chart(double k);

// Closed-form point-to-point geodesic distance; exact to rounding.
double exact_cc_distance(const ConstantCurvatureChart& c, const Vector& p,
                         const Vector& q);

// Three routes to the same distance: Lemma-style closed form from tangent
// data at x, the exact chart distance between the exp images, and the
// g-norm of the shooting log between the images.
struct OracleConsistency {
  double via_lemma3 = 0.0;
  double via_exact = 0.0;
  double via_bvp = 0.0;
  bool bvp_converged = false;
  double spread() const;  // max pairwise gap of the three values
};

OracleConsistency oracle_consistency(const ConstantCurvatureChart& c,
                                     const Vector& x, const Vector& u,
                                     const Vector& v,
                                     const GeodesicSolverConfig& cfg = {});

}  // namespace shapedist
