// Constant-curvature model-space distances and the second-order Taylor
// approximation of squared geodesic distances.
#pragma once

#include <optional>
#include <string>

#include "shapedist/manifold.hpp"

namespace shapedist {

enum class DistanceMethod { Exact, First, Taylor2, CC };

const char* method_name(DistanceMethod m);
DistanceMethod method_from_name(const std::string& name);

// Norms, angle and sectional curvature of a tangent pair at a point.
// `curvature` is empty when the pair is (near-)dependent or degenerate,
// in which case the flat formula applies.
struct TangentPairSummary {
  double a = 0.0;        // |u|_g
  double b = 0.0;        // |v|_g
  double cos_phi = 1.0;  // <u,v> = a b cos(phi); 1 by convention if a b = 0
  std::optional<double> curvature;
};

TangentPairSummary summarize_pair(const MetricData& g,
                                  const CurvatureTensor& rt, const Vector& u,
                                  const Vector& v);

// Closed-form geodesic distance between exp(u) and exp(v) on the
// 2-dimensional model space of curvature k (sphere / plane / hyperbolic
// plane), with r = |k|^{-1/2}:
//   k > 0: r acos( cos(a/r) cos(b/r) + sin(a/r) sin(b/r) cos phi )
//   k = 0: |u - v| = sqrt(a^2 + b^2 - 2 a b cos phi)
//   k < 0: 2 r atanh sqrt(1 - 2/D),
//          D = 1 + cosh(a/r) cosh(b/r) - sinh(a/r) sinh(b/r) cos phi.
// The hyperbolic branch is evaluated in log form (identical value) so that
// it survives a/r of several thousand without overflow. Dimensionless
// near-flat inputs (|k| (a+b)^2 < 1e-12) route to the flat branch.
double cc_distance(const TangentPairSummary& s);

// |u - v|_g^2 - (1/3) R(u,v,v,u). May be negative for large inputs.
double taylor2_sq_distance(const MetricData& g, const CurvatureTensor& rt,
                           const Vector& u, const Vector& v);

// |u - v|_g^2, the lowest-order term.
double first_order_sq_distance(const MetricData& g, const Vector& u,
                               const Vector& v);

struct ApproxDistance {
  double value = 0.0;
  bool taylor2_negative = false;  // squared Taylor value was negative
};

// Dispatch over the approximate methods. `rt` may be null for First only.
ApproxDistance approx_distance(DistanceMethod method, const MetricData& g,
                               const CurvatureTensor* rt, const Vector& u,
                               const Vector& v);

}  // namespace shapedist
