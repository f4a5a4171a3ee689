// Lemma-style closed-form model-space distances and Taylor approximants.
#include "shapedist/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shapedist {

namespace {

constexpr double kFlatRoutingEps = 1e-12;  // dimensionless |k| (a+b)^2 gate
constexpr double kLn2 = 0.6931471805599453;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// log(cosh(x)) without overflow.
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - kLn2;
}

double log_sum_exp3(double x, double y, double z) {
  const double m = std::max({x, y, z});
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(x - m) + std::exp(y - m) + std::exp(z - m));
}

// Flat branch in the cancellation-free form (a-b)^2 + 2ab(1-cos phi).
double flat_distance(double a, double b, double cos_phi) {
  const double one_minus = std::max(0.0, 1.0 - cos_phi);
  const double one_plus = std::max(0.0, 1.0 + cos_phi);
  // For cos phi < 0 use (a+b)^2 - 2ab(1+cos phi) instead; both exact.
  if (cos_phi >= 0.0)
    return std::sqrt((a - b) * (a - b) + 2.0 * a * b * one_minus);
  return std::sqrt((a + b) * (a + b) - 2.0 * a * b * one_plus);
}

}  // namespace

const char* method_name(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::Exact: return "exact";
    case DistanceMethod::First: return "first";
    case DistanceMethod::Taylor2: return "taylor2";
    case DistanceMethod::CC: return "cc";
  }
  return "?";
}

DistanceMethod method_from_name(const std::string& name) {
  if (name == "exact") return DistanceMethod::Exact;
  if (name == "first") return DistanceMethod::First;
  if (name == "taylor2") return DistanceMethod::Taylor2;
  if (name == "cc") return DistanceMethod::CC;
  throw Error("unknown distance method '" + name + "'");
}

TangentPairSummary summarize_pair(const MetricData& g,
                                  const CurvatureTensor& rt, const Vector& u,
                                  const Vector& v) {
  TangentPairSummary s;
  s.a = g.norm(u);
  s.b = g.norm(v);
  if (s.a * s.b == 0.0) {
    s.cos_phi = 1.0;  // convention for degenerate pairs
    return s;
  }
  s.cos_phi = clamp_unit(g.inner(u, v) / (s.a * s.b));
  try {
    s.curvature = sectional_curvature(rt, g, u, v);
  } catch (const DependenceError&) {
    // flat fallback
  }
  return s;
}

double cc_distance(const TangentPairSummary& s) {
  const double a = s.a, b = s.b;
  const double c = clamp_unit(s.cos_phi);
  const double sum = a + b;
  if (!s.curvature || std::abs(*s.curvature) * sum * sum < kFlatRoutingEps)
    return flat_distance(a, b, c);

  const double k = *s.curvature;
  if (k > 0.0) {
    const double r = 1.0 / std::sqrt(k);
    const double arg = clamp_unit(std::cos(a / r) * std::cos(b / r) +
                                  std::sin(a / r) * std::sin(b / r) * c);
    return r * std::acos(arg);
  }

  // Hyperbolic. With alpha = a/r, beta = b/r the determinant rewrites as
  //   D = 1 + (1+c)/2 cosh(alpha-beta) + (1-c)/2 cosh(alpha+beta),
  // a sum of nonnegative terms, and
  //   2 r atanh(sqrt(1-2/D)) = r (log D - log 2 + 2 log1p(sqrt(1-2/D))),
  // which stays finite for alpha, beta far beyond cosh overflow.
  const double r = 1.0 / std::sqrt(-k);
  const double alpha = a / r, beta = b / r;
  const double la = (1.0 + c > 0.0)
                        ? std::log((1.0 + c) / 2.0) + log_cosh(alpha - beta)
                        : -std::numeric_limits<double>::infinity();
  const double lb = (1.0 - c > 0.0)
                        ? std::log((1.0 - c) / 2.0) + log_cosh(alpha + beta)
                        : -std::numeric_limits<double>::infinity();
  const double log_d = log_sum_exp3(0.0, la, lb);
  const double two_over_d = 2.0 * std::exp(-log_d);  // in (0, 1]
  const double arg = std::sqrt(std::max(0.0, 1.0 - two_over_d));
  return r * (log_d - kLn2 + 2.0 * std::log1p(arg));
}

double taylor2_sq_distance(const MetricData& g, const CurvatureTensor& rt,
                           const Vector& u, const Vector& v) {
  const Vector diff = u - v;
  return diff.dot(g.g * diff) - rt.sectional_numerator(u, v) / 3.0;
}

double first_order_sq_distance(const MetricData& g, const Vector& u,
                               const Vector& v) {
  const Vector diff = u - v;
  return std::max(0.0, diff.dot(g.g * diff));
}

ApproxDistance approx_distance(DistanceMethod method, const MetricData& g,
                               const CurvatureTensor* rt, const Vector& u,
                               const Vector& v) {
  ApproxDistance out;
  switch (method) {
    case DistanceMethod::First:
      out.value = std::sqrt(first_order_sq_distance(g, u, v));
      return out;
    case DistanceMethod::Taylor2: {
      if (rt == nullptr)
        throw CapabilityError("approx_distance: taylor2 needs curvature");
      const double sq = taylor2_sq_distance(g, *rt, u, v);
      out.taylor2_negative = sq < 0.0;
      out.value = std::sqrt(std::max(0.0, sq));
      return out;
    }
    case DistanceMethod::CC: {
      if (rt == nullptr)
        throw CapabilityError("approx_distance: cc needs curvature");
      out.value = cc_distance(summarize_pair(g, *rt, u, v));
      return out;
    }
    case DistanceMethod::Exact:
      break;
  }
  throw Error("approx_distance: method must be first, taylor2 or cc");
}

}  // namespace shapedist
