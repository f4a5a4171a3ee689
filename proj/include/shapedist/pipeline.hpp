// End-to-end pairwise distance computation: template registration (one log
// per sample), curvature at the template, and distance-matrix assembly with
// BVP accounting.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapedist/landmark.hpp"
#include "shapedist/manifold.hpp"
#include "shapedist/model_space.hpp"

namespace shapedist {

// n landmark configurations sharing (d, m), as read from a dataset file.
struct Dataset {
  int d = 0;
  int m = 0;
  double sigma = 1.0;  // kernel width the data was generated with
  std::vector<LandmarkConfig> configs;
  std::vector<std::string> labels;

  int n() const { return static_cast<int>(configs.size()); }
  std::vector<Vector> points() const;
  void validate() const;          // pipeline use: requires n >= 2
  void validate_configs() const;  // file use: allows single-config templates
};

// Tangent representation v_i = log_template(q_i) of a dataset.
struct Registration {
  Vector template_point;
  std::vector<Vector> tangents;
  std::vector<double> residuals;
  std::vector<std::uint8_t> converged;
  std::uint64_t bvp_solves = 0;

  int n() const { return static_cast<int>(tangents.size()); }
};

struct DistanceMatrix {
  int n = 0;
  Matrix values;
  DistanceMethod method = DistanceMethod::Exact;
  std::uint64_t bvp_count = 0;
  std::vector<std::uint8_t> negativity_flags;  // n*n row-major, taylor2 only
  std::vector<std::uint8_t> nonconverged;      // n*n row-major

  bool flag_negativity(int i, int j) const {
    return !negativity_flags.empty() &&
           negativity_flags[static_cast<std::size_t>(i) * n + j] != 0;
  }
  bool flag_nonconverged(int i, int j) const {
    return !nonconverged.empty() &&
           nonconverged[static_cast<std::size_t>(i) * n + j] != 0;
  }
  int count_negativity() const;
  int count_nonconverged() const;
  void validate() const;  // symmetry, zero diagonal, finiteness
};

// Fixed-point Karcher mean: q <- exp(q, mean log_q(q_i)), initialized at
// the coordinate-wise mean, stopped at mean-tangent g-norm <= 1e-8 or 50
// iterations.
Vector karcher_mean(const std::vector<Vector>& points,
                    const ManifoldChart& chart,
                    const GeodesicSolverConfig& cfg = {});
LandmarkConfig karcher_mean(const Dataset& ds, const ManifoldChart& chart,
                            const GeodesicSolverConfig& cfg = {});

// One shooting solve per sample (exactly n BVPs). Per-sample failures are
// flagged, not fatal.
Registration register_dataset(const std::vector<Vector>& points,
                              const Vector& template_point,
                              const ManifoldChart& chart,
                              const GeodesicSolverConfig& cfg = {});
Registration register_dataset(const Dataset& ds, const LandmarkConfig& tmpl,
                              const ManifoldChart& chart,
                              const GeodesicSolverConfig& cfg = {});

// Fills all pairs from the registration tangents using metric and curvature
// evaluated once at the template; performs zero additional BVP solves.
// Pairs involving non-converged samples fall back to the first-order value
// and are flagged.
DistanceMatrix approx_distance_matrix(const Registration& reg,
                                      const ManifoldChart& chart,
                                      DistanceMethod method);

// Ground truth: one shooting solve per pair (n(n-1)/2 BVPs); the distance
// is the g-norm of the log at its base point.
DistanceMatrix exact_distance_matrix(const std::vector<Vector>& points,
                                     const ManifoldChart& chart,
                                     const GeodesicSolverConfig& cfg = {});
DistanceMatrix exact_distance_matrix(const Dataset& ds,
                                     const ManifoldChart& chart,
                                     const GeodesicSolverConfig& cfg = {});

}  // namespace shapedist
