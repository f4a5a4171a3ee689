// Riemannian core: metric-with-derivatives charts, Christoffel symbols,
// curvature, geodesic integration (exp) and the shooting solver (log).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "shapedist/errors.hpp"

namespace shapedist {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// How much derivative data a metric evaluation must provide. Charts may
// skip the expensive pieces when a lower level is requested.
enum class MetricLevel { Metric, FirstDerivs, SecondDerivs };

// Dense metric data at a point.
//   dg[k](i,j)     = d g_ij / d q^k
//   d2g[l][k](i,j) = d^2 g_ij / d q^l d q^k  (may be absent)
struct MetricData {
  Matrix g;
  Matrix g_inv;
  std::vector<Matrix> dg;
  std::vector<std::vector<Matrix>> d2g;

  bool has_first() const { return !dg.empty(); }
  bool has_second() const { return !d2g.empty(); }

  double inner(const Vector& u, const Vector& v) const { return u.dot(g * v); }
  double norm(const Vector& u) const;
};

// A chart: an open subset of R^dim with a smooth metric. Immutable once
// built; safe to share across threads.
struct ManifoldChart {
  int dim = 0;
  std::function<MetricData(const Vector&, MetricLevel)> metric_at;
  std::function<bool(const Vector&)> domain_check;
};

struct GeodesicSolverConfig {
  int steps = 100;        // fixed RK4 step count over unit time
  double bvp_tol = 1e-9;  // relative endpoint tolerance for log
  int bvp_max_iter = 200;
  double fd_step = 1e-5;  // relative finite-difference step for fallbacks

  void validate() const;
};

// Full (0,4) curvature tensor at a point,
//   R(i,j,k,l) = g( R(e_i,e_j) e_k, e_l ),
// sign convention fixed so that the round unit sphere has R(u,v,v,u) > 0.
class CurvatureTensor {
 public:
  CurvatureTensor() = default;
  CurvatureTensor(Vector base, int dim)
      : base_(std::move(base)), dim_(dim),
        r_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return dim_; }
  const Vector& base() const { return base_; }

  double operator()(int i, int j, int k, int l) const {
    return r_[index(i, j, k, l)];
  }
  double& at(int i, int j, int k, int l) { return r_[index(i, j, k, l)]; }

  double max_abs() const;

  // R(u,v,v,u), the numerator of the sectional curvature.
  double sectional_numerator(const Vector& u, const Vector& v) const;

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + l;
  }
  Vector base_;
  int dim_ = 0;
  std::vector<double> r_;
};

// The (0,4) tensor of a space with constant sectional curvature k and
// metric g at `base`:  R_ijkl = k (g_il g_jk - g_ik g_jl).
CurvatureTensor constant_curvature_tensor(const Matrix& g, double k,
                                          Vector base);

// Christoffel symbols of the second kind; result[k](i,j) = Gamma^k_ij.
std::vector<Matrix> christoffel(const ManifoldChart& chart, const Vector& q);
std::vector<Matrix> christoffel_from_metric(const MetricData& md);

// Curvature from Christoffels and their derivatives. Uses analytic second
// metric derivatives when the chart provides them, otherwise central finite
// differences of the Christoffels (step fd_step per coordinate scale).
CurvatureTensor curvature_tensor(const ManifoldChart& chart, const Vector& q,
                                 const GeodesicSolverConfig& cfg = {},
                                 bool allow_fd_fallback = true);

// k = R(u,v,v,u) / (|u|^2 |v|^2 - <u,v>^2). Throws DependenceError when the
// denominator is below 1e-10 * |u|^2 |v|^2.
double sectional_curvature(const CurvatureTensor& rt, const MetricData& g,
                           const Vector& u, const Vector& v);

// Geodesic endpoint at unit time from (q, v); fixed-step RK4.
Vector exp_map(const ManifoldChart& chart, const Vector& q, const Vector& v,
               const GeodesicSolverConfig& cfg = {});

// All (q, qdot) states along the RK4 trajectory, cfg.steps + 1 entries.
std::vector<std::pair<Vector, Vector>> exp_trajectory(
    const ManifoldChart& chart, const Vector& q, const Vector& v,
    const GeodesicSolverConfig& cfg = {});

// Shooting solve of exp(q, v) = y by damped Gauss-Newton on v, initialized
// at the coordinate difference y - q. Always returns the best iterate and
// increments the process-wide BVP counter exactly once.
struct ShootingResult {
  Vector v;
  double residual = 0.0;  // max-norm endpoint mismatch
  bool converged = false;
  int iterations = 0;
};
ShootingResult shoot_log(const ManifoldChart& chart, const Vector& q,
                         const Vector& y, const GeodesicSolverConfig& cfg = {});

// Throwing wrapper around shoot_log.
Vector log_map(const ManifoldChart& chart, const Vector& q, const Vector& y,
               const GeodesicSolverConfig& cfg = {});

// Process-wide count of boundary value problems solved (atomic).
std::uint64_t bvp_solve_count();
void reset_bvp_solve_count();

}  // namespace shapedist
