// Error types shared across the library.
#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace shapedist {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point lies outside the open chart domain.
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A geodesic left the chart domain mid-integration.
struct DomainEscapeError : DomainError {
  DomainEscapeError(const std::string& msg, double t)
      : DomainError(msg), exit_time(t) {}
  double exit_time;
};

// Metric matrix is not symmetric positive-definite.
struct MetricError : Error {
  explicit MetricError(const std::string& msg) : Error(msg) {}
};

// Condition estimate of the kernel co-metric exceeded the guard threshold.
struct IllConditionedError : MetricError {
  IllConditionedError(const std::string& msg, double cond)
      : MetricError(msg), condition(cond) {}
  double condition;
};

// Requested data (e.g. second metric derivatives) is unavailable.
struct CapabilityError : Error {
  explicit CapabilityError(const std::string& msg) : Error(msg) {}
};

// Tangent pair too close to linear dependence for a sectional curvature.
struct DependenceError : Error {
  explicit DependenceError(const std::string& msg) : Error(msg) {}
};

// Iterative solve did not reach tolerance; carries the best iterate found.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, Eigen::VectorXd best_iterate,
                   double res, int iters)
      : Error(msg), best(std::move(best_iterate)), residual(res),
        iterations(iters) {}
  Eigen::VectorXd best;
  double residual;
  int iterations;
};

struct SizeError : Error {
  explicit SizeError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace shapedist
