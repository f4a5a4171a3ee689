// Distance-matrix consumers: classical MDS, Procrustes alignment, error
// statistics and curvature histograms.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "shapedist/manifold.hpp"
#include "shapedist/pipeline.hpp"

namespace shapedist {

struct Embedding {
  int n = 0;
  int dim = 0;
  Matrix points;       // n x dim, column means zero
  Vector eigenvalues;  // dim retained eigenvalues, descending, clamped >= 0
  int clamped = 0;     // negative eigenvalues among the top dim

  void validate() const;
};

struct HistogramSpec {
  int bin_count = 30;
  std::vector<std::int64_t> counts;  // bin_count entries
  std::vector<double> edges;         // bin_count + 1, strictly increasing

  std::int64_t total() const;
};

HistogramSpec make_histogram(
    const std::vector<double>& samples, int bin_count = 30,
    std::optional<std::pair<double, double>> range = std::nullopt);

// Torgerson MDS: double-center B = -1/2 J D^2 J, symmetric eigensolve by
// cyclic Jacobi rotations, embed with the top `dim` nonnegative
// eigenvalues. Negative eigenvalues among the top dim become zero columns.
Embedding classical_mds(const DistanceMatrix& dm, int dim = 2);

// Minimal RMS pointwise discrepancy over orthogonal transforms (reflections
// allowed) plus translation; no scaling.
double procrustes_distance(const Embedding& a, const Embedding& b);

struct ErrorStats {
  double mean_signed = 0.0;  // mean of (exact - approx), upper triangle
  double mean_abs = 0.0;
  double variance = 0.0;      // population variance of signed errors
  double variance_abs = 0.0;  // population variance of absolute errors
  double max_abs = 0.0;
  HistogramSpec histogram;  // of signed errors
};

ErrorStats error_stats(const DistanceMatrix& exact,
                       const DistanceMatrix& approx, int bin_count = 30);

struct CurvatureHistogram {
  HistogramSpec histogram;
  std::vector<double> values;  // k(v_i, v_j) over pairs, fill order i<j
  int skipped = 0;             // near-dependent pairs
  double mean = 0.0;
};

CurvatureHistogram curvature_histogram(const Registration& reg,
                                       const ManifoldChart& chart,
                                       int bin_count = 30);

// Small dense symmetric eigensolver (cyclic Jacobi), eigenpairs descending.
struct EighResult {
  Vector eigenvalues;
  Matrix eigenvectors;  // columns
};
EighResult jacobi_eigh(const Matrix& a);

// Singular values by one-sided Jacobi column orthogonalization, descending.
Vector jacobi_singular_values(const Matrix& a);

}  // namespace shapedist
