// Classical MDS, Procrustes alignment and histogram statistics on
// desk-scale dense matrices; eigen/singular decompositions by Jacobi
// rotations.
#include "shapedist/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shapedist {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EighResult jacobi_eigh(const Matrix& a) {
  if (a.rows() != a.cols()) throw SizeError("jacobi_eigh: matrix not square");
  const int n = static_cast<int>(a.rows());
  Matrix b = 0.5 * (a + a.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double tol = 1e-12 * std::max(1.0, b.norm());

  for (int sweep = 0; sweep < 60; ++sweep) {
    if (off_diagonal_norm(b) <= tol) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = b(p, q);
        if (apq == 0.0) continue;
        const double tau = (b(q, q) - b(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // B <- J^T B J on rows/cols p, q
        for (int i = 0; i < n; ++i) {
          const double bip = b(i, p), biq = b(i, q);
          b(i, p) = c * bip - s * biq;
          b(i, q) = s * bip + c * biq;
        }
        for (int i = 0; i < n; ++i) {
          const double bpi = b(p, i), bqi = b(q, i);
          b(p, i) = c * bpi - s * bqi;
          b(q, i) = s * bpi + c * bqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return b(x, x) > b(y, y); });
  EighResult out;
  out.eigenvalues = Vector(n);
  out.eigenvectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues[j] = b(order[j], order[j]);
    Vector col = v.col(order[j]);
    // Sign convention: largest-magnitude component positive.
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(col[i]) > std::abs(col[imax])) imax = i;
    if (col[imax] < 0.0) col = -col;
    out.eigenvectors.col(j) = col;
  }
  return out;
}

Vector jacobi_singular_values(const Matrix& a) {
  // One-sided Jacobi: orthogonalize columns by plane rotations; the
  // singular values are the final column norms.
  Matrix w = a;
  const int n = static_cast<int>(w.cols());
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Vector wp = w.col(p);
        w.col(p) = c * wp - s * w.col(q);
        w.col(q) = s * wp + c * w.col(q);
      }
    if (!rotated) break;
  }
  Vector sv(n);
  for (int j = 0; j < n; ++j) sv[j] = w.col(j).norm();
  std::sort(sv.data(), sv.data() + n, std::greater<double>());
  return sv;
}

void Embedding::validate() const {
  if (points.rows() != n || points.cols() != dim)
    throw SizeError("Embedding: shape mismatch");
  for (int j = 0; j < dim; ++j) {
    if (std::abs(points.col(j).mean()) > 1e-10)
      throw Error("Embedding: columns not centered");
    if (eigenvalues[j] < 0.0)
      throw Error("Embedding: negative retained eigenvalue");
    if (j > 0 && eigenvalues[j] > eigenvalues[j - 1])
      throw Error("Embedding: eigenvalues not descending");
  }
}

std::int64_t HistogramSpec::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

HistogramSpec make_histogram(const std::vector<double>& samples, int bin_count,
                             std::optional<std::pair<double, double>> range) {
  if (bin_count < 1) throw SizeError("make_histogram: bin_count must be >= 1");
  HistogramSpec h;
  h.bin_count = bin_count;
  double lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
  } else if (samples.empty()) {
    lo = 0.0;
    hi = 1.0;
  } else {
    lo = *std::min_element(samples.begin(), samples.end());
    hi = *std::max_element(samples.begin(), samples.end());
  }
  if (!(hi > lo)) {  // degenerate data: widen symmetrically
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges.resize(bin_count + 1);
  for (int i = 0; i <= bin_count; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / bin_count;
  h.counts.assign(bin_count, 0);
  for (double x : samples) {
    if (x < lo || x > hi) continue;
    int idx = static_cast<int>((x - lo) / (hi - lo) * bin_count);
    idx = std::clamp(idx, 0, bin_count - 1);
    ++h.counts[idx];
  }
  return h;
}

Embedding classical_mds(const DistanceMatrix& dm, int dim) {
  if (dim < 1) throw SizeError("classical_mds: dim must be >= 1");
  if (dm.n < dim + 1)
    throw SizeError("classical_mds: need at least dim + 1 samples");
  dm.validate();
  const int n = dm.n;

  // B = -1/2 J D2 J via row/column mean subtraction.
  Matrix d2 = dm.values.array().square();
  const Vector row_means = d2.rowwise().mean();
  const double grand = row_means.mean();
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b(i, j) = -0.5 * (d2(i, j) - row_means[i] - row_means[j] + grand);

  const EighResult eig = jacobi_eigh(b);
  Embedding e;
  e.n = n;
  e.dim = dim;
  e.points = Matrix::Zero(n, dim);
  e.eigenvalues = Vector::Zero(dim);
  for (int j = 0; j < dim; ++j) {
    const double lambda = eig.eigenvalues[j];
    if (lambda > 0.0) {
      e.eigenvalues[j] = lambda;
      e.points.col(j) = std::sqrt(lambda) * eig.eigenvectors.col(j);
    } else if (lambda < 0.0) {
      ++e.clamped;  // non-Euclidean direction: zero column
    }
  }
  // Eigenvectors of B with nonzero eigenvalue are orthogonal to 1 up to
  // rounding; remove the residue so the centering invariant is exact.
  for (int j = 0; j < dim; ++j)
    e.points.col(j).array() -= e.points.col(j).mean();
  return e;
}

double procrustes_distance(const Embedding& a, const Embedding& b) {
  if (a.n != b.n || a.dim != b.dim)
    throw SizeError("procrustes_distance: embeddings of different shape");
  const int n = a.n, d = a.dim;
  Matrix pa = a.points, pb = b.points;
  for (int j = 0; j < d; ++j) {
    pa.col(j).array() -= pa.col(j).mean();
    pb.col(j).array() -= pb.col(j).mean();
  }
  const Matrix h = pa.transpose() * pb;  // cross-covariance, d x d
  const Vector sv = jacobi_singular_values(h);
  const double misfit =
      pa.squaredNorm() + pb.squaredNorm() - 2.0 * sv.sum();
  return std::sqrt(std::max(0.0, misfit) / n);
}

ErrorStats error_stats(const DistanceMatrix& exact,
                       const DistanceMatrix& approx, int bin_count) {
  if (exact.n != approx.n)
    throw SizeError("error_stats: matrices of different size");
  const int n = exact.n;
  std::vector<double> signed_err, abs_err;
  signed_err.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double e = exact.values(i, j) - approx.values(i, j);
      signed_err.push_back(e);
      abs_err.push_back(std::abs(e));
    }
  ErrorStats st;
  const double count = static_cast<double>(signed_err.size());
  if (count > 0) {
    for (std::size_t i = 0; i < signed_err.size(); ++i) {
      st.mean_signed += signed_err[i];
      st.mean_abs += abs_err[i];
      st.max_abs = std::max(st.max_abs, abs_err[i]);
    }
    st.mean_signed /= count;
    st.mean_abs /= count;
    for (std::size_t i = 0; i < signed_err.size(); ++i) {
      st.variance += (signed_err[i] - st.mean_signed) *
                     (signed_err[i] - st.mean_signed);
      st.variance_abs +=
          (abs_err[i] - st.mean_abs) * (abs_err[i] - st.mean_abs);
    }
    st.variance /= count;
    st.variance_abs /= count;
  }
  st.histogram = make_histogram(signed_err, bin_count);
  return st;
}

CurvatureHistogram curvature_histogram(const Registration& reg,
                                       const ManifoldChart& chart,
                                       int bin_count) {
  const int n = reg.n();
  const MetricData md =
      chart.metric_at(reg.template_point, MetricLevel::SecondDerivs);
  const CurvatureTensor rt = curvature_tensor(chart, reg.template_point);
  CurvatureHistogram out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      try {
        out.values.push_back(
            sectional_curvature(rt, md, reg.tangents[i], reg.tangents[j]));
      } catch (const DependenceError&) {
        ++out.skipped;
      }
    }
  if (!out.values.empty())
    out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) /
               static_cast<double>(out.values.size());
  out.histogram = make_histogram(out.values, bin_count);
  return out;
}

}  // namespace shapedist
