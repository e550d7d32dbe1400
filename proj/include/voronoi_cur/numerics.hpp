#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "voronoi_cur/common.hpp"

namespace vcur {

// Top singular triplets. left/right have orthonormal columns, values are
// nonincreasing and all numerically nonzero.
struct TruncatedSvd {
  DenseMatrix left;        // m x d
  Vector singular_values;  // length d
  DenseMatrix right;       // n x d
  Index dim() const { return singular_values.size(); }
};

// Orthonormal basis of a subspace of R^ambient_dim. dim() == 0 is the empty
// basis (projects everything to zero).
struct OrthonormalBasis {
  Index ambient_dim = 0;
  DenseMatrix basis;  // ambient_dim x d
  Index dim() const { return basis.cols(); }
};

// Sum over a fixed halving tree. The reduction order never depends on the
// caller's threading, so norms and energies are bit-stable run to run.
inline double pairwise_sum(const double* v, Index n) {
  if (n <= 16) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const Index half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum_squares(const double* v, Index n) {
  if (n <= 16) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += v[i] * v[i];
    return s;
  }
  const Index half = n / 2;
  return pairwise_sum_squares(v, half) + pairwise_sum_squares(v + half, n - half);
}

inline double fro_norm(const DenseMatrix& a) {
  return std::sqrt(pairwise_sum_squares(a.data(), a.size()));
}

namespace detail {

// sigma_j counts as nonzero iff sigma_j > max(m,n) * sigma_1 * eps.
inline Index rank_from_singular_values(const Vector& sv, Index m, Index n) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double tol =
      double(std::max(m, n)) * sv(0) * std::numeric_limits<double>::epsilon();
  Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  return r;
}

// Make each left singular vector's largest-magnitude entry positive (first
// such entry on exact ties), flipping the paired right vector. Keeps
// centroids and pivot selections reproducible.
inline void fix_singular_vector_signs(DenseMatrix& u, DenseMatrix& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index best = 0;
    for (Index i = 1; i < u.rows(); ++i) {
      if (std::abs(u(i, j)) > std::abs(u(best, j))) best = i;
    }
    if (u(best, j) < 0.0) {
      u.col(j) = -u.col(j);
      if (j < v.cols()) v.col(j) = -v.col(j);
    }
  }
}

struct ThinSvd {
  DenseMatrix u;
  Vector sigma;
  DenseMatrix v;
  Index numerical_rank = 0;
};

inline ThinSvd thin_svd(const DenseMatrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw parameter_error("thin_svd: empty matrix");
  if (!a.allFinite()) throw parameter_error("thin_svd: non-finite entries");
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out;
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  fix_singular_vector_signs(out.u, out.v);
  out.numerical_rank = rank_from_singular_values(out.sigma, a.rows(), a.cols());
  return out;
}

}  // namespace detail

inline Vector singular_values(const DenseMatrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw parameter_error("singular_values: empty matrix");
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues();
}

inline Index numerical_rank(const DenseMatrix& a) {
  return detail::rank_from_singular_values(singular_values(a), a.rows(), a.cols());
}

// Top-d singular triplets. When the numerical rank falls short of d, only
// the numerically nonzero triplets come back; callers see the actual count.
inline TruncatedSvd truncated_svd(const DenseMatrix& a, Index d) {
  if (d < 1 || d > std::min(a.rows(), a.cols())) {
    throw parameter_error("truncated_svd: need 1 <= d <= min(rows, cols)");
  }
  const detail::ThinSvd svd = detail::thin_svd(a);
  const Index t = std::min(d, svd.numerical_rank);
  TruncatedSvd out;
  out.left = svd.u.leftCols(t);
  out.singular_values = svd.sigma.head(t);
  out.right = svd.v.leftCols(t);
  return out;
}

// Orthonormal basis of range(A), dim = numerical rank. Built from the
// leading left singular vectors so the rank cutoff above applies verbatim.
inline OrthonormalBasis range_basis(const DenseMatrix& a) {
  const detail::ThinSvd svd = detail::thin_svd(a);
  if (svd.numerical_rank == 0) {
    throw degenerate_input_error("range_basis: matrix is numerically zero");
  }
  return OrthonormalBasis{a.rows(), svd.u.leftCols(svd.numerical_rank)};
}

// (I - QQ^T)A without forming the projector.
inline DenseMatrix orthonormal_residual(const DenseMatrix& a, const OrthonormalBasis& q) {
  if (q.ambient_dim != a.rows()) {
    throw parameter_error("orthonormal_residual: ambient dimension mismatch");
  }
  if (q.dim() == 0) return a;
  return a - q.basis * (q.basis.transpose() * a);
}

// C^+ B via QR-based least squares (min-norm solution); never an explicit
// inverse. C C^+ B is the orthogonal projection of B onto range(C).
inline DenseMatrix pinv_apply(const DenseMatrix& c, const DenseMatrix& b) {
  if (c.rows() != b.rows()) throw parameter_error("pinv_apply: row count mismatch");
  if (c.rows() < 1 || c.cols() < 1) throw parameter_error("pinv_apply: empty matrix");
  return c.completeOrthogonalDecomposition().solve(b);
}

}  // namespace vcur
