#pragma once

#include <cmath>
#include <cstdint>

#include "voronoi_cur/common.hpp"
#include "voronoi_cur/rng.hpp"

namespace vcur {

// r x m Gaussian projection, entries i.i.d. mean 0 and standard deviation
// r^{-1/2}. Regenerating with the same seed is bit-identical.
struct SketchOperator {
  Index target_rank = 0;
  Index source_dim = 0;
  DenseMatrix entries;  // target_rank x source_dim
};

// Entries are drawn column by column so the stream layout is pinned.
inline SketchOperator gaussian_sketch(Index r, Index m, std::uint64_t seed) {
  if (r < 1 || m < 1) throw parameter_error("gaussian_sketch: dimensions must be positive");
  Rng rng(derive_seed(seed, streams::sketch_entries));
  const double scale = 1.0 / std::sqrt(double(r));
  SketchOperator op;
  op.target_rank = r;
  op.source_dim = m;
  op.entries.resize(r, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < r; ++i) op.entries(i, j) = scale * rng.gaussian();
  }
  return op;
}

// Standard-normal pool for sweeps that share one draw across ranks; a rank-r
// sketch is the leading r rows scaled by r^{-1/2}.
inline DenseMatrix standard_normal_pool(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw parameter_error("standard_normal_pool: dimensions must be positive");
  Rng rng(derive_seed(seed, streams::sweep_sketch_pool));
  DenseMatrix pool(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) pool(i, j) = rng.gaussian();
  }
  return pool;
}

inline SketchOperator sketch_from_pool(const DenseMatrix& pool, Index r) {
  if (r < 1 || r > pool.rows()) throw parameter_error("sketch_from_pool: bad rank");
  SketchOperator op;
  op.target_rank = r;
  op.source_dim = pool.cols();
  op.entries = pool.topRows(r) / std::sqrt(double(r));
  return op;
}

inline DenseMatrix apply_sketch(const SketchOperator& op, const DenseMatrix& a) {
  if (op.source_dim != a.rows()) throw parameter_error("apply_sketch: dimension mismatch");
  return op.entries * a;
}

}  // namespace vcur
