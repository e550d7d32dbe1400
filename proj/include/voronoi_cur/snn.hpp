#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "voronoi_cur/common.hpp"
#include "voronoi_cur/rng.hpp"

namespace vcur {

// Sparse nonnegative test matrix: sum of n rank-one terms c_i x_i y_i^T with
// c_i = 2/i for i <= l and 1/i after, x_i/y_i sparse with values in (0,1).
struct SnnConfig {
  Index m = 0;
  Index n = 0;
  Index l = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
};

// Sparse vector: ascending positions with matching values.
struct SparseFactor {
  std::vector<Index> positions;
  std::vector<double> values;
};

inline void validate(const SnnConfig& cfg) {
  if (cfg.m < 1 || cfg.n < 1) throw parameter_error("snn: dimensions must be positive");
  if (cfg.l < 1 || cfg.l >= cfg.n) throw parameter_error("snn: need 1 <= l < n");
  if (!(cfg.density > 0.0) || cfg.density > 1.0) {
    throw parameter_error("snn: density must be in (0, 1]");
  }
}

// Exactly round(density * dim) nonzeros, positions sampled without
// replacement, values uniform on (0,1) assigned in ascending position order.
inline SparseFactor draw_sparse_factor(Index dim, double density, Rng& rng) {
  const Index count = std::min<Index>(dim, Index(std::lround(density * double(dim))));
  SparseFactor f;
  f.positions = rng.sample_without_replacement(dim, count);
  f.values.reserve(f.positions.size());
  for (std::size_t t = 0; t < f.positions.size(); ++t) f.values.push_back(rng.uniform_open01());
  return f;
}

// The factor draws, exposed for diagnostics. Term i uses two dedicated
// substreams (row factor, column factor) of cfg.seed.
inline std::pair<std::vector<SparseFactor>, std::vector<SparseFactor>> snn_factors(
    const SnnConfig& cfg) {
  validate(cfg);
  std::vector<SparseFactor> xs, ys;
  xs.reserve(std::size_t(cfg.n));
  ys.reserve(std::size_t(cfg.n));
  for (Index i = 0; i < cfg.n; ++i) {
    Rng xrng(derive_seed(cfg.seed, streams::snn_row_factor(i)));
    Rng yrng(derive_seed(cfg.seed, streams::snn_col_factor(i)));
    xs.push_back(draw_sparse_factor(cfg.m, cfg.density, xrng));
    ys.push_back(draw_sparse_factor(cfg.n, cfg.density, yrng));
  }
  return {std::move(xs), std::move(ys)};
}

inline DenseMatrix gen_snn(const SnnConfig& cfg) {
  const auto [xs, ys] = snn_factors(cfg);
  DenseMatrix a = DenseMatrix::Zero(cfg.m, cfg.n);
  for (Index i = 0; i < cfg.n; ++i) {
    const double coeff = (i < cfg.l ? 2.0 : 1.0) / double(i + 1);
    const SparseFactor& x = xs[std::size_t(i)];
    const SparseFactor& y = ys[std::size_t(i)];
    for (std::size_t yt = 0; yt < y.positions.size(); ++yt) {
      const double cy = coeff * y.values[yt];
      for (std::size_t xt = 0; xt < x.positions.size(); ++xt) {
        a(x.positions[xt], y.positions[yt]) += cy * x.values[xt];
      }
    }
  }
  return a;
}

}  // namespace vcur
