#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "voronoi_cur/common.hpp"

namespace vcur {

// One splitmix64 step. Only used to derive substream seeds; the working
// generator is std::mt19937_64, whose output sequence is fixed by the
// standard, so streams reproduce bit-identically across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed of substream `stream` under the base `seed`. Every independent
// consumer (each sparse factor, the sketch, each sweep cell, ...) gets its
// own stream id so draws never interleave.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  return splitmix64(s);
}

// Registry of stream ids. Module id in the high bits, local counter below.
namespace streams {

constexpr std::uint64_t tag(std::uint64_t module_id, std::uint64_t local = 0) {
  return (module_id << 32) | local;
}

constexpr std::uint64_t init_partition = tag(1);
inline std::uint64_t snn_row_factor(Index i) { return tag(2, 2 * std::uint64_t(i)); }
inline std::uint64_t snn_col_factor(Index i) { return tag(2, 2 * std::uint64_t(i) + 1); }
constexpr std::uint64_t sketch_entries = tag(3);
constexpr std::uint64_t cur_row_side = tag(4);
constexpr std::uint64_t cur_row_sketch = tag(4, 1);
inline std::uint64_t sweep_cell(Index rank) { return tag(5, std::uint64_t(rank)); }
inline std::uint64_t sweep_sketch(Index rank) { return tag(6, std::uint64_t(rank)); }
constexpr std::uint64_t sweep_sketch_pool = tag(6, 0xffffffffull);
inline std::uint64_t sweep_repeat(int t) { return tag(7, std::uint64_t(t)); }

}  // namespace streams

// Seeded generator with pinned value mappings (no std distributions, whose
// algorithms are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1) with 53-bit resolution.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  // strictly inside (0, 1); safe under log().
  double uniform_open01() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

  // standard normal via Box-Muller; one draw cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform_open01();
    const double v = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u));
    const double ang = 2.0 * 3.14159265358979323846 * v;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  // unbiased integer in [0, bound), rejection from the top.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw parameter_error("Rng::below: bound must be positive");
    const std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    std::uint64_t x;
    do {
      x = next();
    } while (x < threshold);
    return x % bound;
  }

  // `count` distinct values from [0, dim), ascending. Partial Fisher-Yates.
  std::vector<Index> sample_without_replacement(Index dim, Index count) {
    if (count < 0 || count > dim) throw parameter_error("sample_without_replacement: bad count");
    std::vector<Index> pool(static_cast<std::size_t>(dim));
    std::iota(pool.begin(), pool.end(), Index(0));
    for (Index i = 0; i < count; ++i) {
      const Index j = i + Index(below(std::uint64_t(dim - i)));
      std::swap(pool[std::size_t(i)], pool[std::size_t(j)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace vcur
