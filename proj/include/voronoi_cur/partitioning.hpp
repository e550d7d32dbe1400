#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "voronoi_cur/numerics.hpp"
#include "voronoi_cur/rng.hpp"

namespace vcur {

// "deim" is the unpartitioned baseline; the other four alternate a Voronoi
// assignment step with a centroid (subspace) update step.
enum class Algorithm { deim, cvod, vqpca, adapt_cvod, adapt_vqpca };

constexpr bool is_partitioned(Algorithm a) { return a != Algorithm::deim; }
constexpr bool is_adaptive(Algorithm a) {
  return a == Algorithm::adapt_cvod || a == Algorithm::adapt_vqpca;
}
// VQPCA family centers every set at its mean before fitting the subspace.
constexpr bool is_mean_shifted(Algorithm a) {
  return a == Algorithm::vqpca || a == Algorithm::adapt_vqpca;
}

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::deim: return "deim";
    case Algorithm::cvod: return "cvod";
    case Algorithm::vqpca: return "vqpca";
    case Algorithm::adapt_cvod: return "adapt_cvod";
    case Algorithm::adapt_vqpca: return "adapt_vqpca";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "deim") return Algorithm::deim;
  if (s == "cvod") return Algorithm::cvod;
  if (s == "vqpca") return Algorithm::vqpca;
  if (s == "adapt_cvod") return Algorithm::adapt_cvod;
  if (s == "adapt_vqpca") return Algorithm::adapt_vqpca;
  return std::nullopt;
}

inline const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> v{Algorithm::deim, Algorithm::cvod, Algorithm::vqpca,
                                        Algorithm::adapt_cvod, Algorithm::adapt_vqpca};
  return v;
}

// Disjoint assignment of column indices to num_sets sets.
struct VoronoiPartition {
  Index num_sets = 0;
  std::vector<Index> labels;  // labels[col] in [0, num_sets)

  Index cols() const { return Index(labels.size()); }

  std::vector<Index> set_sizes() const {
    std::vector<Index> sizes(std::size_t(num_sets), 0);
    for (Index lab : labels) ++sizes[std::size_t(lab)];
    return sizes;
  }

  // column indices per set, ascending
  std::vector<std::vector<Index>> sets() const {
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(num_sets));
    for (Index j = 0; j < cols(); ++j) out[std::size_t(labels[std::size_t(j)])].push_back(j);
    return out;
  }

  bool has_empty_set() const {
    const auto sizes = set_sizes();
    return std::any_of(sizes.begin(), sizes.end(), [](Index s) { return s == 0; });
  }

  Index nonempty_sets() const {
    const auto sizes = set_sizes();
    return Index(std::count_if(sizes.begin(), sizes.end(), [](Index s) { return s > 0; }));
  }

  // Drop empty sets; surviving labels stay in order and become contiguous.
  void compact() {
    const auto sizes = set_sizes();
    std::vector<Index> remap(std::size_t(num_sets), -1);
    Index next = 0;
    for (Index i = 0; i < num_sets; ++i) {
      if (sizes[std::size_t(i)] > 0) remap[std::size_t(i)] = next++;
    }
    for (Index& lab : labels) lab = remap[std::size_t(lab)];
    num_sets = next;
  }
};

// Generalized centroid: a subspace plus an optional mean shift (zero for the
// unshifted family).
struct Centroid {
  OrthonormalBasis basis;
  Vector shift;
};

struct CentroidSet {
  std::vector<Centroid> members;

  Index count() const { return Index(members.size()); }

  std::vector<Index> dims() const {
    std::vector<Index> d;
    d.reserve(members.size());
    for (const Centroid& c : members) d.push_back(c.basis.dim());
    return d;
  }

  Index total_dim() const {
    Index t = 0;
    for (const Centroid& c : members) t += c.basis.dim();
    return t;
  }
};

enum class StoppingRule { family_default, absolute_decrement, relative_decrement };

struct PartitionConfig {
  Algorithm algorithm = Algorithm::cvod;
  Index k = 1;
  Index r = 1;
  // Per-set dimensions for the fixed-dimension algorithms. Empty means
  // balanced_multi_index(r, k). Ignored by the adaptive algorithms.
  std::vector<Index> multi_index;
  double epsilon = 0.1;
  int max_iters = 100;
  std::uint64_t seed = 0;
  StoppingRule stopping = StoppingRule::family_default;
};

struct EnergyTraceRow {
  int iteration = 0;  // 1-based
  double energy = 0.0;
  std::vector<Index> dims;  // centroid dimension per carried set
  Index active_sets = 0;    // sets carried this iteration
};

struct EnergyTrace {
  std::vector<EnergyTraceRow> rows;
};

struct LloydResult {
  VoronoiPartition partition;
  CentroidSet centroids;
  EnergyTrace trace;
  int iterations = 0;
  bool truncated = false;  // stopped by max_iters, not by the decrement test
};

// d_i = floor(r/k), the first r mod k sets get one extra; sums to r exactly.
inline std::vector<Index> balanced_multi_index(Index r, Index k) {
  if (k < 1) throw parameter_error("balanced_multi_index: k must be positive");
  std::vector<Index> d(std::size_t(k), r / k);
  for (Index i = 0; i < r % k; ++i) ++d[std::size_t(i)];
  return d;
}

namespace detail {

inline double column_residual_sq(const Eigen::Ref<const Vector>& x, const Centroid& c) {
  Vector w = x - c.shift;
  if (c.basis.dim() == 0) return w.squaredNorm();
  const Vector t = c.basis.basis.transpose() * w;
  w.noalias() -= c.basis.basis * t;
  return w.squaredNorm();
}

inline void check_centroids_against(const DenseMatrix& a, const CentroidSet& cents,
                                    const char* who) {
  if (cents.count() < 1) throw parameter_error(std::string(who) + ": no centroids");
  for (const Centroid& c : cents.members) {
    if (c.basis.ambient_dim != a.rows() || c.shift.size() != a.rows()) {
      throw parameter_error(std::string(who) + ": centroid dimension mismatch");
    }
  }
}

}  // namespace detail

// Seeded uniform assignment of columns to k sets, then repaired so every set
// is nonempty: the smallest-index empty set takes the smallest-index column
// of the currently largest set (ties to the smaller set index). The repair
// looks only at indices, so it is invariant under translations of A.
inline VoronoiPartition init_partition(const DenseMatrix& a, Index k, std::uint64_t seed) {
  const Index n = a.cols();
  if (k < 1 || k > n) throw parameter_error("init_partition: need 1 <= k <= column count");
  Rng rng(derive_seed(seed, streams::init_partition));
  VoronoiPartition p;
  p.num_sets = k;
  p.labels.resize(std::size_t(n));
  for (Index j = 0; j < n; ++j) p.labels[std::size_t(j)] = Index(rng.below(std::uint64_t(k)));

  auto sizes = p.set_sizes();
  for (Index i = 0; i < k; ++i) {
    if (sizes[std::size_t(i)] > 0) continue;
    Index donor = 0;
    for (Index s = 1; s < k; ++s) {
      if (sizes[std::size_t(s)] > sizes[std::size_t(donor)]) donor = s;
    }
    for (Index j = 0; j < n; ++j) {
      if (p.labels[std::size_t(j)] == donor) {
        p.labels[std::size_t(j)] = i;
        break;
      }
    }
    --sizes[std::size_t(donor)];
    sizes[std::size_t(i)] = 1;
  }
  return p;
}

// Assign every column x to the set minimizing ||(x - z_i) - U_i U_i^T (x - z_i)||^2.
// Ties go to the smaller set index. Sets with an empty basis compete with the
// plain distance ||x - z_i||^2.
inline VoronoiPartition find_voronoi_sets(const DenseMatrix& a, const CentroidSet& cents) {
  detail::check_centroids_against(a, cents, "find_voronoi_sets");
  const Index n = a.cols();
  const Index k = cents.count();
  std::vector<double> best(std::size_t(n), std::numeric_limits<double>::infinity());
  VoronoiPartition p;
  p.num_sets = k;
  p.labels.assign(std::size_t(n), 0);

  constexpr Index chunk = 4096;
  for (Index i = 0; i < k; ++i) {
    const Centroid& c = cents.members[std::size_t(i)];
    for (Index c0 = 0; c0 < n; c0 += chunk) {
      const Index nc = std::min(chunk, n - c0);
      DenseMatrix w = a.middleCols(c0, nc);
      w.colwise() -= c.shift;
      if (c.basis.dim() > 0) {
        const DenseMatrix t = c.basis.basis.transpose() * w;
        w.noalias() -= c.basis.basis * t;
      }
      for (Index j = 0; j < nc; ++j) {
        const double v = w.col(j).squaredNorm();
        if (v < best[std::size_t(c0 + j)]) {  // strict: earlier set wins ties
          best[std::size_t(c0 + j)] = v;
          p.labels[std::size_t(c0 + j)] = i;
        }
      }
    }
  }
  return p;
}

inline std::vector<DenseMatrix> gather_sets(const DenseMatrix& a, const VoronoiPartition& p) {
  if (Index(p.labels.size()) != a.cols()) {
    throw parameter_error("gather_sets: partition does not match the matrix");
  }
  const auto idx = p.sets();
  std::vector<DenseMatrix> parts;
  parts.reserve(idx.size());
  for (const auto& cols : idx) parts.push_back(a(Eigen::all, cols));
  return parts;
}

// Per-set truncated SVD at the requested dimensions. When a set's numerical
// rank falls short, the missing dimensions go to whichever set has the
// largest unused singular value (ties to the smaller set index); a remaining
// global shortfall is visible to the caller through dims().
inline CentroidSet update_centroids_fixed(const std::vector<DenseMatrix>& parts,
                                          const std::vector<Index>& dims) {
  const Index k = Index(parts.size());
  if (k < 1) throw parameter_error("update_centroids_fixed: no sets");
  if (dims.size() != parts.size()) {
    throw parameter_error("update_centroids_fixed: one dimension per set required");
  }
  const Index m = parts[0].rows();
  std::vector<detail::ThinSvd> svds(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    if (dims[std::size_t(i)] < 1) {
      throw parameter_error("update_centroids_fixed: set dimensions must be >= 1");
    }
    if (parts[std::size_t(i)].cols() == 0) {
      throw degenerate_input_error("update_centroids_fixed: set " + std::to_string(i) +
                                   " is empty");
    }
    if (parts[std::size_t(i)].rows() != m) {
      throw parameter_error("update_centroids_fixed: inconsistent row counts");
    }
    svds[std::size_t(i)] = detail::thin_svd(parts[std::size_t(i)]);
  }

  std::vector<Index> take(static_cast<std::size_t>(k));
  Index deficit = 0;
  for (Index i = 0; i < k; ++i) {
    take[std::size_t(i)] = std::min(dims[std::size_t(i)], svds[std::size_t(i)].numerical_rank);
    deficit += dims[std::size_t(i)] - take[std::size_t(i)];
  }
  while (deficit > 0) {
    Index best = -1;
    for (Index i = 0; i < k; ++i) {
      if (take[std::size_t(i)] >= svds[std::size_t(i)].numerical_rank) continue;
      if (best < 0 || svds[std::size_t(i)].sigma(take[std::size_t(i)]) >
                          svds[std::size_t(best)].sigma(take[std::size_t(best)])) {
        best = i;
      }
    }
    if (best < 0) break;  // pooled rank exhausted
    ++take[std::size_t(best)];
    --deficit;
  }

  CentroidSet out;
  out.members.reserve(std::size_t(k));
  for (Index i = 0; i < k; ++i) {
    out.members.push_back(Centroid{
        OrthonormalBasis{m, svds[std::size_t(i)].u.leftCols(take[std::size_t(i)])},
        Vector::Zero(m)});
  }
  return out;
}

// Pool every set's numerically nonzero singular values, keep the r largest
// (ties by smaller set index, then smaller position), and hand each set the
// left singular vectors paired with its kept values. Sets that keep none get
// an empty basis. Returns the number of sets with at least one dimension.
inline std::pair<CentroidSet, Index> update_centroids_adapt(const std::vector<DenseMatrix>& parts,
                                                            Index r) {
  const Index k = Index(parts.size());
  if (k < 1) throw parameter_error("update_centroids_adapt: no sets");
  if (r < 1) throw parameter_error("update_centroids_adapt: r must be positive");
  Index m = -1;
  std::vector<detail::ThinSvd> svds(static_cast<std::size_t>(k));
  Index pooled = 0;
  for (Index i = 0; i < k; ++i) {
    const DenseMatrix& part = parts[std::size_t(i)];
    if (m < 0) m = part.rows();
    if (part.rows() != m) throw parameter_error("update_centroids_adapt: inconsistent row counts");
    if (part.cols() == 0) {
      svds[std::size_t(i)] = detail::ThinSvd{DenseMatrix(m, 0), Vector(0), DenseMatrix(0, 0), 0};
      continue;
    }
    svds[std::size_t(i)] = detail::thin_svd(part);
    pooled += svds[std::size_t(i)].numerical_rank;
  }
  if (r > pooled) {
    throw parameter_error("update_centroids_adapt: target rank " + std::to_string(r) +
                          " exceeds the pooled numerical rank " + std::to_string(pooled));
  }

  struct Entry {
    double sigma;
    Index set;
    Index pos;
  };
  std::vector<Entry> pool;
  pool.reserve(std::size_t(pooled));
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < svds[std::size_t(i)].numerical_rank; ++j) {
      pool.push_back(Entry{svds[std::size_t(i)].sigma(j), i, j});
    }
  }
  std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
    if (a.sigma != b.sigma) return a.sigma > b.sigma;
    if (a.set != b.set) return a.set < b.set;
    return a.pos < b.pos;
  });

  std::vector<Index> take(std::size_t(k), 0);
  for (Index t = 0; t < r; ++t) ++take[std::size_t(pool[std::size_t(t)].set)];

  CentroidSet out;
  out.members.reserve(std::size_t(k));
  Index contributing = 0;
  for (Index i = 0; i < k; ++i) {
    if (take[std::size_t(i)] > 0) ++contributing;
    out.members.push_back(Centroid{
        OrthonormalBasis{m, svds[std::size_t(i)].u.leftCols(take[std::size_t(i)])},
        Vector::Zero(m)});
  }
  return {std::move(out), contributing};
}

namespace detail {

inline double residual_energy(const DenseMatrix& a, const VoronoiPartition& p,
                              const CentroidSet& cents, bool use_shifts) {
  check_centroids_against(a, cents, "residual_energy");
  if (Index(p.labels.size()) != a.cols() || p.num_sets != cents.count()) {
    throw parameter_error("residual_energy: partition/centroid mismatch");
  }
  const Index n = a.cols();
  std::vector<double> per_col(std::size_t(n), 0.0);
  Vector w(a.rows());
  for (Index j = 0; j < n; ++j) {
    const Centroid& c = cents.members[std::size_t(p.labels[std::size_t(j)])];
    if (use_shifts) {
      w = a.col(j) - c.shift;
    } else {
      w = a.col(j);
    }
    if (c.basis.dim() > 0) {
      const Vector t = c.basis.basis.transpose() * w;
      w.noalias() -= c.basis.basis * t;
    }
    per_col[std::size_t(j)] = w.squaredNorm();
  }
  return pairwise_sum(per_col.data(), n);
}

}  // namespace detail

// Sum of squared projection residuals with zero shifts.
inline double subspace_energy(const DenseMatrix& a, const VoronoiPartition& p,
                              const CentroidSet& cents) {
  return detail::residual_energy(a, p, cents, false);
}

// Mean-shifted form: each column measured against its set's basis after
// subtracting the stored shift (the set mean).
inline double shifted_subspace_energy(const DenseMatrix& a, const VoronoiPartition& p,
                                      const CentroidSet& cents) {
  return detail::residual_energy(a, p, cents, true);
}

namespace detail {

// Fill each empty set with the column worst represented by its own current
// centroid. Donor sets keep at least one column; ties go to the smaller
// column index.
inline void repair_empty_sets(VoronoiPartition& p, const DenseMatrix& a, const CentroidSet& cents) {
  auto sizes = p.set_sizes();
  for (Index i = 0; i < p.num_sets; ++i) {
    if (sizes[std::size_t(i)] > 0) continue;
    Index worst = -1;
    double worst_val = -1.0;
    for (Index j = 0; j < a.cols(); ++j) {
      const Index owner = p.labels[std::size_t(j)];
      if (sizes[std::size_t(owner)] < 2) continue;
      const double v = column_residual_sq(a.col(j), cents.members[std::size_t(owner)]);
      if (v > worst_val) {
        worst_val = v;
        worst = j;
      }
    }
    if (worst < 0) {
      throw degenerate_input_error("repair_empty_sets: no donor column available");
    }
    --sizes[std::size_t(p.labels[std::size_t(worst)])];
    p.labels[std::size_t(worst)] = i;
    sizes[std::size_t(i)] = 1;
  }
}

struct CentroidUpdate {
  CentroidSet centroids;
  Index contributing = 0;
};

// One centroid update on the current partition: gather, shift (VQPCA
// family), factor, reattach shifts.
inline CentroidUpdate update_centroids(const DenseMatrix& a, const VoronoiPartition& p,
                                       const PartitionConfig& cfg,
                                       const std::vector<Index>& multi_index) {
  std::vector<DenseMatrix> parts = gather_sets(a, p);
  std::vector<Vector> shifts(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (is_mean_shifted(cfg.algorithm)) {
      shifts[i] = parts[i].rowwise().mean();
      parts[i].colwise() -= shifts[i];
    } else {
      shifts[i] = Vector::Zero(a.rows());
    }
  }
  CentroidUpdate out;
  if (is_adaptive(cfg.algorithm)) {
    auto [cents, contributing] = update_centroids_adapt(parts, cfg.r);
    out.centroids = std::move(cents);
    out.contributing = contributing;
  } else {
    out.centroids = update_centroids_fixed(parts, multi_index);
    out.contributing = out.centroids.count();
  }
  for (std::size_t i = 0; i < out.centroids.members.size(); ++i) {
    out.centroids.members[i].shift = shifts[i];
  }
  return out;
}

inline void validate_config(const PartitionConfig& cfg, const DenseMatrix& a) {
  if (!is_partitioned(cfg.algorithm)) {
    throw parameter_error("lloyd_run: a partitioning algorithm is required");
  }
  if (cfg.k < 1 || cfg.k > a.cols()) throw parameter_error("config: need 1 <= k <= column count");
  if (cfg.r < 1 || cfg.r > std::min(a.rows(), a.cols())) {
    throw parameter_error("config: need 1 <= r <= min(rows, cols)");
  }
  if (!(cfg.epsilon > 0.0)) throw parameter_error("config: epsilon must be positive");
  if (cfg.max_iters < 1) throw parameter_error("config: max_iters must be >= 1");
}

inline std::vector<Index> resolve_multi_index(const PartitionConfig& cfg) {
  if (is_adaptive(cfg.algorithm)) return {};
  std::vector<Index> d = cfg.multi_index.empty() ? balanced_multi_index(cfg.r, cfg.k)
                                                 : cfg.multi_index;
  if (Index(d.size()) != cfg.k) {
    throw parameter_error("config: multi-index must have one entry per set");
  }
  Index sum = 0;
  for (Index di : d) {
    if (di < 1) {
      throw parameter_error(
          "config: fixed-dimension algorithms need every set dimension >= 1 (requires r >= k)");
    }
    sum += di;
  }
  if (sum != cfg.r) throw parameter_error("config: multi-index must sum to r");
  return d;
}

}  // namespace detail

// Alternating minimization. Each iteration refits the centroids to the
// current sets, reassigns every column, and records the energy of the new
// assignment under those centroids. The decrement test starts at the second
// iteration, so at least two always run. Stopping is on the absolute energy
// decrement for the unshifted family and the relative decrement for the
// mean-shifted family unless the config overrides it.
//
// Empty sets are handled between iterations: the adaptive algorithms drop
// them (the set count shrinks and never grows), the fixed ones refill them
// with the worst-represented column. On return the centroids have been
// recomputed once against the final partition, so every centroid dimension
// fits its set and the shifts are the final set means.
inline LloydResult lloyd_run(const DenseMatrix& a, const PartitionConfig& cfg,
                             const VoronoiPartition* initial = nullptr) {
  detail::validate_config(cfg, a);
  const std::vector<Index> multi_index = detail::resolve_multi_index(cfg);

  const bool relative =
      cfg.stopping == StoppingRule::relative_decrement ||
      (cfg.stopping == StoppingRule::family_default && is_mean_shifted(cfg.algorithm));

  LloydResult out;
  if (initial != nullptr) {
    if (Index(initial->labels.size()) != a.cols() || initial->num_sets != cfg.k) {
      throw parameter_error("lloyd_run: initial partition does not match the config");
    }
    out.partition = *initial;
    if (out.partition.has_empty_set()) {
      throw parameter_error("lloyd_run: initial partition has an empty set");
    }
  } else {
    out.partition = init_partition(a, cfg.k, cfg.seed);
  }

  double prev_energy = 0.0;
  double delta = cfg.epsilon + 1.0;
  for (int j = 1;; ++j) {
    out.iterations = j;
    if (out.partition.has_empty_set()) {
      if (is_adaptive(cfg.algorithm)) {
        out.partition.compact();
      } else {
        detail::repair_empty_sets(out.partition, a, out.centroids);
      }
    }
    out.centroids = detail::update_centroids(a, out.partition, cfg, multi_index).centroids;
    out.partition = find_voronoi_sets(a, out.centroids);
    const double energy = detail::residual_energy(a, out.partition, out.centroids,
                                                  is_mean_shifted(cfg.algorithm));
    out.trace.rows.push_back(
        EnergyTraceRow{j, energy, out.centroids.dims(), out.centroids.count()});

    if (j >= 2) delta = prev_energy - energy;
    const double metric = relative ? (prev_energy > 0.0 ? delta / prev_energy : 0.0) : delta;
    const bool converged = j >= 2 && !(metric > cfg.epsilon);
    prev_energy = energy;
    if (converged) break;
    if (j >= cfg.max_iters) {
      out.truncated = true;
      break;
    }
  }

  // Leave (partition, centroids) mutually consistent.
  if (out.partition.has_empty_set()) {
    if (is_adaptive(cfg.algorithm)) {
      out.partition.compact();
    } else {
      detail::repair_empty_sets(out.partition, a, out.centroids);
    }
  }
  out.centroids = detail::update_centroids(a, out.partition, cfg, multi_index).centroids;
  return out;
}

}  // namespace vcur
