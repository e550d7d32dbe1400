#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "voronoi_cur/deim.hpp"
#include "voronoi_cur/numerics.hpp"
#include "voronoi_cur/partitioning.hpp"
#include "voronoi_cur/sketch.hpp"

namespace vcur {

// Columns picked from a matrix. c holds exact copies of the selected columns
// (so nonnegativity/sparsity carry over); per_set lists each partition set's
// contribution in selection order.
struct SelectionResult {
  std::vector<Index> global_indices;  // distinct, in selection order
  DenseMatrix c;
  std::vector<std::vector<Index>> per_set;
  Index requested_rank = 0;
  bool shortfall = false;  // some set could not supply its full dimension

  Index selected() const { return Index(global_indices.size()); }
};

// Per-set greedy selection with deflation. Sets are visited in ascending
// centroid rank (ties by set index). The first set is selected with the
// basis V_1^T U_1; every later set first projects out the span of the
// columns picked so far, takes the leading right singular vectors of that
// residual, and runs the greedy selector on them. The combined result has
// independent columns as long as each step finds full-rank directions; a
// projected rank shortfall shrinks that set's quota and is flagged.
inline SelectionResult partitioned_deim(const DenseMatrix& a, const VoronoiPartition& p,
                                        const CentroidSet& cents, Index r) {
  if (Index(p.labels.size()) != a.cols() || p.num_sets != cents.count()) {
    throw parameter_error("partitioned_deim: partition/centroid mismatch");
  }
  detail::check_centroids_against(a, cents, "partitioned_deim");
  const auto sets = p.sets();
  const std::vector<Index> dims = cents.dims();
  for (Index i = 0; i < p.num_sets; ++i) {
    if (dims[std::size_t(i)] > Index(sets[std::size_t(i)].size())) {
      throw parameter_error("partitioned_deim: set " + std::to_string(i) +
                            " has fewer columns than its centroid dimension");
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(p.num_sets));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return dims[std::size_t(x)] < dims[std::size_t(y)]; });

  SelectionResult out;
  out.requested_rank = r;
  out.per_set.resize(std::size_t(p.num_sets));
  DenseMatrix c;
  bool first = true;
  for (Index i : order) {
    const Index want = dims[std::size_t(i)];
    if (want == 0) continue;
    const DenseMatrix vi = a(Eigen::all, sets[std::size_t(i)]);
    std::vector<Index> local;
    if (first) {
      // column-scaled right singular vectors of the first set
      const DenseMatrix w = vi.transpose() * cents.members[std::size_t(i)].basis.basis;
      local = deim_select(w);
      first = false;
    } else {
      const OrthonormalBasis q = range_basis(c);
      const detail::ThinSvd svd = detail::thin_svd(orthonormal_residual(vi, q));
      const Index take = std::min(want, svd.numerical_rank);
      if (take < want) out.shortfall = true;
      if (take == 0) continue;
      local = deim_select(svd.v.leftCols(take));
    }
    const Index old = Index(out.global_indices.size());
    c.conservativeResize(a.rows(), old + Index(local.size()));
    for (std::size_t t = 0; t < local.size(); ++t) {
      const Index g = sets[std::size_t(i)][std::size_t(local[t])];
      out.global_indices.push_back(g);
      out.per_set[std::size_t(i)].push_back(g);
      c.col(old + Index(t)) = a.col(g);
    }
  }
  out.c = std::move(c);
  if (out.selected() < r) out.shortfall = true;
  return out;
}

// ||(I - CC^+)A||_F / ||A||_F, computed through an orthonormal basis of
// range(C) rather than an explicit projector.
inline double reconstruction_error(const DenseMatrix& a, const DenseMatrix& c) {
  if (c.rows() != a.rows()) throw parameter_error("reconstruction_error: row count mismatch");
  if (c.cols() < 1) throw parameter_error("reconstruction_error: no selected columns");
  const double denom = fro_norm(a);
  if (denom == 0.0) throw degenerate_input_error("reconstruction_error: zero matrix");
  return fro_norm(orthonormal_residual(a, range_basis(c))) / denom;
}

// Worst-case diagnostics for a selection built on a partition.
//
//   residual      ||(I - CC^+)A||_F
//   gamma         max_i ||(I - C_i C_i^+)V_i||_F^2
//   local_rhs     sqrt(k_final * gamma)   -- residual <= local_rhs always
//                  (span(C_i) is inside span(C) for every set)
//   scaled_rhs    sqrt(2 k_final * gamma) * E_r with E_r = ||A - A_r||_F;
//                  only a guarantee when E_r >= 1, reported regardless.
struct BoundReport {
  Index k_final = 0;
  double gamma = 0.0;
  double best_rank_error = 0.0;  // E_r
  double residual = 0.0;
  double local_rhs = 0.0;
  double local_slack = 0.0;  // (rhs^2 - lhs^2) / rhs^2, 0 when rhs == 0
  bool local_holds = true;
  double scaled_rhs = 0.0;
  double scaled_slack = 0.0;
  bool scaled_applicable = false;  // E_r >= 1
  bool scaled_holds = true;
};

inline BoundReport bound_report(const DenseMatrix& a, const SelectionResult& sel,
                                const VoronoiPartition& p, Index r) {
  if (Index(p.labels.size()) != a.cols()) {
    throw parameter_error("bound_report: partition does not match the matrix");
  }
  if (sel.per_set.size() != std::size_t(p.num_sets)) {
    throw parameter_error("bound_report: selection does not match the partition");
  }
  if (r < 1) throw parameter_error("bound_report: r must be positive");

  BoundReport rep;
  const auto sets = p.sets();
  for (Index i = 0; i < p.num_sets; ++i) {
    const auto& cols = sets[std::size_t(i)];
    if (cols.empty()) continue;
    ++rep.k_final;
    const DenseMatrix vi = a(Eigen::all, cols);
    double local;
    if (sel.per_set[std::size_t(i)].empty()) {
      local = pairwise_sum_squares(vi.data(), vi.size());
    } else {
      const DenseMatrix ci = a(Eigen::all, sel.per_set[std::size_t(i)]);
      const double nrm = fro_norm(orthonormal_residual(vi, range_basis(ci)));
      local = nrm * nrm;
    }
    rep.gamma = std::max(rep.gamma, local);
  }

  rep.residual = fro_norm(orthonormal_residual(a, range_basis(sel.c)));

  const Vector sv = singular_values(a);
  const Index tail = std::max(Index(0), sv.size() - r);
  rep.best_rank_error = std::sqrt(pairwise_sum_squares(sv.data() + (sv.size() - tail), tail));

  const double lhs_sq = rep.residual * rep.residual;
  const double local_rhs_sq = double(rep.k_final) * rep.gamma;
  rep.local_rhs = std::sqrt(local_rhs_sq);
  rep.local_slack = local_rhs_sq > 0.0 ? (local_rhs_sq - lhs_sq) / local_rhs_sq : 0.0;
  rep.local_holds = lhs_sq <= local_rhs_sq * (1.0 + 1e-12) ||
                    (local_rhs_sq == 0.0 && lhs_sq <= 1e-24);

  rep.scaled_rhs = std::sqrt(2.0 * local_rhs_sq) * rep.best_rank_error;
  rep.scaled_applicable = rep.best_rank_error >= 1.0;
  rep.scaled_slack = rep.scaled_rhs > 0.0 ? (rep.scaled_rhs - rep.residual) / rep.scaled_rhs : 0.0;
  rep.scaled_holds = rep.residual <= rep.scaled_rhs * (1.0 + 1e-12) || rep.scaled_rhs == 0.0;
  return rep;
}

struct SelectOptions {
  bool sketched = false;
  std::uint64_t sketch_seed = 0;
  // When set (and sketched), this operator is applied instead of drawing a
  // fresh one from sketch_seed.
  const SketchOperator* sketch_operator = nullptr;
  bool compute_bound = true;
  const VoronoiPartition* initial_partition = nullptr;
};

struct SelectionOutcome {
  SelectionResult selection;
  EnergyTrace trace;
  BoundReport bound;
  VoronoiPartition partition;  // final partition of the selection-space columns
  Index k_final = 1;
  int iterations = 0;
  bool truncated = false;
  double final_energy = std::numeric_limits<double>::quiet_NaN();
};

// Full column-selection pipeline. Partitioning algorithms run the Lloyd
// iteration and then the partitioned selector; Algorithm::deim selects
// against the top-r right singular vectors directly. With opts.sketched the
// pipeline runs on the r x n projection, but the returned columns (and the
// bound diagnostics) always refer to the original matrix.
inline SelectionOutcome select_columns(const DenseMatrix& a, const PartitionConfig& cfg,
                                       const SelectOptions& opts = {}) {
  if (cfg.r < 1 || cfg.r > std::min(a.rows(), a.cols())) {
    throw parameter_error("select_columns: need 1 <= r <= min(rows, cols)");
  }
  DenseMatrix sketched_storage;
  const DenseMatrix* work = &a;
  if (opts.sketched) {
    if (opts.sketch_operator != nullptr) {
      sketched_storage = apply_sketch(*opts.sketch_operator, a);
    } else {
      sketched_storage = apply_sketch(gaussian_sketch(cfg.r, a.rows(), opts.sketch_seed), a);
    }
    work = &sketched_storage;
  }

  SelectionOutcome out;
  if (cfg.algorithm == Algorithm::deim) {
    const TruncatedSvd svd = truncated_svd(*work, cfg.r);
    SelectionResult sel;
    sel.requested_rank = cfg.r;
    sel.global_indices = deim_select(svd.right);
    sel.shortfall = Index(sel.global_indices.size()) < cfg.r;
    sel.per_set.push_back(sel.global_indices);
    sel.c = a(Eigen::all, sel.global_indices);
    out.selection = std::move(sel);
    out.partition.num_sets = 1;
    out.partition.labels.assign(std::size_t(a.cols()), 0);
    out.k_final = 1;
  } else {
    LloydResult lloyd = lloyd_run(*work, cfg, opts.initial_partition);
    out.selection = partitioned_deim(*work, lloyd.partition, lloyd.centroids, cfg.r);
    if (opts.sketched) {
      out.selection.c = a(Eigen::all, out.selection.global_indices);
    }
    out.trace = std::move(lloyd.trace);
    out.partition = std::move(lloyd.partition);
    out.k_final = out.partition.nonempty_sets();
    out.iterations = lloyd.iterations;
    out.truncated = lloyd.truncated;
    if (!out.trace.rows.empty()) out.final_energy = out.trace.rows.back().energy;
  }
  if (opts.compute_bound) {
    out.bound = bound_report(a, out.selection, out.partition, cfg.r);
  }
  return out;
}

// A ~ C U R with U = C^+ (A R^+); two least-squares solves, no explicit
// pseudoinverse. `rows` is a SelectionResult on A^T, so rows.c holds the
// selected rows as columns.
struct CurDecomposition {
  SelectionResult columns;
  SelectionResult rows;
  DenseMatrix u;

  DenseMatrix row_matrix() const { return rows.c.transpose(); }
  DenseMatrix reconstruct() const { return columns.c * u * rows.c.transpose(); }
};

struct CurReport {
  BoundReport column_report;  // on A
  BoundReport row_report;     // on A^T
  Index k_columns = 0;
  Index k_rows = 0;
  double cur_error = 0.0;    // ||A - CUR||_F
  double combined_rhs = 0.0; // (sqrt(2 k1 gamma_C) + sqrt(2 k2 gamma_R)) * E_r
  double combined_slack = 0.0;
  bool combined_applicable = false;
  bool combined_holds = true;
};

inline std::pair<CurDecomposition, CurReport> cur_decompose(const DenseMatrix& a,
                                                            const PartitionConfig& cfg,
                                                            const SelectOptions& opts = {}) {
  SelectOptions col_opts = opts;
  col_opts.compute_bound = true;
  col_opts.initial_partition = nullptr;
  SelectionOutcome cols = select_columns(a, cfg, col_opts);

  PartitionConfig row_cfg = cfg;
  row_cfg.seed = derive_seed(cfg.seed, streams::cur_row_side);
  SelectOptions row_opts = col_opts;
  row_opts.sketch_seed = derive_seed(opts.sketch_seed, streams::cur_row_sketch);
  const DenseMatrix at = a.transpose();
  SelectionOutcome rows = select_columns(at, row_cfg, row_opts);

  CurDecomposition cur;
  cur.columns = std::move(cols.selection);
  cur.rows = std::move(rows.selection);
  // A R^+ == ((R^T)^+ A^T)^T, with R^T the selected rows as columns.
  const DenseMatrix ar_pinv = pinv_apply(cur.rows.c, at).transpose();
  cur.u = pinv_apply(cur.columns.c, ar_pinv);

  CurReport rep;
  rep.column_report = cols.bound;
  rep.row_report = rows.bound;
  rep.k_columns = rep.column_report.k_final;
  rep.k_rows = rep.row_report.k_final;
  rep.cur_error = fro_norm(a - cur.reconstruct());
  rep.combined_rhs = (std::sqrt(2.0 * double(rep.k_columns) * rep.column_report.gamma) +
                      std::sqrt(2.0 * double(rep.k_rows) * rep.row_report.gamma)) *
                     rep.column_report.best_rank_error;
  rep.combined_applicable = rep.column_report.best_rank_error >= 1.0;
  rep.combined_slack =
      rep.combined_rhs > 0.0 ? (rep.combined_rhs - rep.cur_error) / rep.combined_rhs : 0.0;
  rep.combined_holds = rep.cur_error <= rep.combined_rhs * (1.0 + 1e-12) || rep.combined_rhs == 0.0;
  return {std::move(cur), rep};
}

}  // namespace vcur
