#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "voronoi_cur/cssp.hpp"
#include "voronoi_cur/matrix_io.hpp"

namespace vcur {

// One sweep cell: a (dataset, algorithm, rank, seed) pipeline run.
struct RunRecord {
  std::string dataset;
  Algorithm algo = Algorithm::deim;
  Index rank = 0;
  Index k_init = 0;
  Index k_final = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  bool sketched = false;
  double error = 0.0;
  double energy = 0.0;
  int iters = 0;
  double seconds = 0.0;
};

struct SweepOptions {
  std::vector<Algorithm> algorithms;  // CSV row order
  std::vector<Index> ranks;
  Index k = 5;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  bool sketch = false;
  bool sketch_shared = false;  // one normal pool per sweep instead of one draw per rank
  int repeats = 1;
  bool timing = true;  // false pins the seconds column to 0.000000 for diffable output
  int threads = 0;     // 0: hardware count; VORONOI_CUR_THREADS caps either way
  int max_iters = 100;
  std::string dataset_id;
};

inline int resolve_thread_count(int requested, std::size_t cells) {
  int n = requested > 0 ? requested : int(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("VORONOI_CUR_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  if (cells < std::size_t(n)) n = int(cells);
  return std::max(1, n);
}

namespace detail {

inline RunRecord run_sweep_cell(const DenseMatrix& a, const SweepOptions& o, Algorithm alg,
                                Index rank, std::uint64_t repeat_seed,
                                const DenseMatrix* shared_pool) {
  PartitionConfig cfg;
  cfg.algorithm = alg;
  cfg.k = o.k;
  cfg.r = rank;
  cfg.epsilon = o.epsilon;
  cfg.max_iters = o.max_iters;
  cfg.seed = derive_seed(repeat_seed, streams::sweep_cell(rank));

  SelectOptions opts;
  opts.compute_bound = false;
  opts.sketched = o.sketch;
  opts.sketch_seed = derive_seed(repeat_seed, streams::sweep_sketch(rank));
  SketchOperator shared_op;
  if (o.sketch && shared_pool != nullptr) {
    shared_op = sketch_from_pool(*shared_pool, rank);
    opts.sketch_operator = &shared_op;
  }
  // Every algorithm at this (repeat, rank) starts from the same partition.
  VoronoiPartition init;
  if (is_partitioned(alg)) {
    init = init_partition(a, o.k, cfg.seed);
    opts.initial_partition = &init;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SelectionOutcome outcome = select_columns(a, cfg, opts);
  const double err = reconstruction_error(a, outcome.selection.c);
  const auto t1 = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.dataset = o.dataset_id;
  rec.algo = alg;
  rec.rank = rank;
  rec.k_init = o.k;
  rec.k_final = outcome.k_final;
  rec.eps = o.epsilon;
  rec.seed = repeat_seed;
  rec.sketched = o.sketch;
  rec.error = err;
  rec.energy = outcome.final_energy;
  rec.iters = outcome.iterations;
  rec.seconds = o.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
  return rec;
}

}  // namespace detail

// Runs every (repeat, algorithm, rank) cell. Cells are independent given
// their seeds and run on a small worker pool; the output order is fixed by
// the option lists, never by scheduling.
inline std::vector<RunRecord> run_sweep(const DenseMatrix& a, const SweepOptions& o) {
  if (o.algorithms.empty()) throw parameter_error("sweep: no algorithms");
  if (o.ranks.empty()) throw parameter_error("sweep: no ranks");
  if (o.repeats < 1) throw parameter_error("sweep: repeats must be >= 1");

  struct Cell {
    Algorithm alg;
    Index rank;
    std::uint64_t repeat_seed;
    const DenseMatrix* pool;
  };
  std::vector<Cell> cells;
  std::vector<DenseMatrix> pools;
  const Index max_rank = *std::max_element(o.ranks.begin(), o.ranks.end());
  for (int t = 0; t < o.repeats; ++t) {
    const std::uint64_t repeat_seed =
        o.repeats == 1 ? o.seed : derive_seed(o.seed, streams::sweep_repeat(t));
    const DenseMatrix* pool = nullptr;
    if (o.sketch && o.sketch_shared) {
      pools.push_back(standard_normal_pool(max_rank, a.rows(), repeat_seed));
      pool = &pools.back();
    }
    for (Algorithm alg : o.algorithms) {
      for (Index rank : o.ranks) cells.push_back(Cell{alg, rank, repeat_seed, pool});
    }
  }

  std::vector<RunRecord> out(cells.size());
  const int workers = resolve_thread_count(o.threads, cells.size());
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < cells.size(); i = cursor.fetch_add(1)) {
      try {
        out[i] = detail::run_sweep_cell(a, o, cells[i].alg, cells[i].rank, cells[i].repeat_seed,
                                        cells[i].pool);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        cursor.store(cells.size());
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(std::size_t(workers - 1));
    for (int w = 0; w < workers - 1; ++w) threads.emplace_back(work);
    work();
    for (auto& th : threads) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline std::string sweep_csv_header() {
  return "dataset,algo,rank,k_init,k_final,eps,seed,sketched,error,energy,iters,seconds";
}

inline void write_sweep_csv(std::ostream& out, const std::vector<RunRecord>& rows) {
  out << sweep_csv_header() << '\n';
  for (const RunRecord& r : rows) {
    out << r.dataset << ',' << to_string(r.algo) << ',' << r.rank << ',' << r.k_init << ','
        << r.k_final << ',' << format_double_shortest(r.eps) << ',' << r.seed << ','
        << (r.sketched ? 1 : 0) << ',' << format_double_shortest(r.error) << ','
        << format_double_shortest(r.energy) << ',' << r.iters << ',' << format_fixed(r.seconds, 6)
        << '\n';
  }
}

struct TraceOptions {
  Algorithm algorithm = Algorithm::cvod;
  Index rank = 1;
  Index k = 1;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  int max_iters = 100;
};

struct TraceResult {
  Index k_init = 0;
  std::vector<EnergyTraceRow> rows;
};

inline TraceResult run_trace(const DenseMatrix& a, const TraceOptions& o) {
  PartitionConfig cfg;
  cfg.algorithm = o.algorithm;
  cfg.k = o.k;
  cfg.r = o.rank;
  cfg.epsilon = o.epsilon;
  cfg.max_iters = o.max_iters;
  cfg.seed = o.seed;
  const LloydResult res = lloyd_run(a, cfg);
  return TraceResult{o.k, res.trace.rows};
}

// iter,energy,k_active,d_1..d_k; dimension lists shorter than k_init are
// padded with zeros.
inline void write_trace_csv(std::ostream& out, const TraceResult& trace) {
  out << "iter,energy,k_active";
  for (Index i = 1; i <= trace.k_init; ++i) out << ",d_" << i;
  out << '\n';
  for (const EnergyTraceRow& row : trace.rows) {
    out << row.iteration << ',' << format_double_shortest(row.energy) << ',' << row.active_sets;
    for (Index i = 0; i < trace.k_init; ++i) {
      out << ',' << (i < Index(row.dims.size()) ? row.dims[std::size_t(i)] : Index(0));
    }
    out << '\n';
  }
}

// Minimal static line chart of error vs rank, one polyline per algorithm,
// averaging across repeats.
inline void write_sweep_svg(std::ostream& out, const std::vector<RunRecord>& rows) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2"};
  std::map<std::string, std::map<Index, std::pair<double, int>>> series;  // algo -> rank -> (sum, count)
  Index rank_lo = 0, rank_hi = 0;
  double err_hi = 0.0;
  bool any = false;
  for (const RunRecord& r : rows) {
    auto& cell = series[to_string(r.algo)][r.rank];
    cell.first += r.error;
    cell.second += 1;
    if (!any) {
      rank_lo = rank_hi = r.rank;
      any = true;
    }
    rank_lo = std::min(rank_lo, r.rank);
    rank_hi = std::max(rank_hi, r.rank);
    err_hi = std::max(err_hi, r.error);
  }
  if (!any) return;
  if (err_hi <= 0.0) err_hi = 1.0;
  const double w = 640, h = 420, ml = 70, mr = 150, mt = 30, mb = 50;
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto xmap = [&](double rank) {
    return rank_hi == rank_lo ? ml + pw / 2 : ml + pw * (rank - double(rank_lo)) / double(rank_hi - rank_lo);
  };
  auto ymap = [&](double err) { return mt + ph * (1.0 - err / err_hi); };

  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  out << "<text x='" << ml + pw / 2 << "' y='" << h - 12
      << "' text-anchor='middle' font-size='13'>rank</text>\n";
  out << "<text x='16' y='" << mt + ph / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 " << mt + ph / 2
      << ")'>normalized error</text>\n";
  out << "<text x='" << ml - 8 << "' y='" << mt + ph + 4
      << "' text-anchor='end' font-size='11'>0</text>\n";
  out << "<text x='" << ml - 8 << "' y='" << mt + 4 << "' text-anchor='end' font-size='11'>"
      << format_double(err_hi, 3) << "</text>\n";
  out << "<text x='" << ml << "' y='" << mt + ph + 16 << "' text-anchor='middle' font-size='11'>"
      << rank_lo << "</text>\n";
  out << "<text x='" << ml + pw << "' y='" << mt + ph + 16
      << "' text-anchor='middle' font-size='11'>" << rank_hi << "</text>\n";

  int idx = 0;
  for (const auto& [name, points] : series) {
    const char* color = palette[idx % 7];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (const auto& [rank, cell] : points) {
      out << xmap(double(rank)) << ',' << ymap(cell.first / cell.second) << ' ';
    }
    out << "'/>\n";
    const double ly = mt + 16.0 * idx;
    out << "<line x1='" << ml + pw + 10 << "' y1='" << ly << "' x2='" << ml + pw + 30 << "' y2='"
        << ly << "' stroke='" << color << "' stroke-width='1.5'/>\n";
    out << "<text x='" << ml + pw + 36 << "' y='" << ly + 4 << "' font-size='12'>" << name
        << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

}  // namespace vcur
