// Command-line front end: SNN generation, error sweeps, iteration traces,
// and CUR export. Exit codes: 0 success, 1 I/O failure, 2 usage.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "voronoi_cur/voronoi_cur.hpp"

namespace {

std::vector<vcur::Algorithm> parse_algorithm_list(const std::string& spec) {
  std::vector<vcur::Algorithm> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string name = spec.substr(pos, comma - pos);
    if (!name.empty()) {
      const auto alg = vcur::parse_algorithm(name);
      if (!alg) {
        throw vcur::parameter_error(
            "--algos: unknown algorithm '" + name +
            "'; valid names: deim, cvod, vqpca, adapt_cvod, adapt_vqpca");
      }
      out.push_back(*alg);
    }
    pos = comma + 1;
    if (comma == spec.size()) break;
  }
  if (out.empty()) throw vcur::parameter_error("--algos: empty algorithm list");
  return out;
}

// "start:stop:step" (stop inclusive) or a single value.
std::vector<vcur::Index> parse_rank_spec(const std::string& spec) {
  auto bad = [&]() -> std::vector<vcur::Index> {
    throw vcur::parameter_error("--ranks: expected start:stop:step or a single positive integer, got '" +
                                spec + "'");
  };
  std::vector<long long> fields;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t colon = spec.find(':', pos);
    if (colon == std::string::npos) colon = spec.size();
    try {
      std::size_t used = 0;
      const long long v = std::stoll(spec.substr(pos, colon - pos), &used);
      if (used != colon - pos) return bad();
      fields.push_back(v);
    } catch (const std::exception&) {
      return bad();
    }
    pos = colon + 1;
    if (colon == spec.size()) break;
  }
  std::vector<vcur::Index> ranks;
  if (fields.size() == 1) {
    if (fields[0] < 1) return bad();
    ranks.push_back(vcur::Index(fields[0]));
  } else if (fields.size() == 3) {
    const long long start = fields[0], stop = fields[1], step = fields[2];
    if (start < 1 || stop < start || step < 1) return bad();
    for (long long r = start; r <= stop; r += step) ranks.push_back(vcur::Index(r));
  } else {
    return bad();
  }
  return ranks;
}

vcur::Algorithm parse_single_algorithm(const std::string& name, bool allow_deim) {
  const auto alg = vcur::parse_algorithm(name);
  if (!alg || (!allow_deim && !vcur::is_partitioned(*alg))) {
    throw vcur::parameter_error("--algo: unknown algorithm '" + name + "'; valid names: " +
                                std::string(allow_deim ? "deim, " : "") +
                                "cvod, vqpca, adapt_cvod, adapt_vqpca");
  }
  return *alg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw vcur::io_error("cannot open " + path + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw vcur::io_error("write failure on " + path);
}

const char* check_token(bool holds) { return holds ? "PASS" : "FAIL"; }

void write_side_report(std::ostream& out, const char* side, const vcur::BoundReport& rep) {
  using vcur::format_double;
  out << side << ".k_final=" << rep.k_final << '\n';
  out << side << ".gamma=" << format_double(rep.gamma) << '\n';
  out << side << ".residual=" << format_double(rep.residual) << '\n';
  out << side << ".local_rhs=" << format_double(rep.local_rhs) << '\n';
  out << side << ".local_slack=" << format_double(rep.local_slack) << '\n';
  out << side << ".local_check=" << check_token(rep.local_holds) << '\n';
  out << side << ".scaled_rhs=" << format_double(rep.scaled_rhs) << '\n';
  out << side << ".scaled_applicable=" << (rep.scaled_applicable ? 1 : 0) << '\n';
  out << side << ".scaled_check="
      << (rep.scaled_applicable ? check_token(rep.scaled_holds) : "REPORT_ONLY") << '\n';
}

struct GenSnnArgs {
  long long m = 0, n = 0, l = 0;
  double density = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct SweepArgs {
  std::string input;
  std::string algos = "deim,cvod,vqpca,adapt_cvod,adapt_vqpca";
  std::string ranks;
  long long k = 5;
  double eps = 0.1;
  std::uint64_t seed = 1;
  bool sketch = false;
  bool sketch_shared = false;
  int repeats = 1;
  bool no_timing = false;
  int threads = 0;
  long long max_iters = 100;
  std::string out;
  std::string svg;
};

struct TraceArgs {
  std::string input;
  std::string algo;
  long long rank = 0, k = 0;
  double eps = 0.1;
  std::uint64_t seed = 1;
  long long max_iters = 100;
  std::string out;
};

struct CurArgs {
  std::string input;
  std::string algo;
  long long rank = 0, k = 1;
  double eps = 0.1;
  std::uint64_t seed = 1;
  std::string out_prefix;
};

void run_gen_snn(const GenSnnArgs& a) {
  vcur::SnnConfig cfg;
  cfg.m = vcur::Index(a.m);
  cfg.n = vcur::Index(a.n);
  cfg.l = vcur::Index(a.l);
  cfg.density = a.density;
  cfg.seed = a.seed;
  const vcur::DenseMatrix mat = vcur::gen_snn(cfg);
  vcur::write_matrix_file(a.out, mat);
}

void run_sweep_cmd(const SweepArgs& a) {
  const vcur::DenseMatrix mat = vcur::dataset_from_path(a.input).materialize();
  vcur::SweepOptions o;
  o.algorithms = parse_algorithm_list(a.algos);
  o.ranks = parse_rank_spec(a.ranks);
  o.k = vcur::Index(a.k);
  o.epsilon = a.eps;
  o.seed = a.seed;
  o.sketch = a.sketch || a.sketch_shared;
  o.sketch_shared = a.sketch_shared;
  o.repeats = a.repeats;
  o.timing = !a.no_timing;
  o.threads = a.threads;
  o.max_iters = int(a.max_iters);
  o.dataset_id = std::filesystem::path(a.input).filename().string();
  const std::vector<vcur::RunRecord> rows = vcur::run_sweep(mat, o);
  auto out = open_output(a.out);
  vcur::write_sweep_csv(out, rows);
  finish_output(out, a.out);
  if (!a.svg.empty()) {
    auto svg = open_output(a.svg);
    vcur::write_sweep_svg(svg, rows);
    finish_output(svg, a.svg);
  }
}

void run_trace_cmd(const TraceArgs& a) {
  const vcur::DenseMatrix mat = vcur::dataset_from_path(a.input).materialize();
  vcur::TraceOptions o;
  o.algorithm = parse_single_algorithm(a.algo, false);
  o.rank = vcur::Index(a.rank);
  o.k = vcur::Index(a.k);
  o.epsilon = a.eps;
  o.seed = a.seed;
  o.max_iters = int(a.max_iters);
  const vcur::TraceResult trace = vcur::run_trace(mat, o);
  auto out = open_output(a.out);
  vcur::write_trace_csv(out, trace);
  finish_output(out, a.out);
}

void run_cur_cmd(const CurArgs& a) {
  const vcur::DenseMatrix mat = vcur::dataset_from_path(a.input).materialize();
  vcur::PartitionConfig cfg;
  cfg.algorithm = parse_single_algorithm(a.algo, true);
  cfg.k = vcur::Index(a.k);
  cfg.r = vcur::Index(a.rank);
  cfg.epsilon = a.eps;
  cfg.seed = a.seed;
  const auto [cur, rep] = vcur::cur_decompose(mat, cfg);

  vcur::write_matrix_file(a.out_prefix + "_C.txt", cur.columns.c);
  vcur::write_matrix_file(a.out_prefix + "_U.txt", cur.u);
  vcur::write_matrix_file(a.out_prefix + "_R.txt", cur.row_matrix());

  const std::string report_path = a.out_prefix + "_report.txt";
  auto out = open_output(report_path);
  out << "algo=" << vcur::to_string(cfg.algorithm) << '\n';
  out << "rank=" << cfg.r << '\n';
  out << "k=" << cfg.k << '\n';
  out << "eps=" << vcur::format_double_shortest(cfg.epsilon) << '\n';
  out << "seed=" << cfg.seed << '\n';
  out << "col_indices=";
  for (std::size_t i = 0; i < cur.columns.global_indices.size(); ++i) {
    out << (i ? " " : "") << cur.columns.global_indices[i];
  }
  out << '\n' << "row_indices=";
  for (std::size_t i = 0; i < cur.rows.global_indices.size(); ++i) {
    out << (i ? " " : "") << cur.rows.global_indices[i];
  }
  out << '\n';
  write_side_report(out, "col", rep.column_report);
  write_side_report(out, "row", rep.row_report);
  out << "best_rank_error=" << vcur::format_double(rep.column_report.best_rank_error) << '\n';
  out << "cur.error=" << vcur::format_double(rep.cur_error) << '\n';
  out << "cur.rhs=" << vcur::format_double(rep.combined_rhs) << '\n';
  out << "cur.slack=" << vcur::format_double(rep.combined_slack) << '\n';
  out << "cur.applicable=" << (rep.combined_applicable ? 1 : 0) << '\n';
  out << "cur.check=" << (rep.combined_applicable ? check_token(rep.combined_holds) : "REPORT_ONLY")
      << '\n';
  finish_output(out, report_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-based column selection and CUR decomposition"};
  app.require_subcommand(1);

  const auto density_check = CLI::Validator(
      [](std::string& s) -> std::string {
        double v = 0.0;
        if (!vcur::parse_double(s, v) || !(v > 0.0) || v > 1.0) return "must be in (0, 1]";
        return {};
      },
      "FLOAT:(0,1]");
  const auto positive_check = CLI::PositiveNumber;

  GenSnnArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-snn", "Generate a sparse nonnegative test matrix");
  gen_cmd->add_option("--m", gen.m, "rows")->required()->check(positive_check);
  gen_cmd->add_option("--n", gen.n, "columns")->required()->check(positive_check);
  gen_cmd->add_option("--l", gen.l, "coefficient split index (1 <= l < n)")->required()->check(positive_check);
  gen_cmd->add_option("--density", gen.density, "nonzero fraction per factor, in (0, 1]")
      ->required()
      ->check(density_check);
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--out", gen.out, "output matrix file")->required();
  gen_cmd->set_config("--config", "", "key=value config file; flags take precedence");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Error sweep across algorithms and ranks");
  sweep_cmd->add_option("input", sweep.input, "input matrix file")->required();
  sweep_cmd->add_option("--algos", sweep.algos, "comma list of algorithms (default: all five)");
  sweep_cmd->add_option("--ranks", sweep.ranks, "start:stop:step (stop inclusive)")->required();
  sweep_cmd->add_option("--k", sweep.k, "number of Voronoi sets")->check(positive_check);
  sweep_cmd->add_option("--eps", sweep.eps, "stopping tolerance")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep.seed, "sweep seed");
  sweep_cmd->add_flag("--sketch", sweep.sketch, "run the pipeline on a Gaussian projection (redrawn per rank)");
  sweep_cmd->add_flag("--sketch-shared", sweep.sketch_shared,
                      "share one Gaussian draw across ranks (implies --sketch)");
  sweep_cmd->add_option("--repeats", sweep.repeats, "replicates per cell, one CSV row each")
      ->check(positive_check);
  sweep_cmd->add_flag("--no-timing", sweep.no_timing, "write 0.000000 in the seconds column");
  sweep_cmd->add_option("--threads", sweep.threads, "worker count (0 = auto; VORONOI_CUR_THREADS caps)");
  sweep_cmd->add_option("--max-iters", sweep.max_iters, "iteration cap")->check(positive_check);
  sweep_cmd->add_option("--out", sweep.out, "output CSV file")->required();
  sweep_cmd->add_option("--svg", sweep.svg, "also write a line chart to this file");
  sweep_cmd->set_config("--config", "", "key=value config file; flags take precedence");

  TraceArgs trace;
  CLI::App* trace_cmd = app.add_subcommand("trace", "Per-iteration energy and dimension trace");
  trace_cmd->add_option("input", trace.input, "input matrix file")->required();
  trace_cmd->add_option("--algo", trace.algo, "cvod | vqpca | adapt_cvod | adapt_vqpca")->required();
  trace_cmd->add_option("--rank", trace.rank, "target rank")->required()->check(positive_check);
  trace_cmd->add_option("--k", trace.k, "number of Voronoi sets")->required()->check(positive_check);
  trace_cmd->add_option("--eps", trace.eps, "stopping tolerance")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--seed", trace.seed, "run seed");
  trace_cmd->add_option("--max-iters", trace.max_iters, "iteration cap")->check(positive_check);
  trace_cmd->add_option("--out", trace.out, "output CSV file")->required();
  trace_cmd->set_config("--config", "", "key=value config file; flags take precedence");

  CurArgs cur;
  CLI::App* cur_cmd = app.add_subcommand("cur", "CUR decomposition with bound report");
  cur_cmd->add_option("input", cur.input, "input matrix file")->required();
  cur_cmd->add_option("--algo", cur.algo, "deim | cvod | vqpca | adapt_cvod | adapt_vqpca")->required();
  cur_cmd->add_option("--rank", cur.rank, "target rank")->required()->check(positive_check);
  cur_cmd->add_option("--k", cur.k, "number of Voronoi sets")->check(positive_check);
  cur_cmd->add_option("--eps", cur.eps, "stopping tolerance")->check(CLI::PositiveNumber);
  cur_cmd->add_option("--seed", cur.seed, "run seed");
  cur_cmd->add_option("--out-prefix", cur.out_prefix, "prefix for the C/U/R/report files")->required();
  cur_cmd->set_config("--config", "", "key=value config file; flags take precedence");

  try {
    app.parse(argc, argv);
    if (gen_cmd->parsed()) run_gen_snn(gen);
    if (sweep_cmd->parsed()) run_sweep_cmd(sweep);
    if (trace_cmd->parsed()) run_trace_cmd(trace);
    if (cur_cmd->parsed()) run_cur_cmd(cur);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const vcur::parameter_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const vcur::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
