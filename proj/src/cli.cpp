#include "dcclust/cli.hpp"

#include "dcclust/bench.hpp"
#include "dcclust/config.hpp"
#include "dcclust/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace dcclust {

namespace {

struct CommonFlags {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool deterministic_order = false;
};

std::string fixed(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

int worker_count(const CommonFlags& flags) {
  if (flags.deterministic_order) return 1;
  return flags.threads > 0 ? flags.threads : default_threads();
}

std::filesystem::path output_dir(const Config& cfg, const CommonFlags& flags) {
  return flags.out_dir.empty() ? cfg.output.dir : std::filesystem::path(flags.out_dir);
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void print_centers(std::ostream& out, const Matrix& X) {
  for (Eigen::Index l = 0; l < X.rows(); ++l) {
    out << "center " << l + 1 << ":";
    for (Eigen::Index c = 0; c < X.cols(); ++c) out << ' ' << fixed(X(l, c));
    out << '\n';
  }
}

int cmd_solve(const CommonFlags& flags, std::ostream& out) {
  Config cfg = load_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  const BuiltProblem built = build_problem(cfg);
  Matrix X0;
  if (built.initial_centers) {
    X0 = *built.initial_centers;
  } else {
    Rng rng(cfg.seed);
    X0 = sample_initial(*built.constraints, rng);
  }
  const std::filesystem::path dir = output_dir(cfg, flags);
  const std::string algorithm = to_string(cfg.algorithm);

  SolveReport report;
  try {
    report = solve(*built.problem, X0, cfg.algorithm, cfg.solver);
  } catch (const NumericalFailure& e) {
    make_dir(dir);
    write_report_json(e.partial(), dir / cfg.output.report_json, algorithm);
    throw;
  }
  make_dir(dir);
  write_report_json(report, dir / cfg.output.report_json, algorithm);
  write_trace_csv(report, dir / cfg.output.trace_csv);

  out << "problem: " << cfg.name << " (" << built.data.size() << " items, dimension " << built.data.dim() << ")\n";
  out << "algorithm: " << algorithm << '\n';
  out << "cost: " << fixed(report.cost) << '\n';
  print_centers(out, report.final_X);
  out << "iterations: " << report.iterations_total << " over " << report.stage_taus.size() << " stages\n";
  out << "termination: " << to_string(report.termination) << '\n';
  out << "wall time: " << fixed(report.wall_time, 4) << " s\n";
  out << "report: " << (dir / cfg.output.report_json).string() << '\n';
  return kExitOk;
}

void print_stats_line(std::ostream& out, const std::string& label, const Stats& s, int digits) {
  out << "  " << label << ": mean " << fixed(s.mean, digits) << ", median " << fixed(s.median, digits) << ", std "
      << fixed(s.stddev, digits) << " (n=" << s.count << ")\n";
}

int cmd_bench(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  Config cfg = load_config(flags.config);
  if (flags.seed) cfg.bench.base_seed = *flags.seed;
  const BuiltProblem built = build_problem(cfg);

  ExperimentSpec spec;
  spec.name = cfg.name;
  spec.problem = built.problem;
  spec.constraints = built.constraints;
  spec.algorithms = cfg.bench.algorithms;
  spec.restarts = cfg.bench.restarts;
  spec.base_seed = cfg.bench.base_seed;
  spec.solver = cfg.solver;
  spec.threads = worker_count(flags);
  spec.warmup = cfg.bench.warmup;
  spec.validate();
  const std::filesystem::path dir = output_dir(cfg, flags);

  const ExperimentResult result = run_experiment(spec);
  make_dir(dir);
  write_bench_csv(result.records(), dir / cfg.output.bench_csv);
  {
    std::ofstream js(dir / cfg.output.summary_json);
    js << result.summary_json().dump(2) << '\n';
    if (!js) throw InputError("cannot write " + (dir / cfg.output.summary_json).string());
  }

  out << "experiment: " << cfg.name << ", " << spec.restarts << " restarts, " << spec.threads << " thread(s)\n";
  for (const AlgorithmSummary& s : result.summaries) {
    out << to_string(s.algorithm) << ":\n";
    print_stats_line(out, "cost", s.cost, 5);
    print_stats_line(out, "iterations", s.iterations, 1);
    print_stats_line(out, "wall time [s]", s.wall_time, 5);
    out << "  mean centers:\n";
    std::ostringstream centers;
    print_centers(centers, s.mean_X);
    std::istringstream lines(centers.str());
    for (std::string line; std::getline(lines, line);) out << "    " << line << '\n';
  }
  for (const RatioSummary& r : result.ratios) {
    out << "dca/" << to_string(r.algorithm) << ":\n";
    print_stats_line(out, "iteration ratio", r.iteration_ratio, 3);
    print_stats_line(out, "time ratio", r.time_ratio, 3);
  }
  out << "results: " << (dir / cfg.output.bench_csv).string() << '\n';
  if (result.failed_rows > 0) {
    err << "warning: " << result.failed_rows << " of " << result.rows.size() << " rows had a failed solve\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_scaling(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  Config cfg = load_config(flags.config);
  if (!cfg.scaling) throw ConfigError("scaling", "section is required for the scaling command");
  ScalingSpec spec = *cfg.scaling;
  if (flags.seed) spec.base_seed = *flags.seed;
  spec.threads = worker_count(flags);
  const std::filesystem::path dir = output_dir(cfg, flags);

  const std::vector<ScalingRow> rows = run_scaling(spec);
  make_dir(dir);
  write_scaling_csv(rows, dir / cfg.output.scaling_csv);

  std::size_t failures = 0;
  out << "dim      n  pair                  iter ratio (median)  time ratio (median)  ok/fail\n";
  for (const ScalingRow& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%3d %6d  %-20s  %19.3f  %19.3f  %zu/%zu\n", r.dim, r.n, r.pair.c_str(),
                  r.iteration_ratio.median, r.time_ratio.median, r.successes, r.failures);
    out << line;
    failures += r.failures;
  }
  out << "results: " << (dir / cfg.output.scaling_csv).string() << '\n';
  if (failures > 0) {
    err << "warning: " << failures << " paired solves failed\n";
    return kExitNumerical;
  }
  return kExitOk;
}

struct GenerateFlags {
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> dim;
  std::optional<double> low;
  std::optional<double> high;
};

int cmd_generate(const CommonFlags& flags, const GenerateFlags& gen, std::ostream& out) {
  RandomSpec spec;
  std::filesystem::path dir = "out/generate";
  std::string file = "dataset.csv";
  if (!flags.config.empty()) {
    const Config cfg = load_config(flags.config);
    if (!cfg.dataset || cfg.dataset->kind != DatasetKind::Random)
      throw ConfigError("dataset.kind", "generate needs a random dataset");
    spec = cfg.dataset->random;
    dir = cfg.output.dir;
    file = cfg.output.dataset_csv;
  }
  if (gen.n) spec.n = *gen.n;
  if (gen.dim) spec.dim = *gen.dim;
  if (gen.low) spec.low = *gen.low;
  if (gen.high) spec.high = *gen.high;
  if (flags.seed) spec.seed = *flags.seed;
  if (!flags.out_dir.empty()) dir = flags.out_dir;
  try {
    spec.validate();
  } catch (const InputError& e) {
    throw ConfigError("generate", e.what());
  }
  const Dataset data = generate_uniform(spec);
  make_dir(dir);
  write_points_csv(data, dir / file);
  out << "wrote " << spec.n << " points in dimension " << spec.dim << " to " << (dir / file).string() << '\n';
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required, bool threaded) {
  auto* cfg = cmd->add_option("config", flags.config, "JSON config file");
  if (config_required) cfg->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", flags.seed, "Seed (overrides the config)");
  if (threaded) {
    cmd->add_option("--threads", flags.threads, "Worker threads for benchmark rows (default: all cores)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--deterministic-order", flags.deterministic_order,
                  "Run rows one at a time in seed order (outputs are seed-sorted either way)");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained clustering and set clustering with DCA and boosted DCA", "dcclust"};
  app.require_subcommand(1);
  CommonFlags flags;
  GenerateFlags gen;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and print the cost and centers");
  add_common(solve_cmd, flags, true, false);
  auto* bench_cmd = app.add_subcommand("bench", "Multi-start comparison of the configured algorithms");
  add_common(bench_cmd, flags, true, true);
  auto* scaling_cmd = app.add_subcommand("scaling", "Ratio statistics over a grid of dimensions and sizes");
  add_common(scaling_cmd, flags, true, true);
  auto* generate_cmd = app.add_subcommand("generate", "Write a uniform random point set as CSV");
  add_common(generate_cmd, flags, false, false);
  generate_cmd->add_option("--n", gen.n, "Number of points");
  generate_cmd->add_option("--dim", gen.dim, "Dimension");
  generate_cmd->add_option("--low", gen.low, "Lower bound of each coordinate");
  generate_cmd->add_option("--high", gen.high, "Upper bound of each coordinate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve_cmd) return cmd_solve(flags, out);
    if (*bench_cmd) return cmd_bench(flags, out, err);
    if (*scaling_cmd) return cmd_scaling(flags, out, err);
    if (*generate_cmd) return cmd_generate(flags, gen, out);
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace dcclust
