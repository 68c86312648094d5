#pragma once

#include "dcclust/constraint_system.hpp"
#include "dcclust/data_io.hpp"
#include "dcclust/dc_solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcclust {

enum class Algorithm { Dca, Bdca, BdcaAdaptive };

std::string to_string(Algorithm a);
/// "dca", "bdca" or "bdca-adaptive"; anything else is an InputError.
Algorithm parse_algorithm(std::string_view name);

/// Everything the three drivers need, with the experiment defaults.
struct SolverSettings {
  PenaltySchedule schedule;
  StopRule stop;
  double alpha = 0.05;
  double beta = 0.1;
  double lambda_bar = 2.0;    // constant trial step of plain BDCA
  double gamma = 2.0;         // self-adaptive growth factor
  double lambda_bar_1 = 2.0;  // self-adaptive first trial step

  LineSearchParams line_search(Algorithm a) const;
  void validate() const;
};

SolveReport solve(const DcProblem& problem, const Matrix& X0, Algorithm algorithm, const SolverSettings& settings,
                  const SolveOptions& options = {});

/// One start point: center l is drawn uniformly from the first bounded set
/// in its constraint list.
Matrix sample_initial(const ConstraintSystem& constraints, Rng& rng);

/// FNV-1a over the raw bytes of X, used to assert paired starts.
std::uint64_t hash_matrix(const Matrix& X);

struct ExperimentSpec {
  std::string name = "experiment";
  std::shared_ptr<const DcProblem> problem;
  std::shared_ptr<const ConstraintSystem> constraints;
  std::vector<Algorithm> algorithms{Algorithm::Dca, Algorithm::Bdca};
  int restarts = 100;
  std::uint64_t base_seed = 1;
  SolverSettings solver;
  int threads = 1;
  /// Untimed solves run before the timed rows.
  int warmup = 0;

  void validate() const;
};

struct AlgorithmRun {
  Algorithm algorithm = Algorithm::Dca;
  bool ok = false;
  std::string status = "error";  // "ok", "numerical_failure" or "error"
  std::string error;
  std::int64_t iterations = 0;
  double wall_time = 0.0;
  double cost = 0.0;
  std::int64_t stages = 0;
  Matrix final_X;
  std::uint64_t x0_hash = 0;
};

/// All algorithms of one restart, started from the same X0. Ratios are
/// DCA / algorithm and only present when the row has a DCA reference.
struct ComparisonRow {
  int restart = 0;
  std::uint64_t seed = 0;
  std::uint64_t x0_hash = 0;
  std::vector<AlgorithmRun> runs;  // parallel to ExperimentSpec::algorithms
  std::vector<std::optional<double>> iteration_ratio;
  std::vector<std::optional<double>> time_ratio;

  bool ok() const;
};

struct Stats {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t count = 0;
};

Stats summarize(std::vector<double> values);

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::Dca;
  Stats iterations;
  Stats wall_time;
  Stats cost;
  Matrix mean_X;
  std::size_t failures = 0;
};

struct RatioSummary {
  Algorithm algorithm = Algorithm::Bdca;
  std::size_t column = 0;
  Stats iteration_ratio;
  Stats time_ratio;
};

struct ExperimentResult {
  std::string name;
  std::vector<Algorithm> algorithms;
  std::vector<ComparisonRow> rows;  // sorted by seed
  std::vector<AlgorithmSummary> summaries;
  std::vector<RatioSummary> ratios;
  std::size_t failed_rows = 0;

  std::vector<BenchRecord> records() const;
  nlohmann::json summary_json() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// ---------------------------------------------------------------- scaling

enum class ScalingTemplate { Clustering, SetClustering };

/// Three radius-1 balls centred on the patterns [1,5,1,5,...], [6,4,6,4,...], [8,...,8].
ConstraintSystem clustering_scaling_constraints(Eigen::Index dim);
/// Four centers, each constrained to two radius-1 balls (dim <= 10).
ConstraintSystem set_scaling_constraints(Eigen::Index dim);

struct ScalingSpec {
  ScalingTemplate problem = ScalingTemplate::Clustering;
  std::vector<int> dims{2};
  std::vector<int> counts{1000};
  std::vector<Algorithm> algorithms{Algorithm::Dca, Algorithm::Bdca, Algorithm::BdcaAdaptive};
  int restarts = 100;
  std::uint64_t base_seed = 1;
  SolverSettings solver;
  double low = 0.0;
  double high = 10.0;
  double target_radius = 0.1;  // set clustering targets are balls of this radius
  int warmup = 3;
  int threads = 1;
};

struct ScalingRow {
  int dim = 0;
  int n = 0;
  std::string pair;  // e.g. "dca/bdca"
  std::size_t successes = 0;
  std::size_t failures = 0;
  Stats iteration_ratio;
  Stats time_ratio;
  Stats reference_time;
  Stats algorithm_time;
  Stats reference_iterations;
  Stats algorithm_iterations;
};

/// Builds the data set and problem of one grid cell.
std::shared_ptr<const DcProblem> make_scaling_problem(const ScalingSpec& spec, int dim, int n,
                                                      std::shared_ptr<const ConstraintSystem>& constraints);

std::vector<ScalingRow> run_scaling(const ScalingSpec& spec);
void write_scaling_csv(const std::vector<ScalingRow>& rows, const std::filesystem::path& path);

}  // namespace dcclust
