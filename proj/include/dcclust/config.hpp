#pragma once

#include "dcclust/bench.hpp"
#include "dcclust/data_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dcclust {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : InputError(field + ": " + message), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class DatasetKind { Tsplib, CitiesCsv, PointsCsv, Random, Inline };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::Inline;
  std::filesystem::path path;  // resolved against the config file directory
  double radius_scale = 1.0;   // cities_csv
  RandomSpec random;           // random
  Dataset inline_data;         // inline
};

enum class ProblemKind { Clustering, SetClustering };

struct ProblemConfig {
  ProblemKind kind = ProblemKind::Clustering;
  int k = 0;
  // Set descriptors and start centers need the data dimension, so they are
  // kept as JSON here and checked by build_problem.
  nlohmann::json constraints = nlohmann::json::array();  // one list per center
  nlohmann::json initial_centers;                        // null or k rows
  double target_radius = 0.0;  // set clustering over point data: balls of this radius
};

struct BenchConfig {
  std::vector<Algorithm> algorithms{Algorithm::Dca, Algorithm::Bdca};
  int restarts = 100;
  std::uint64_t base_seed = 1;
  int warmup = 0;
};

struct OutputConfig {
  std::filesystem::path dir;
  std::string report_json = "report.json";
  std::string trace_csv = "trace.csv";
  std::string bench_csv = "bench.csv";
  std::string summary_json = "summary.json";
  std::string scaling_csv = "scaling.csv";
  std::string dataset_csv = "dataset.csv";
};

struct Config {
  std::string name = "run";
  std::optional<DatasetConfig> dataset;
  std::optional<ProblemConfig> problem;
  SolverSettings solver;
  Algorithm algorithm = Algorithm::Bdca;
  std::uint64_t seed = 1;
  BenchConfig bench;
  std::optional<ScalingSpec> scaling;
  OutputConfig output;
};

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`; unknown keys are rejected.
Config parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

/// Parses one set descriptor, e.g. {"kind": "ball", "center": [0, 0], "radius": 1}.
ConvexSet parse_set(const nlohmann::json& j, Eigen::Index dim, const std::string& field);

Dataset load_dataset(const DatasetConfig& cfg);

struct BuiltProblem {
  Dataset data;
  std::shared_ptr<const ConstraintSystem> constraints;
  std::shared_ptr<const DcProblem> problem;
  std::optional<Matrix> initial_centers;
};

/// Loads the dataset and assembles the model described by `cfg`.
BuiltProblem build_problem(const Config& cfg);

}  // namespace dcclust
