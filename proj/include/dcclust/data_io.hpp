#pragma once

#include "dcclust/convex_set.hpp"
#include "dcclust/dc_solver.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dcclust {

/// Point data (rows of `points`) or, when `sets` is nonempty, target sets
/// whose reference points (ball centers) are mirrored in `points`.
struct Dataset {
  Matrix points;
  std::vector<ConvexSet> sets;
  std::vector<std::string> labels;
  std::string source;

  bool is_sets() const noexcept { return !sets.empty(); }
  Eigen::Index size() const noexcept { return points.rows(); }
  Eigen::Index dim() const noexcept { return points.cols(); }
};

struct RandomSpec {
  std::int64_t n = 0;
  std::int64_t dim = 2;
  double low = 0.0;
  double high = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// TSPLIB subset: KEY : VALUE headers, NODE_COORD_SECTION of "index x y"
/// lines, optional EOF. Node index i lands in row i - 1.
Dataset load_tsplib(const std::filesystem::path& path);
Dataset parse_tsplib(std::istream& in, const std::string& source);

/// CSV with header columns name, longitude, latitude, area_sq_miles (any
/// order, extra columns ignored). City i becomes Ball((lon, lat),
/// radius_scale * sqrt(area / pi)).
Dataset load_cities_csv(const std::filesystem::path& path, double radius_scale);
Dataset parse_cities_csv(std::istream& in, const std::string& source, double radius_scale);

/// Plain numeric CSV, one point per row, with a header line.
Dataset load_points_csv(const std::filesystem::path& path);
void write_points_csv(const Dataset& data, const std::filesystem::path& path);

/// n x dim matrix, entries uniform on [low, high), deterministic per seed.
Dataset generate_uniform(const RandomSpec& spec);

/// One row of the benchmark table.
struct BenchRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::int64_t iterations_total = 0;
  double wall_time_s = 0.0;
  double final_cost = 0.0;
  std::int64_t stages = 0;
  std::string status = "ok";

  bool operator==(const BenchRecord&) const = default;
};

/// Columns: run_id, seed, algorithm, iterations_total, wall_time_s,
/// final_cost, stages, status. Doubles carry 17 significant digits.
void write_bench_csv(const std::vector<BenchRecord>& rows, const std::filesystem::path& path);
std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path);

/// Full solve report as JSON (final X, cost, per-stage data, trace).
void write_report_json(const SolveReport& report, const std::filesystem::path& path,
                       const std::string& algorithm = {});
/// Trace rows as CSV: stage, iteration, tau, f, f_dca, lambda, lambda_bar, d_norm_sq, backtracks.
void write_trace_csv(const SolveReport& report, const std::filesystem::path& path);

/// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Locale-independent strict double parse of a whole field.
bool parse_double(const std::string& text, double& out);

}  // namespace dcclust
