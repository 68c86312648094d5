#include "dcclust/bench.hpp"

#include "dcclust/clustering_model.hpp"
#include "dcclust/rng.hpp"
#include "dcclust/set_clustering_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

namespace dcclust {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Dca: return "dca";
    case Algorithm::Bdca: return "bdca";
    case Algorithm::BdcaAdaptive: return "bdca-adaptive";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "dca") return Algorithm::Dca;
  if (name == "bdca") return Algorithm::Bdca;
  if (name == "bdca-adaptive") return Algorithm::BdcaAdaptive;
  throw InputError("unknown algorithm '" + std::string(name) + "' (expected dca, bdca or bdca-adaptive)");
}

LineSearchParams SolverSettings::line_search(Algorithm a) const {
  LineSearchParams ls;
  ls.alpha = alpha;
  ls.beta = beta;
  if (a == Algorithm::BdcaAdaptive) {
    ls.trial = SelfAdaptiveTrial{gamma, lambda_bar_1};
  } else {
    ls.trial = ConstantTrial{lambda_bar};
  }
  return ls;
}

void SolverSettings::validate() const {
  schedule.validate();
  stop.validate();
  line_search(Algorithm::Bdca).validate();
  line_search(Algorithm::BdcaAdaptive).validate();
}

SolveReport solve(const DcProblem& problem, const Matrix& X0, Algorithm algorithm, const SolverSettings& settings,
                  const SolveOptions& options) {
  if (algorithm == Algorithm::Dca) return dca_solve(problem, X0, settings.schedule, settings.stop, options);
  return bdca_solve(problem, X0, settings.schedule, settings.line_search(algorithm), settings.stop, options);
}

Matrix sample_initial(const ConstraintSystem& constraints, Rng& rng) {
  Matrix X(constraints.centers(), constraints.dim());
  for (Eigen::Index l = 0; l < constraints.centers(); ++l) {
    const auto& sets = constraints[l];
    const auto it = std::find_if(sets.begin(), sets.end(), [](const ConvexSet& s) { return s.bounded(); });
    if (it == sets.end()) {
      throw UnsupportedSampling("center " + std::to_string(l) + " has no bounded constraint set to sample from");
    }
    X.row(l) = it->sample_uniform(rng).transpose();
  }
  return X;
}

std::uint64_t hash_matrix(const Matrix& X) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(X.data());
  const std::size_t n = static_cast<std::size_t>(X.size()) * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

void ExperimentSpec::validate() const {
  if (!problem) throw InputError("experiment: problem is not set");
  if (!constraints) throw InputError("experiment: constraints are not set");
  if (algorithms.empty()) throw InputError("experiment: no algorithms selected");
  if (restarts < 1) throw InputError("experiment: restarts must be at least 1");
  if (threads < 1) throw InputError("experiment: threads must be at least 1");
  if (warmup < 0) throw InputError("experiment: warmup must be nonnegative");
  const ProblemDims dims = problem->dims();
  if (dims.k != constraints->centers() || dims.d != constraints->dim())
    throw InputError("experiment: constraints do not match the problem dimensions");
  solver.validate();
}

bool ComparisonRow::ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const AlgorithmRun& r) { return r.ok; });
}

Stats summarize(std::vector<double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.median = s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

namespace {

AlgorithmRun run_one(const ExperimentSpec& spec, Algorithm algorithm, const Matrix& X0) {
  AlgorithmRun run;
  run.algorithm = algorithm;
  run.x0_hash = hash_matrix(X0);
  SolveOptions options;
  options.record_trace = false;
  try {
    const SolveReport report = solve(*spec.problem, X0, algorithm, spec.solver, options);
    run.ok = true;
    run.status = "ok";
    run.iterations = report.iterations_total;
    run.wall_time = report.wall_time;
    run.cost = report.cost;
    run.stages = static_cast<std::int64_t>(report.stage_taus.size());
    run.final_X = report.final_X;
  } catch (const NumericalFailure& e) {
    run.status = "numerical_failure";
    run.error = e.what();
    run.iterations = e.partial().iterations_total;
    run.wall_time = e.partial().wall_time;
    run.cost = std::numeric_limits<double>::quiet_NaN();
    run.stages = static_cast<std::int64_t>(e.partial().stage_taus.size());
  } catch (const std::exception& e) {
    run.error = e.what();
    run.cost = std::numeric_limits<double>::quiet_NaN();
  }
  return run;
}

ComparisonRow run_row(const ExperimentSpec& spec, int restart) {
  ComparisonRow row;
  row.restart = restart;
  row.seed = spec.base_seed + static_cast<std::uint64_t>(restart);
  Rng rng(row.seed);
  const Matrix X0 = sample_initial(*spec.constraints, rng);
  row.x0_hash = hash_matrix(X0);
  for (Algorithm a : spec.algorithms) {
    row.runs.push_back(run_one(spec, a, X0));
    if (row.runs.back().x0_hash != row.x0_hash) throw std::logic_error("bench: start point changed between algorithms");
  }

  const auto ref = std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::Dca);
  row.iteration_ratio.assign(spec.algorithms.size(), std::nullopt);
  row.time_ratio.assign(spec.algorithms.size(), std::nullopt);
  if (ref == spec.algorithms.end()) return row;
  const AlgorithmRun& base = row.runs[static_cast<std::size_t>(ref - spec.algorithms.begin())];
  if (!base.ok) return row;
  for (std::size_t j = 0; j < row.runs.size(); ++j) {
    const AlgorithmRun& r = row.runs[j];
    if (!r.ok || spec.algorithms[j] == Algorithm::Dca) continue;
    if (r.iterations > 0)
      row.iteration_ratio[j] = static_cast<double>(base.iterations) / static_cast<double>(r.iterations);
    if (r.wall_time > 0.0) row.time_ratio[j] = base.wall_time / r.wall_time;
  }
  return row;
}

nlohmann::json stats_json(const Stats& s) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"mean", num(s.mean)}, {"median", num(s.median)}, {"std", num(s.stddev)}, {"count", s.count}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.name = spec.name;
  result.algorithms = spec.algorithms;

  if (spec.warmup > 0) {
    Rng rng(spec.base_seed);
    const Matrix X0 = sample_initial(*spec.constraints, rng);
    for (int w = 0; w < spec.warmup; ++w)
      (void)run_one(spec, spec.algorithms[static_cast<std::size_t>(w) % spec.algorithms.size()], X0);
  }

  result.rows.resize(static_cast<std::size_t>(spec.restarts));
  const int workers = std::min(spec.threads, spec.restarts);
  if (workers <= 1) {
    for (int r = 0; r < spec.restarts; ++r) result.rows[static_cast<std::size_t>(r)] = run_row(spec, r);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int r = next++; r < spec.restarts; r = next++) {
          try {
            result.rows[static_cast<std::size_t>(r)] = run_row(spec, r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const ComparisonRow& a, const ComparisonRow& b) { return a.seed < b.seed; });

  const ProblemDims dims = spec.problem->dims();
  for (std::size_t j = 0; j < spec.algorithms.size(); ++j) {
    AlgorithmSummary s;
    s.algorithm = spec.algorithms[j];
    s.mean_X = Matrix::Zero(dims.k, dims.d);
    std::vector<double> iters, times, costs;
    for (const ComparisonRow& row : result.rows) {
      const AlgorithmRun& r = row.runs[j];
      if (!r.ok) {
        ++s.failures;
        continue;
      }
      iters.push_back(static_cast<double>(r.iterations));
      times.push_back(r.wall_time);
      costs.push_back(r.cost);
      s.mean_X += r.final_X;
    }
    if (!costs.empty()) s.mean_X /= static_cast<double>(costs.size());
    s.iterations = summarize(std::move(iters));
    s.wall_time = summarize(std::move(times));
    s.cost = summarize(std::move(costs));
    result.summaries.push_back(std::move(s));

    if (spec.algorithms[j] == Algorithm::Dca) continue;
    RatioSummary ratio;
    ratio.algorithm = spec.algorithms[j];
    ratio.column = j;
    std::vector<double> ir, tr;
    for (const ComparisonRow& row : result.rows) {
      if (row.iteration_ratio[j]) ir.push_back(*row.iteration_ratio[j]);
      if (row.time_ratio[j]) tr.push_back(*row.time_ratio[j]);
    }
    ratio.iteration_ratio = summarize(std::move(ir));
    ratio.time_ratio = summarize(std::move(tr));
    if (std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::Dca) != spec.algorithms.end())
      result.ratios.push_back(std::move(ratio));
  }
  result.failed_rows = static_cast<std::size_t>(
      std::count_if(result.rows.begin(), result.rows.end(), [](const ComparisonRow& r) { return !r.ok(); }));
  return result;
}

std::vector<BenchRecord> ExperimentResult::records() const {
  std::vector<BenchRecord> out;
  for (const ComparisonRow& row : rows) {
    for (const AlgorithmRun& r : row.runs) {
      BenchRecord rec;
      rec.run_id = name + "-" + std::to_string(row.restart);
      rec.seed = row.seed;
      rec.algorithm = to_string(r.algorithm);
      rec.iterations_total = r.iterations;
      rec.wall_time_s = r.wall_time;
      rec.final_cost = r.cost;
      rec.stages = r.stages;
      rec.status = r.status;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

nlohmann::json ExperimentResult::summary_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["restarts"] = rows.size();
  j["failed_rows"] = failed_rows;
  j["algorithms"] = nlohmann::json::array();
  for (const AlgorithmSummary& s : summaries) {
    nlohmann::json centers = nlohmann::json::array();
    for (Eigen::Index l = 0; l < s.mean_X.rows(); ++l) {
      std::vector<double> row(s.mean_X.cols());
      for (Eigen::Index c = 0; c < s.mean_X.cols(); ++c) row[static_cast<std::size_t>(c)] = s.mean_X(l, c);
      centers.push_back(row);
    }
    j["algorithms"].push_back({{"algorithm", to_string(s.algorithm)},
                               {"iterations", stats_json(s.iterations)},
                               {"wall_time_s", stats_json(s.wall_time)},
                               {"cost", stats_json(s.cost)},
                               {"mean_centers", centers},
                               {"failures", s.failures}});
  }
  j["ratios"] = nlohmann::json::array();
  for (const RatioSummary& r : ratios) {
    j["ratios"].push_back({{"pair", "dca/" + to_string(r.algorithm)},
                           {"iterations", stats_json(r.iteration_ratio)},
                           {"wall_time", stats_json(r.time_ratio)}});
  }
  return j;
}

// ---------------------------------------------------------------- scaling

ConstraintSystem clustering_scaling_constraints(Eigen::Index dim) {
  if (dim < 1) throw InputError("scaling: dimension must be positive");
  Vector c1(dim), c2(dim), c3 = Vector::Constant(dim, 8.0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    c1(i) = i % 2 ? 5.0 : 1.0;
    c2(i) = i % 2 ? 4.0 : 6.0;
  }
  return ConstraintSystem({{ConvexSet::ball(c1, 1.0)}, {ConvexSet::ball(c2, 1.0)}, {ConvexSet::ball(c3, 1.0)}}, dim);
}

ConstraintSystem set_scaling_constraints(Eigen::Index dim) {
  constexpr Eigen::Index kMax = 10;
  if (dim < 1 || dim > kMax) throw InputError("scaling: set clustering template supports dimensions 1 to 10");
  static const double pattern[6][kMax] = {
      {5, 4, 1, 2, 3, 1, 2, 3, 1, 2}, {4, 4, 1, 2, 3, 1, 2, 3, 1, 2}, {8, 5, 9, 8, 7, 9, 8, 7, 9, 8},
      {8, 4, 9, 8, 7, 9, 8, 7, 9, 8}, {9, 8, 1, 6, 9, 1, 6, 9, 1, 6}, {8, 8, 1, 6, 9, 1, 6, 9, 1, 6},
  };
  auto head = [dim](const double* v) { return Vector(Eigen::Map<const Vector>(v, dim)); };
  Vector a = Vector::Constant(dim, 5.0), b = Vector::Constant(dim, 5.0);
  a(0) = 1.0;
  b(0) = 2.0;
  if (dim > 1) {
    a(1) = 5.0;
    b(1) = 6.0;
  }
  std::vector<std::vector<ConvexSet>> sets;
  sets.push_back({ConvexSet::ball(a, 1.0), ConvexSet::ball(b, 1.0)});
  for (int c = 0; c < 3; ++c)
    sets.push_back({ConvexSet::ball(head(pattern[2 * c]), 1.0), ConvexSet::ball(head(pattern[2 * c + 1]), 1.0)});
  return ConstraintSystem(std::move(sets), dim);
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::shared_ptr<const DcProblem> make_scaling_problem(const ScalingSpec& spec, int dim, int n,
                                                      std::shared_ptr<const ConstraintSystem>& constraints) {
  RandomSpec rs;
  rs.n = n;
  rs.dim = dim;
  rs.low = spec.low;
  rs.high = spec.high;
  rs.seed = mix(spec.base_seed ^ mix(static_cast<std::uint64_t>(dim) << 32 | static_cast<std::uint32_t>(n)));
  const Dataset data = generate_uniform(rs);
  if (spec.problem == ScalingTemplate::Clustering) {
    constraints = std::make_shared<const ConstraintSystem>(clustering_scaling_constraints(dim));
    return std::make_shared<const ClusteringProblem>(data.points, *constraints);
  }
  if (!(spec.target_radius > 0.0)) throw InputError("scaling: target radius must be positive");
  constraints = std::make_shared<const ConstraintSystem>(set_scaling_constraints(dim));
  std::vector<ConvexSet> targets;
  targets.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < data.points.rows(); ++i)
    targets.push_back(ConvexSet::ball(data.points.row(i).transpose(), spec.target_radius));
  return std::make_shared<const SetClusteringProblem>(std::move(targets), *constraints);
}

std::vector<ScalingRow> run_scaling(const ScalingSpec& spec) {
  if (std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::Dca) == spec.algorithms.end())
    throw InputError("scaling: the algorithm list must include dca as the reference");
  if (spec.dims.empty() || spec.counts.empty()) throw InputError("scaling: dims and counts must be nonempty");
  std::vector<ScalingRow> out;
  bool warmed = false;
  for (int dim : spec.dims) {
    for (int n : spec.counts) {
      if (dim < 1 || n < 1) throw InputError("scaling: dims and counts must be positive");
      ExperimentSpec ex;
      ex.name = "scaling-d" + std::to_string(dim) + "-n" + std::to_string(n);
      ex.problem = make_scaling_problem(spec, dim, n, ex.constraints);
      ex.algorithms = spec.algorithms;
      ex.restarts = spec.restarts;
      ex.base_seed = spec.base_seed;
      ex.solver = spec.solver;
      ex.threads = spec.threads;
      ex.warmup = warmed ? 0 : spec.warmup;
      warmed = true;
      const ExperimentResult res = run_experiment(ex);
      const std::size_t ref = static_cast<std::size_t>(
          std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::Dca) - spec.algorithms.begin());
      for (const RatioSummary& ratio : res.ratios) {
        ScalingRow row;
        row.dim = dim;
        row.n = n;
        row.pair = "dca/" + to_string(ratio.algorithm);
        row.iteration_ratio = ratio.iteration_ratio;
        row.time_ratio = ratio.time_ratio;
        std::vector<double> rt, at, ri, ai;
        for (const ComparisonRow& cr : res.rows) {
          const AlgorithmRun& a = cr.runs[ref];
          const AlgorithmRun& b = cr.runs[ratio.column];
          if (!a.ok || !b.ok) {
            ++row.failures;
            continue;
          }
          ++row.successes;
          rt.push_back(a.wall_time);
          at.push_back(b.wall_time);
          ri.push_back(static_cast<double>(a.iterations));
          ai.push_back(static_cast<double>(b.iterations));
        }
        row.reference_time = summarize(std::move(rt));
        row.algorithm_time = summarize(std::move(at));
        row.reference_iterations = summarize(std::move(ri));
        row.algorithm_iterations = summarize(std::move(ai));
        out.push_back(std::move(row));
      }
    }
  }
  return out;
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "dim,n,pair,successes,failures,iter_ratio_mean,iter_ratio_median,iter_ratio_std,"
         "time_ratio_mean,time_ratio_median,time_ratio_std,ref_time_mean,alg_time_mean,"
         "ref_iters_mean,alg_iters_mean\n";
  for (const ScalingRow& r : rows) {
    out << r.dim << ',' << r.n << ',' << r.pair << ',' << r.successes << ',' << r.failures << ','
        << r.iteration_ratio.mean << ',' << r.iteration_ratio.median << ',' << r.iteration_ratio.stddev << ','
        << r.time_ratio.mean << ',' << r.time_ratio.median << ',' << r.time_ratio.stddev << ','
        << r.reference_time.mean << ',' << r.algorithm_time.mean << ',' << r.reference_iterations.mean << ','
        << r.algorithm_iterations.mean << '\n';
  }
  if (!out) throw InputError("write to " + path.string() + " failed");
}

}  // namespace dcclust
