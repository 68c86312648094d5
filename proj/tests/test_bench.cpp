#include "dcclust/bench.hpp"
#include "dcclust/clustering_model.hpp"

#include "random_instances.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace dcclust;

namespace {

ExperimentSpec small_spec(std::uint64_t seed = 3) {
  Rng rng(seed);
  auto cs = std::make_shared<ConstraintSystem>(clustering_scaling_constraints(2));
  ExperimentSpec spec;
  spec.name = "small";
  spec.constraints = cs;
  spec.problem = std::make_shared<ClusteringProblem>(testgen::random_points(rng, 60, 2), *cs);
  spec.restarts = 6;
  return spec;
}

/// Fails numerically when started from one of the given points.
class Flaky : public DcProblem {
 public:
  Flaky(std::shared_ptr<const DcProblem> inner, std::set<std::uint64_t> bad)
      : inner_(std::move(inner)), bad_(std::move(bad)) {}
  double eval_penalized(const Matrix& X, double tau) const override { return inner_->eval_penalized(X, tau); }
  double eval_cost(const Matrix& X) const override { return inner_->eval_cost(X); }
  Matrix dca_point(const Matrix& X, double tau) const override {
    if (bad_.count(hash_matrix(X))) return Matrix::Constant(X.rows(), X.cols(), std::nan(""));
    return inner_->dca_point(X, tau);
  }
  ProblemDims dims() const override { return inner_->dims(); }

 private:
  std::shared_ptr<const DcProblem> inner_;
  std::set<std::uint64_t> bad_;
};

std::uint64_t start_hash(const ConstraintSystem& cs, std::uint64_t seed) {
  Rng rng(seed);
  return hash_matrix(sample_initial(cs, rng));
}

}  // namespace

TEST_CASE("algorithm names") {
  CHECK(parse_algorithm("dca") == Algorithm::Dca);
  CHECK(parse_algorithm("bdca") == Algorithm::Bdca);
  CHECK(parse_algorithm("bdca-adaptive") == Algorithm::BdcaAdaptive);
  CHECK(to_string(Algorithm::BdcaAdaptive) == "bdca-adaptive");
  CHECK_THROWS_AS(parse_algorithm("newton"), InputError);
}

TEST_CASE("summary statistics") {
  const Stats s = summarize({4.0, 1.0, 3.0, 2.0});
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.count == 4);
  CHECK(summarize({7.0}).stddev == 0.0);
  CHECK(summarize({3.0, 1.0, 2.0}).median == 2.0);
  CHECK(std::isnan(summarize({}).mean));
}

TEST_CASE("initial centers come from the first bounded set") {
  const Vector c{{-80.0, 38.0}};
  const ConstraintSystem cs({{ConvexSet::halfspace(Vector{{-1.0, 0.0}}, 75.0), ConvexSet::ball(c, 4.0)}}, 2);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Matrix X = sample_initial(cs, rng);
    CHECK((X.row(0).transpose() - c).norm() <= 4.0);
  }
  const ConstraintSystem open({{ConvexSet::halfspace(Vector{{1.0, 0.0}}, 0.0)}}, 2);
  CHECK_THROWS_AS(sample_initial(open, rng), UnsupportedSampling);
}

TEST_CASE("one restart of DCA alone has no ratios") {
  ExperimentSpec spec = small_spec();
  spec.restarts = 1;
  spec.algorithms = {Algorithm::Dca};
  const ExperimentResult r = run_experiment(spec);
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.rows[0].iteration_ratio[0].has_value());
  CHECK_FALSE(r.rows[0].time_ratio[0].has_value());
  CHECK(r.ratios.empty());
  CHECK(r.records().size() == 1);
}

TEST_CASE("an algorithm listed twice yields identical columns") {
  ExperimentSpec spec = small_spec();
  spec.algorithms = {Algorithm::Bdca, Algorithm::Bdca};
  const ExperimentResult r = run_experiment(spec);
  for (const ComparisonRow& row : r.rows) {
    CHECK(row.runs[0].iterations == row.runs[1].iterations);
    CHECK(row.runs[0].cost == row.runs[1].cost);
    CHECK(row.runs[0].final_X == row.runs[1].final_X);
  }
}

TEST_CASE("rows are paired, seeded by position and independent of threads") {
  ExperimentSpec spec = small_spec();
  spec.algorithms = {Algorithm::Dca, Algorithm::Bdca, Algorithm::BdcaAdaptive};
  spec.base_seed = 40;
  const ExperimentResult serial = run_experiment(spec);
  spec.threads = 3;
  const ExperimentResult parallel = run_experiment(spec);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    const ComparisonRow& a = serial.rows[i];
    const ComparisonRow& b = parallel.rows[i];
    CHECK(a.seed == 40 + i);
    CHECK(a.seed == b.seed);
    CHECK(a.x0_hash == b.x0_hash);
    for (std::size_t j = 0; j < a.runs.size(); ++j) {
      CHECK(a.runs[j].x0_hash == a.x0_hash);
      CHECK(a.runs[j].iterations == b.runs[j].iterations);
      CHECK(a.runs[j].final_X == b.runs[j].final_X);
    }
    CHECK(a.iteration_ratio == b.iteration_ratio);
    REQUIRE(a.iteration_ratio[1].has_value());
    CHECK(*a.iteration_ratio[1] > 0.0);
    CHECK(std::isfinite(*a.time_ratio[1]));
  }
  CHECK(serial.ratios.size() == 2);
  CHECK(serial.summaries.size() == 3);
  const auto recs = serial.records();
  CHECK(recs.size() == 18);
  CHECK(recs[0].run_id == "small-0");
  CHECK(recs[2].algorithm == "bdca-adaptive");
}

TEST_CASE("failed solves mark rows without aborting the sweep") {
  ExperimentSpec spec = small_spec();
  spec.restarts = 12;
  spec.base_seed = 10;
  spec.problem = std::make_shared<Flaky>(
      spec.problem, std::set<std::uint64_t>{start_hash(*spec.constraints, 12), start_hash(*spec.constraints, 17)});
  const ExperimentResult r = run_experiment(spec);
  CHECK(r.rows.size() == 12);
  CHECK(r.failed_rows == 2);
  CHECK_FALSE(r.rows[2].ok());
  CHECK(r.rows[2].runs[0].status == "numerical_failure");
  CHECK_FALSE(r.rows[2].iteration_ratio[1].has_value());
  CHECK(r.rows[3].ok());
  std::size_t failed_records = 0;
  for (const BenchRecord& rec : r.records()) failed_records += rec.status == "numerical_failure";
  CHECK(failed_records == 2 * r.failed_rows);
  CHECK(r.ratios[0].iteration_ratio.count == 12 - r.failed_rows);
  CHECK(r.summaries[0].failures == r.failed_rows);
  const nlohmann::json j = r.summary_json();
  CHECK(j["failed_rows"] == r.failed_rows);
}

TEST_CASE("experiment validation") {
  ExperimentSpec spec = small_spec();
  spec.restarts = 0;
  CHECK_THROWS_AS(run_experiment(spec), InputError);
  spec = small_spec();
  spec.algorithms.clear();
  CHECK_THROWS_AS(run_experiment(spec), InputError);
  spec = small_spec();
  spec.constraints = std::make_shared<ConstraintSystem>(clustering_scaling_constraints(3));
  CHECK_THROWS_AS(run_experiment(spec), InputError);
}

TEST_CASE("scaling templates") {
  const ConstraintSystem c2 = clustering_scaling_constraints(2);
  REQUIRE(c2.centers() == 3);
  auto centre = [](const ConvexSet& s) { return std::get<Ball>(s.shape()).center; };
  CHECK(centre(c2[0][0]) == Vector{{1.0, 5.0}});
  CHECK(centre(c2[1][0]) == Vector{{6.0, 4.0}});
  CHECK(centre(c2[2][0]) == Vector{{8.0, 8.0}});
  CHECK(std::get<Ball>(c2[0][0].shape()).radius == 1.0);
  CHECK(centre(clustering_scaling_constraints(5)[0][0]) == Vector{{1.0, 5.0, 1.0, 5.0, 1.0}});

  const ConstraintSystem s2 = set_scaling_constraints(2);
  REQUIRE(s2.centers() == 4);
  CHECK(s2.per_center() == 2);
  CHECK(centre(s2[0][0]) == Vector{{1.0, 5.0}});
  CHECK(centre(s2[0][1]) == Vector{{2.0, 6.0}});
  CHECK(centre(set_scaling_constraints(4)[0][1]) == Vector{{2.0, 6.0, 5.0, 5.0}});
  const ConstraintSystem s10 = set_scaling_constraints(10);
  CHECK(centre(s10[1][0]) == Vector{{5, 4, 1, 2, 3, 1, 2, 3, 1, 2}});
  CHECK(centre(s10[3][1]) == Vector{{8, 8, 1, 6, 9, 1, 6, 9, 1, 6}});
  CHECK_THROWS_AS(set_scaling_constraints(11), InputError);
}

TEST_CASE("scaling sweep emits one row per cell and pair") {
  ScalingSpec spec;
  spec.problem = ScalingTemplate::SetClustering;
  spec.dims = {2, 3};
  spec.counts = {30};
  spec.restarts = 3;
  spec.warmup = 1;
  const std::vector<ScalingRow> rows = run_scaling(spec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].dim == 2);
  CHECK(rows[0].pair == "dca/bdca");
  CHECK(rows[1].pair == "dca/bdca-adaptive");
  CHECK(rows[2].dim == 3);
  for (const ScalingRow& r : rows) {
    CHECK(r.successes == 3);
    CHECK(r.iteration_ratio.median > 0.0);
  }
  spec.algorithms = {Algorithm::Bdca};
  CHECK_THROWS_AS(run_scaling(spec), InputError);
}

TEST_CASE("matrix hash tells matrices apart") {
  Matrix a = Matrix::Zero(2, 2);
  Matrix b = a;
  CHECK(hash_matrix(a) == hash_matrix(b));
  b(1, 1) = 1e-300;
  CHECK(hash_matrix(a) != hash_matrix(b));
}
