// Acceptance suite: one PASS/FAIL line per requirement, nonzero exit if any fails.

#include "dcclust/bench.hpp"
#include "dcclust/clustering_model.hpp"
#include "dcclust/config.hpp"
#include "dcclust/set_clustering_model.hpp"

#include "oracles.hpp"
#include "random_instances.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

using namespace dcclust;

namespace {

const std::filesystem::path kSource = DCCLUST_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [miss: " << what << "]";
    }
  }
};

using Check = std::function<void(Outcome&)>;

int g_failures = 0;

void criterion(const std::string& name, const Check& check) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    check(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

ExperimentSpec experiment_from(const std::string& config) {
  const Config cfg = load_config(kSource / "configs" / config);
  const BuiltProblem built = build_problem(cfg);
  ExperimentSpec spec;
  spec.name = cfg.name;
  spec.problem = built.problem;
  spec.constraints = built.constraints;
  spec.algorithms = cfg.bench.algorithms;
  spec.restarts = cfg.bench.restarts;
  spec.base_seed = cfg.bench.base_seed;
  spec.solver = cfg.solver;
  spec.threads = threads();
  return spec;
}

double elapsed(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ reproduction

void eil76(Outcome& o) {
  ExperimentSpec spec = experiment_from("eil76.json");
  o.require(spec.restarts == 100, "100 restarts");
  ExperimentResult r;
  const double secs = elapsed([&] { r = run_experiment(spec); });
  o.require(r.failed_rows == 0, "no failed rows");
  const Vector c1{{26.6996, 57.9713}}, c2{{41.0691, 23.4880}};
  for (const AlgorithmSummary& s : r.summaries) {
    const std::string a = to_string(s.algorithm);
    o.detail << ' ' << a << " mean cost " << fmt(s.cost.mean, 3) << " centers (" << fmt(s.mean_X(0, 0), 4) << ", "
             << fmt(s.mean_X(0, 1), 4) << ") (" << fmt(s.mean_X(1, 0), 4) << ", " << fmt(s.mean_X(1, 1), 4) << ");";
    o.require(std::abs(s.cost.mean - 33576.253) <= 0.01, a + " cost within 0.01");
    const double dev = std::max((s.mean_X.row(0).transpose() - c1).cwiseAbs().maxCoeff(),
                                (s.mean_X.row(1).transpose() - c2).cwiseAbs().maxCoeff());
    o.require(dev <= 0.005, a + " centers within 0.005");
  }
  o.detail << " runtime " << fmt(secs, 2) << " s";
  o.require(secs < 5.0, "runtime under 5 s");
}

void cities50(Outcome& o) {
  ExperimentSpec spec = experiment_from("cities50.json");
  o.require(spec.algorithms.size() == 3, "all three algorithms");
  ExperimentResult r;
  const double secs = elapsed([&] { r = run_experiment(spec); });
  o.require(r.failed_rows == 0, "no failed rows");
  for (const AlgorithmSummary& s : r.summaries) {
    const std::string a = to_string(s.algorithm);
    o.detail << ' ' << a << " mean cost " << fmt(s.cost.mean, 3) << ';';
    o.require(std::abs(s.cost.mean - 2271.07) <= 1.0, a + " cost within 1.0 of 2271.07");
  }
  o.detail << " runtime " << fmt(secs, 2) << " s";
  o.require(secs < 30.0, "runtime under 30 s");
}

void ratio_cell(Outcome& o) {
  ScalingSpec spec;
  spec.problem = ScalingTemplate::Clustering;
  spec.dims = {2};
  spec.counts = {1000};
  spec.restarts = 100;
  spec.threads = threads();
  const std::vector<ScalingRow> rows = run_scaling(spec);
  o.require(rows.size() == 2, "two ratio rows");
  if (rows.size() != 2) return;
  const ScalingRow& plain = rows[0];
  const ScalingRow& adaptive = rows[1];
  for (const ScalingRow& r : rows) {
    o.detail << ' ' << r.pair << " iteration ratio median " << fmt(r.iteration_ratio.median, 3) << " (time ratio median "
             << fmt(r.time_ratio.median, 3) << ", " << r.failures << " failures);";
    o.require(r.failures == 0, r.pair + " without failures");
  }
  o.require(plain.iteration_ratio.median >= 2.0, "dca/bdca median >= 2");
  o.require(adaptive.iteration_ratio.median >= plain.iteration_ratio.median, "adaptive median >= plain median");
}

// ------------------------------------------------------------------ solver properties

const SolverSettings kSettings{};

SolveReport run(const DcProblem& p, const Matrix& X0, Algorithm a, const SolverSettings& s = kSettings) {
  return solve(p, X0, a, s);
}

void monotone_descent(Outcome& o) {
  Rng rng(2024);
  std::size_t solves = 0, violations = 0;
  for (bool set_model : {false, true}) {
    for (int t = 0; t < 200; ++t) {
      const testgen::Instance inst = testgen::random_instance(rng, set_model);
      const ProblemDims d = inst.problem->dims();
      const Matrix X0 = testgen::random_centers(rng, static_cast<int>(d.k), d.d);
      for (Algorithm a : {Algorithm::Dca, Algorithm::Bdca}) {
        const std::vector<DescentViolation> v = check_descent(run(*inst.problem, X0, a));
        ++solves;
        if (!v.empty()) {
          ++violations;
          if (violations == 1) o.detail << " first violation: " << v.front().message << ';';
        }
      }
    }
  }
  o.detail << ' ' << solves << " solves, " << violations << " with violations";
  o.require(violations == 0, "no descent violations");
}

/// Records every point at which the DCA map is evaluated.
class Recording : public DcProblem {
 public:
  explicit Recording(const DcProblem& inner) : inner_(inner) {}
  double eval_penalized(const Matrix& X, double tau) const override { return inner_.eval_penalized(X, tau); }
  double eval_cost(const Matrix& X) const override { return inner_.eval_cost(X); }
  Matrix dca_point(const Matrix& X, double tau) const override {
    std::lock_guard lock(mutex_);
    calls_.emplace_back(X, tau);
    return inner_.dca_point(X, tau);
  }
  ProblemDims dims() const override { return inner_.dims(); }
  const std::vector<std::pair<Matrix, double>>& calls() const { return calls_; }

 private:
  const DcProblem& inner_;
  mutable std::mutex mutex_;
  mutable std::vector<std::pair<Matrix, double>> calls_;
};

void zero_trial_step(Outcome& o) {
  Rng rng(77);
  SolverSettings zero;
  zero.lambda_bar = 0.0;
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const testgen::Instance inst = testgen::random_instance(rng, t % 2 == 1);
    const ProblemDims d = inst.problem->dims();
    const Matrix X0 = testgen::random_centers(rng, static_cast<int>(d.k), d.d);
    Recording a(*inst.problem), b(*inst.problem);
    const SolveReport ra = run(a, X0, Algorithm::Dca);
    const SolveReport rb = run(b, X0, Algorithm::Bdca, zero);
    bool same = a.calls().size() == b.calls().size() && ra.final_X == rb.final_X;
    for (std::size_t i = 0; same && i < a.calls().size(); ++i)
      same = a.calls()[i].first == b.calls()[i].first && a.calls()[i].second == b.calls()[i].second;
    mismatches += !same;
  }
  o.detail << " 50 instances, " << mismatches << " with differing iterate sequences";
  o.require(mismatches == 0, "identical iterates");
}

template <class Model>
double subproblem_error(const DcProblem& p, const Model& ref, const Matrix& X, double tau) {
  const Matrix Y = oracle::gradient([&](const Matrix& Z) { return ref.h(Z, tau); }, X, 1e-5);
  const Matrix Xs =
      oracle::newton_minimize([&](const Matrix& Z) { return ref.g(Z, tau) - (Y.array() * Z.array()).sum(); }, X);
  return (p.dca_point(X, tau) - Xs).cwiseAbs().maxCoeff();
}

void subproblem_oracle(Outcome& o) {
  Rng rng(99);
  for (bool set_model : {false, true}) {
    int done = 0;
    double worst = 0.0;
    while (done < 50) {
      const int m = testgen::uniform_int(rng, 1, 6);
      const int k = testgen::uniform_int(rng, 1, 2);
      std::vector<std::vector<ConvexSet>> per;
      for (int l = 0; l < k; ++l) per.push_back({testgen::random_set(rng, 2)});
      const ConstraintSystem cs(std::move(per), 2);
      const Matrix X = testgen::random_centers(rng, k, 2);
      const double tau = rng.uniform(0.5, 20.0);
      std::vector<std::vector<double>> dist(static_cast<std::size_t>(m));
      double err = 0.0;
      if (set_model) {
        const std::vector<ConvexSet> targets = testgen::random_targets(rng, m, 2);
        for (int i = 0; i < m; ++i)
          for (int l = 0; l < k; ++l) dist[i].push_back(oracle::dist_sq(targets[i], X.row(l).transpose()));
        if (oracle::assignment_gap(dist) < 1e-3) continue;
        err = subproblem_error(SetClusteringProblem(targets, cs), oracle::SetModel{targets, &cs}, X, tau);
      } else {
        const Matrix A = testgen::random_points(rng, m, 2);
        for (int i = 0; i < m; ++i)
          for (int l = 0; l < k; ++l) dist[i].push_back((X.row(l) - A.row(i)).squaredNorm());
        if (oracle::assignment_gap(dist) < 1e-3) continue;
        err = subproblem_error(ClusteringProblem(A, cs), oracle::PointModel{A, &cs}, X, tau);
      }
      worst = std::max(worst, err);
      ++done;
    }
    const std::string model = set_model ? "set clustering" : "clustering";
    o.detail << ' ' << model << " worst deviation " << worst << ';';
    o.require(worst <= 1e-6, model + " within 1e-6");
  }
}

void analytic_identities(Outcome& o) {
  Rng rng(5);
  double dc = 0.0, grad = 0.0, phi = 0.0, proj = 0.0;
  for (int t = 0; t < 200; ++t) {
    const bool set_model = t % 2 == 1;
    const testgen::Instance inst = testgen::random_instance(rng, set_model);
    const ProblemDims d = inst.problem->dims();
    const Matrix X = testgen::random_centers(rng, static_cast<int>(d.k), d.d);
    const double tau = std::pow(10.0, rng.uniform(-1.0, 4.0));
    DcComponents gh;
    Matrix G;
    std::function<double(const Matrix&)> g;
    if (set_model) {
      const auto& p = static_cast<const SetClusteringProblem&>(*inst.problem);
      gh = p.eval_g_h(X, tau);
      G = p.grad_g(X, tau);
      g = [&p, tau](const Matrix& Y) { return p.eval_g_h(Y, tau).g; };
    } else {
      const auto& p = static_cast<const ClusteringProblem&>(*inst.problem);
      gh = p.eval_g_h(X, tau);
      G = p.grad_g(X, tau);
      g = [&p, tau](const Matrix& Y) { return p.eval_g_h(Y, tau).g; };
    }
    const double f = inst.problem->eval_penalized(X, tau);
    dc = std::max(dc, std::abs(gh.g - gh.h - f) / std::max(1.0, std::abs(f)));
    const Matrix fd = oracle::gradient(g, X, 1e-4);
    grad = std::max(grad, (fd - G).cwiseAbs().maxCoeff() / std::max(1.0, G.cwiseAbs().maxCoeff()));
  }
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index d = testgen::uniform_int(rng, 1, 3);
    const ConvexSet s = testgen::random_set(rng, d);
    const Vector x = testgen::uniform_vector(rng, d, -5.0, 15.0);
    phi = std::max(phi, std::abs(x.squaredNorm() - s.phi(x) - s.dist_sq(x)) / std::max(1.0, x.squaredNorm()));
    // variational inequality <x - P(x), z - P(x)> <= 0 over feasible z
    const Vector p = s.project(x);
    for (int j = 0; j < 200; ++j) {
      const Vector z = s.project(testgen::uniform_vector(rng, d, -20.0, 30.0));
      const double scale = std::max(1.0, (x - p).norm() * (z - p).norm());
      proj = std::max(proj, (x - p).dot(z - p) / scale);
    }
  }
  o.detail << " DC identity " << dc << ", gradient " << grad << ", phi identity " << phi << ", projection "
           << proj << " (200 cases each)";
  o.require(dc <= 1e-8, "DC identity");
  o.require(grad <= 1e-5, "gradient of g");
  o.require(phi <= 1e-10, "phi identity");
  o.require(proj <= 1e-12, "projection optimality");
}

void penalty_stages(Outcome& o) {
  const std::vector<double> taus = PenaltySchedule{}.stages();
  const ConstraintSystem cs({{ConvexSet::ball(Vector{{0.0, 0.0}}, 1.0)}}, 2);
  const ClusteringProblem p(Matrix::Constant(1, 2, 3.0), cs);
  bool exact = taus.size() == 8;
  for (Algorithm a : {Algorithm::Dca, Algorithm::Bdca, Algorithm::BdcaAdaptive}) {
    const SolveReport r = run(p, Matrix::Zero(1, 2), a);
    exact = exact && r.stage_taus == taus && r.iterations_per_stage.size() == 8;
  }
  for (std::size_t l = 0; exact && l < taus.size(); ++l) exact = taus[l] == std::pow(10.0, static_cast<double>(l));
  o.detail << ' ' << taus.size() << " stages, tau from " << taus.front() << " to " << taus.back();
  o.require(exact, "eight stages at tau = 1, 10, ..., 1e7");
}

}  // namespace

int main() {
  criterion("eil76 reproduction", eil76);
  criterion("50-city set clustering reproduction", cities50);
  criterion("iteration ratio at m=2, n=1000", ratio_cell);
  criterion("monotone descent", monotone_descent);
  criterion("zero trial step reduces BDCA to DCA", zero_trial_step);
  criterion("DCA subproblem against a numerical minimizer", subproblem_oracle);
  criterion("analytic identities", analytic_identities);
  criterion("penalty schedule", penalty_stages);
  std::printf("%d failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
