#include "dcclust/dc_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace dcclust {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_start(const DcProblem& problem, const Matrix& X0) {
  const ProblemDims dims = problem.dims();
  if (X0.rows() != dims.k || X0.cols() != dims.d) {
    std::ostringstream os;
    os << "initial matrix is " << X0.rows() << "x" << X0.cols() << ", problem expects " << dims.k << "x" << dims.d;
    throw InputError(os.str());
  }
  if (!X0.allFinite()) throw InputError("initial matrix has non-finite entries");
}

/// Shared bookkeeping of both drivers: the stage loop, caps, the trace.
class Run {
 public:
  Run(const DcProblem& problem, const Matrix& X0, const StopRule& stop, const SolveOptions& options)
      : problem_(problem), stop_(stop), options_(options), start_(Clock::now()) {
    report_.final_X = X0;
  }

  SolveReport& report() { return report_; }
  Matrix& X() { return report_.final_X; }
  bool tracing() const { return options_.record_trace; }
  std::int64_t iterations() const { return report_.iterations_total; }

  double eval(const Matrix& X, double tau) {
    const double f = problem_.eval_penalized(X, tau);
    if (!std::isfinite(f)) fail("non-finite penalized objective at iteration " + std::to_string(iterations()));
    return f;
  }

  void require_finite(const Matrix& Y) {
    if (!Y.allFinite()) fail("non-finite iterate at iteration " + std::to_string(iterations()));
  }

  [[noreturn]] void fail(const std::string& what) {
    finish_clock();
    throw NumericalFailure(what, report_);
  }

  void begin_stage(int stage, double tau) {
    stage_ = stage;
    tau_ = tau;
    inner_ = 0;
    report_.stage_taus.push_back(tau);
    if (tracing()) {
      TraceEntry e;
      e.stage = stage;
      e.iteration = iterations();
      e.tau = tau;
      e.f = eval(X(), tau);
      e.f_dca = e.f;
      e.lambda = kNaN;
      e.lambda_bar = kNaN;
      e.stage_start = true;
      report_.objective_trace.push_back(e);
    }
  }

  /// False once either cap is reached; otherwise counts one iteration.
  bool next_iteration() {
    if (inner_ >= stop_.max_inner_iters || report_.iterations_total >= stop_.max_total_iters) return false;
    ++inner_;
    ++report_.iterations_total;
    return true;
  }

  void record(TraceEntry e) {
    if (!tracing()) return;
    e.stage = stage_;
    e.iteration = iterations();
    e.tau = tau_;
    report_.objective_trace.push_back(e);
  }

  void end_stage(Termination t) {
    report_.iterations_per_stage.push_back(inner_);
    report_.stage_terminations.push_back(t);
  }

  bool total_cap_reached() const { return report_.iterations_total >= stop_.max_total_iters; }

  SolveReport finish() {
    report_.cost = problem_.eval_cost(report_.final_X);
    report_.termination = Termination::StepTolerance;
    for (Termination t : report_.stage_terminations) {
      if (t == Termination::IterationCap) {
        report_.termination = t;
        break;
      }
      report_.termination = t;
    }
    finish_clock();
    return std::move(report_);
  }

 private:
  void finish_clock() { report_.wall_time = std::chrono::duration<double>(Clock::now() - start_).count(); }

  const DcProblem& problem_;
  const StopRule& stop_;
  const SolveOptions& options_;
  Clock::time_point start_;
  SolveReport report_;
  int stage_ = 0;
  double tau_ = 0.0;
  std::int64_t inner_ = 0;
};

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::StepTolerance:
      return "step_tolerance";
    case Termination::ZeroDirection:
      return "zero_direction";
    case Termination::IterationCap:
      return "iteration_cap";
  }
  return "unknown";
}

void LineSearchParams::validate() const {
  if (!(alpha > 0.0)) throw InputError("line search: alpha must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("line search: beta must lie in (0, 1)");
  if (const auto* c = std::get_if<ConstantTrial>(&trial)) {
    if (!(c->lambda_bar >= 0.0) || !std::isfinite(c->lambda_bar))
      throw InputError("line search: constant trial step must be finite and nonnegative");
  } else {
    const auto& a = std::get<SelfAdaptiveTrial>(trial);
    if (!(a.gamma > 1.0)) throw InputError("line search: gamma must exceed 1");
    if (!(a.lambda_bar_1 > 0.0) || !std::isfinite(a.lambda_bar_1))
      throw InputError("line search: initial trial step must be positive");
  }
}

void PenaltySchedule::validate() const {
  if (!(tau0 > 0.0)) throw InputError("penalty schedule: tau0 must be positive");
  if (!(sigma > 1.0)) throw InputError("penalty schedule: sigma must exceed 1");
  if (!(tau_f >= tau0) || !std::isfinite(tau_f)) throw InputError("penalty schedule: tau_f must be finite and >= tau0");
}

std::vector<double> PenaltySchedule::stages() const {
  validate();
  std::vector<double> taus;
  for (double tau = tau0; tau < tau_f; tau *= sigma) taus.push_back(tau);
  return taus;
}

void StopRule::validate() const {
  if (!(tol > 0.0)) throw InputError("stop rule: tol must be positive");
  if (max_inner_iters <= 0 || max_total_iters <= 0) throw InputError("stop rule: iteration caps must be positive");
}

SolveReport dca_solve(const DcProblem& problem, const Matrix& X0, const PenaltySchedule& schedule,
                      const StopRule& stop, const SolveOptions& options) {
  check_start(problem, X0);
  const std::vector<double> taus = schedule.stages();
  stop.validate();

  Run run(problem, X0, stop, options);
  for (std::size_t s = 0; s < taus.size(); ++s) {
    const double tau = taus[s];
    run.begin_stage(static_cast<int>(s), tau);
    Termination term = Termination::IterationCap;
    while (run.next_iteration()) {
      Matrix Y = problem.dca_point(run.X(), tau);
      run.require_finite(Y);
      const double step_sq = (Y - run.X()).squaredNorm();
      if (run.tracing()) {
        TraceEntry e;
        e.f = run.eval(Y, tau);
        e.f_dca = e.f;
        e.d_norm_sq = step_sq;
        run.record(e);
      }
      run.X() = std::move(Y);
      if (std::sqrt(step_sq) < stop.tol) {
        term = Termination::StepTolerance;
        break;
      }
    }
    run.end_stage(term);
    if (term == Termination::IterationCap && run.total_cap_reached()) break;
  }
  return run.finish();
}

double next_trial_step(const StepRecord& older, const StepRecord& previous, double gamma, double lambda_bar_1,
                       std::int64_t k) {
  if (k < 1) throw InputError("next_trial_step: iteration index must be >= 1");
  if (k == 1) return lambda_bar_1;
  const bool two_full_steps = older.lambda == older.lambda_bar && previous.lambda == previous.lambda_bar;
  return two_full_steps ? gamma * previous.lambda : previous.lambda;
}

SolveReport bdca_solve(const DcProblem& problem, const Matrix& X0, const PenaltySchedule& schedule,
                       const LineSearchParams& ls, const StopRule& stop, const SolveOptions& options) {
  check_start(problem, X0);
  const std::vector<double> taus = schedule.stages();
  ls.validate();
  stop.validate();

  Run run(problem, X0, stop, options);
  run.report().alpha = ls.alpha;
  for (std::size_t s = 0; s < taus.size(); ++s) {
    const double tau = taus[s];
    run.begin_stage(static_cast<int>(s), tau);
    Termination term = Termination::IterationCap;
    // The adaptive history restarts with every penalty stage.
    StepRecord older{}, previous{};
    std::int64_t k = 0;
    while (run.next_iteration()) {
      ++k;
      Matrix Y = problem.dca_point(run.X(), tau);
      run.require_finite(Y);
      const Matrix D = Y - run.X();
      const double d_norm_sq = D.squaredNorm();

      if (std::sqrt(d_norm_sq) < kZeroDirection) {
        TraceEntry e;
        if (run.tracing()) e.f = e.f_dca = run.eval(Y, tau);
        e.d_norm_sq = d_norm_sq;
        run.record(e);
        run.X() = std::move(Y);
        term = Termination::ZeroDirection;
        break;
      }

      double lambda_bar = 0.0;
      if (const auto* c = std::get_if<ConstantTrial>(&ls.trial)) {
        lambda_bar = c->lambda_bar;
      } else {
        const auto& a = std::get<SelfAdaptiveTrial>(ls.trial);
        lambda_bar = next_trial_step(older, previous, a.gamma, a.lambda_bar_1, k);
      }

      const double f_y = run.eval(Y, tau);
      double lambda = lambda_bar;
      double f_new = f_y;
      int backtracks = 0;
      Matrix X_next;
      if (lambda > 0.0) {
        while (true) {
          Matrix trial = Y + lambda * D;
          const double f_trial = problem.eval_penalized(trial, tau);
          if (std::isfinite(f_trial) && f_trial <= f_y - ls.alpha * lambda * lambda * d_norm_sq) {
            X_next = std::move(trial);
            f_new = f_trial;
            break;
          }
          lambda *= ls.beta;
          ++backtracks;
          if (lambda < kLambdaFloor) {
            lambda = 0.0;
            break;
          }
        }
      }
      // lambda == 0 takes y itself, so the iterate matches plain DCA bit for bit.
      if (lambda == 0.0) X_next = Y;

      older = previous;
      previous = StepRecord{lambda_bar, lambda};

      const double step = (X_next - run.X()).norm();
      TraceEntry e;
      e.f = f_new;
      e.f_dca = f_y;
      e.lambda = lambda;
      e.lambda_bar = lambda_bar;
      e.d_norm_sq = d_norm_sq;
      e.backtracks = backtracks;
      run.record(e);
      run.X() = std::move(X_next);
      if (step < stop.tol) {
        term = Termination::StepTolerance;
        break;
      }
    }
    run.end_stage(term);
    if (term == Termination::IterationCap && run.total_cap_reached()) break;
  }
  return run.finish();
}

std::vector<DescentViolation> check_descent(const SolveReport& report, double rel_tol) {
  std::vector<DescentViolation> out;
  const auto slack = [rel_tol](double ref) { return rel_tol * std::max(std::abs(ref), 1.0); };
  double prev = 0.0;
  int stage = -1;
  for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
    const TraceEntry& e = report.objective_trace[i];
    if (e.stage_start || e.stage != stage) {
      stage = e.stage;
      prev = e.f;
      if (e.stage_start) continue;
    }
    std::ostringstream os;
    os.precision(17);
    if (!std::isfinite(e.f)) {
      os << "non-finite objective at iteration " << e.iteration;
      out.push_back({i, os.str()});
      continue;
    }
    if (e.f > prev + slack(prev)) {
      os << "objective increased at iteration " << e.iteration << " (stage " << e.stage << "): " << prev << " -> "
         << e.f;
      out.push_back({i, os.str()});
    } else if (e.f_dca > prev + slack(prev)) {
      os << "DCA point worse than previous iterate at iteration " << e.iteration << ": " << prev << " -> " << e.f_dca;
      out.push_back({i, os.str()});
    } else if (e.lambda > 0.0 && e.f > e.f_dca - report.alpha * e.lambda * e.lambda * e.d_norm_sq + slack(e.f_dca)) {
      os << "accepted step " << e.lambda << " violates the Armijo condition at iteration " << e.iteration;
      out.push_back({i, os.str()});
    }
    prev = e.f;
  }
  return out;
}

}  // namespace dcclust
