#pragma once

#include "dcclust/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dcclust {

struct ProblemDims {
  Eigen::Index m = 0;  // data points / target sets
  Eigen::Index k = 0;  // centers
  Eigen::Index d = 0;  // ambient dimension
  Eigen::Index q = 0;  // constraint sets per center
};

/// Penalized DC problem f_tau = g - h over k x d variable matrices.
///
/// dca_point fuses the two DCA half steps: it picks Y in dh(X) and returns
/// the exact minimizer of g(.) - <Y, .>. Implementations must be pure.
class DcProblem {
 public:
  virtual ~DcProblem() = default;

  virtual double eval_penalized(const Matrix& X, double tau) const = 0;
  virtual double eval_cost(const Matrix& X) const = 0;
  virtual Matrix dca_point(const Matrix& X, double tau) const = 0;
  virtual ProblemDims dims() const = 0;
};

struct ConstantTrial {
  double lambda_bar = 2.0;
};

/// Grow the trial step by gamma after two consecutive full steps,
/// otherwise reuse the last accepted step.
struct SelfAdaptiveTrial {
  double gamma = 2.0;
  double lambda_bar_1 = 2.0;
};

using TrialPolicy = std::variant<ConstantTrial, SelfAdaptiveTrial>;

struct LineSearchParams {
  double alpha = 0.05;
  double beta = 0.1;
  TrialPolicy trial = ConstantTrial{};

  void validate() const;
};

struct PenaltySchedule {
  double tau0 = 1.0;
  double sigma = 10.0;
  double tau_f = 1e8;

  void validate() const;
  /// tau0, sigma tau0, sigma^2 tau0, ... while strictly below tau_f.
  std::vector<double> stages() const;
};

struct StopRule {
  double tol = 1e-6;
  std::int64_t max_inner_iters = 10000;
  std::int64_t max_total_iters = 1000000;

  void validate() const;
};

struct SolveOptions {
  /// Without a trace the DCA driver skips objective evaluations entirely
  /// and checks iterates for finiteness instead.
  bool record_trace = true;
};

enum class Termination { StepTolerance, ZeroDirection, IterationCap };

std::string to_string(Termination t);

/// One row per iterate. The first row of each stage (iteration equal to
/// the stage's starting index, lambda NaN) records f at the starting point.
struct TraceEntry {
  int stage = 0;
  std::int64_t iteration = 0;
  double tau = 0.0;
  double f = 0.0;            // penalized objective at the new iterate
  double f_dca = 0.0;        // penalized objective at the DCA point y
  double lambda = 0.0;       // accepted step (0 for DCA)
  double lambda_bar = 0.0;   // trial step (0 for DCA)
  double d_norm_sq = 0.0;    // |y - X|_F^2
  int backtracks = 0;
  bool stage_start = false;
};

struct SolveReport {
  Matrix final_X;
  double cost = 0.0;
  std::vector<TraceEntry> objective_trace;
  std::int64_t iterations_total = 0;
  std::vector<std::int64_t> iterations_per_stage;
  std::vector<double> stage_taus;
  std::vector<Termination> stage_terminations;
  double wall_time = 0.0;
  Termination termination = Termination::StepTolerance;
  double alpha = 0.0;  // Armijo constant used, 0 for DCA
};

/// Thrown on a non-finite objective or iterate; carries the partial trace.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, SolveReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const SolveReport& partial() const noexcept { return partial_; }

 private:
  SolveReport partial_;
};

/// Classical DCA inside the penalty loop.
SolveReport dca_solve(const DcProblem& problem, const Matrix& X0, const PenaltySchedule& schedule,
                      const StopRule& stop, const SolveOptions& options = {});

/// Boosted DCA: DCA point, then a backtracking line search along y - X.
SolveReport bdca_solve(const DcProblem& problem, const Matrix& X0, const PenaltySchedule& schedule,
                       const LineSearchParams& ls, const StopRule& stop, const SolveOptions& options = {});

/// (lambda_bar, lambda) of one completed iteration.
struct StepRecord {
  double lambda_bar = 0.0;
  double lambda = 0.0;
};

/// Self-adaptive trial step for iteration k >= 1. `older` and `previous`
/// are iterations k-2 and k-1; iteration 0 is {0, 0} by convention.
double next_trial_step(const StepRecord& older, const StepRecord& previous, double gamma, double lambda_bar_1,
                       std::int64_t k);

struct DescentViolation {
  std::size_t entry = 0;
  std::string message;
};

/// Checks within-stage nonincrease of f (relative tolerance) and the
/// Armijo acceptance of every boosted step. Empty on success.
std::vector<DescentViolation> check_descent(const SolveReport& report, double rel_tol = 1e-9);

/// Threshold under which |d|_F counts as a zero direction.
inline constexpr double kZeroDirection = 1e-15;
/// Backtracking gives up and takes lambda = 0 below this step.
inline constexpr double kLambdaFloor = 1e-12;

}  // namespace dcclust
