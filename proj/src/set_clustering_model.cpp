#include "dcclust/set_clustering_model.hpp"

#include <limits>

namespace dcclust {

SetClusteringProblem::SetClusteringProblem(std::vector<ConvexSet> targets, ConstraintSystem constraints)
    : targets_(std::move(targets)), constraints_(std::move(constraints)) {
  if (targets_.empty()) throw InputError("set clustering: at least one target set is required");
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (targets_[i].dim() != constraints_.dim())
      throw InputError("set clustering: target " + std::to_string(i) + " differs in dimension from the constraints");
  }
}

ProblemDims SetClusteringProblem::dims() const {
  return {static_cast<Eigen::Index>(targets_.size()), constraints_.centers(), constraints_.dim(),
          constraints_.per_center()};
}

void SetClusteringProblem::check_shape(const Matrix& X) const {
  if (X.rows() != constraints_.centers() || X.cols() != constraints_.dim()) {
    throw InputError("set clustering: variable matrix is " + std::to_string(X.rows()) + "x" +
                     std::to_string(X.cols()) + ", expected " + std::to_string(constraints_.centers()) + "x" +
                     std::to_string(constraints_.dim()));
  }
}

std::vector<Eigen::Index> SetClusteringProblem::assignments(const Matrix& X) const {
  check_shape(X);
  std::vector<Eigen::Index> r(targets_.size());
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index l = 0; l < X.rows(); ++l) {
      const double dsq = targets_[i].dist_sq(X.row(l).transpose());
      if (dsq < best) {
        best = dsq;
        arg = l;
      }
    }
    r[i] = arg;
  }
  return r;
}

double SetClusteringProblem::eval_cost(const Matrix& X) const {
  check_shape(X);
  double total = 0.0;
  for (const ConvexSet& target : targets_) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < X.rows(); ++l) best = std::min(best, target.dist_sq(X.row(l).transpose()));
    total += best;
  }
  return total;
}

double SetClusteringProblem::eval_penalized(const Matrix& X, double tau) const {
  if (tau < 0.0) throw InputError("set clustering: tau must be nonnegative");
  const double fit = 0.5 * eval_cost(X);
  if (tau == 0.0) return fit;
  return fit + 0.5 * tau * constraints_.penalty(X);
}

DcComponents SetClusteringProblem::eval_g_h(const Matrix& X, double tau) const {
  check_shape(X);
  const double m = static_cast<double>(targets_.size());
  const double q = static_cast<double>(constraints_.per_center());
  double h1 = 0.0;
  for (const ConvexSet& target : targets_) {
    double phi_sum = 0.0, dist_sum = 0.0, best = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < X.rows(); ++l) {
      const auto x = X.row(l).transpose();
      const double dsq = target.dist_sq(x);
      phi_sum += target.phi(x);
      dist_sum += dsq;
      best = std::min(best, dsq);
    }
    h1 += 0.5 * phi_sum + 0.5 * (dist_sum - best);
  }
  double h2 = 0.0;
  for (Eigen::Index l = 0; l < X.rows(); ++l) h2 += constraints_.phi_sum(l, X.row(l).transpose());
  return {0.5 * (m + tau * q) * X.squaredNorm(), h1 + 0.5 * tau * h2};
}

Matrix SetClusteringProblem::grad_g(const Matrix& X, double tau) const {
  check_shape(X);
  return (static_cast<double>(targets_.size()) + tau * static_cast<double>(constraints_.per_center())) * X;
}

Matrix SetClusteringProblem::assignment_residual(const Matrix& X) const {
  Matrix S = Matrix::Zero(X.rows(), X.cols());
  for (const ConvexSet& target : targets_) {
    // w^l = P(x^l; Lambda_i) for every l, then keep the closest one.
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    Vector w_best;
    for (Eigen::Index l = 0; l < X.rows(); ++l) {
      Vector w = target.project(X.row(l).transpose());
      const double dsq = (X.row(l).transpose() - w).squaredNorm();
      if (dsq < best) {
        best = dsq;
        arg = l;
        w_best = std::move(w);
      }
    }
    S.row(arg) += X.row(arg) - w_best.transpose();
  }
  return S;
}

Matrix SetClusteringProblem::subgradient_h(const Matrix& X, double tau) const {
  check_shape(X);
  const Matrix V = static_cast<double>(targets_.size()) * X - assignment_residual(X);
  return V + tau * constraints_.projection_sums(X);
}

Matrix SetClusteringProblem::dca_point(const Matrix& X, double tau) const {
  if (!(tau > 0.0)) throw InputError("set clustering: dca_point needs tau > 0");
  check_shape(X);
  const double m = static_cast<double>(targets_.size());
  const double q = static_cast<double>(constraints_.per_center());
  Matrix next = m * X + tau * constraints_.projection_sums(X) - assignment_residual(X);
  next /= (tau * q + m);
  return next;
}

}  // namespace dcclust
