#include "dcclust/clustering_model.hpp"

#include <limits>

namespace dcclust {

ClusteringProblem::ClusteringProblem(Matrix data, ConstraintSystem constraints)
    : data_(std::move(data)), constraints_(std::move(constraints)) {
  if (data_.rows() < 1 || data_.cols() < 1) throw InputError("clustering: data matrix must be nonempty");
  if (!data_.allFinite()) throw InputError("clustering: data matrix has non-finite entries");
  if (data_.cols() != constraints_.dim()) throw InputError("clustering: data and constraints differ in dimension");
  data_sum_ = data_.colwise().sum().transpose();
}

ProblemDims ClusteringProblem::dims() const {
  return {data_.rows(), constraints_.centers(), data_.cols(), constraints_.per_center()};
}

void ClusteringProblem::check_shape(const Matrix& X) const {
  if (X.rows() != constraints_.centers() || X.cols() != data_.cols()) {
    throw InputError("clustering: variable matrix is " + std::to_string(X.rows()) + "x" + std::to_string(X.cols()) +
                     ", expected " + std::to_string(constraints_.centers()) + "x" + std::to_string(data_.cols()));
  }
}

std::vector<Eigen::Index> ClusteringProblem::assignments(const Matrix& X) const {
  check_shape(X);
  std::vector<Eigen::Index> r(static_cast<std::size_t>(data_.rows()));
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index l = 0; l < X.rows(); ++l) {
      const double dsq = (X.row(l) - data_.row(i)).squaredNorm();
      if (dsq < best) {
        best = dsq;
        arg = l;
      }
    }
    r[static_cast<std::size_t>(i)] = arg;
  }
  return r;
}

double ClusteringProblem::eval_cost(const Matrix& X) const {
  check_shape(X);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < X.rows(); ++l) best = std::min(best, (X.row(l) - data_.row(i)).squaredNorm());
    total += best;
  }
  return total;
}

double ClusteringProblem::eval_penalized(const Matrix& X, double tau) const {
  if (tau < 0.0) throw InputError("clustering: tau must be nonnegative");
  const double fit = 0.5 * eval_cost(X);
  if (tau == 0.0) return fit;
  return fit + 0.5 * tau * constraints_.penalty(X);
}

DcComponents ClusteringProblem::eval_g_h(const Matrix& X, double tau) const {
  check_shape(X);
  const double q = static_cast<double>(constraints_.per_center());
  double g1 = 0.0, h1 = 0.0;
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    double sum = 0.0, best = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < X.rows(); ++l) {
      const double dsq = (X.row(l) - data_.row(i)).squaredNorm();
      sum += dsq;
      best = std::min(best, dsq);
    }
    g1 += sum;
    // max over r of the sum without term r drops the smallest term.
    h1 += sum - best;
  }
  double h2 = 0.0;
  for (Eigen::Index l = 0; l < X.rows(); ++l) h2 += constraints_.phi_sum(l, X.row(l).transpose());
  return {0.5 * g1 + 0.5 * tau * q * X.squaredNorm(), 0.5 * h1 + 0.5 * tau * h2};
}

Matrix ClusteringProblem::grad_g(const Matrix& X, double tau) const {
  check_shape(X);
  const double scale = static_cast<double>(data_.rows()) + tau * static_cast<double>(constraints_.per_center());
  Matrix G = scale * X;
  G.rowwise() -= data_sum_.transpose();
  return G;
}

Matrix ClusteringProblem::assignment_residual(const Matrix& X) const {
  Matrix S = Matrix::Zero(X.rows(), X.cols());
  const std::vector<Eigen::Index> r = assignments(X);
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    const Eigen::Index l = r[static_cast<std::size_t>(i)];
    S.row(l) += X.row(l) - data_.row(i);
  }
  return S;
}

Matrix ClusteringProblem::subgradient_h(const Matrix& X, double tau) const {
  check_shape(X);
  Matrix W = static_cast<double>(data_.rows()) * X - assignment_residual(X);
  W.rowwise() -= data_sum_.transpose();
  return W + tau * constraints_.projection_sums(X);
}

Matrix ClusteringProblem::dca_point(const Matrix& X, double tau) const {
  if (!(tau > 0.0)) throw InputError("clustering: dca_point needs tau > 0");
  check_shape(X);
  const double m = static_cast<double>(data_.rows());
  const double q = static_cast<double>(constraints_.per_center());
  // X+ = (Y + E A) / (m + tau q) with Y = W + tau U; the E A terms cancel.
  Matrix next = m * X + tau * constraints_.projection_sums(X) - assignment_residual(X);
  next /= (m + tau * q);
  return next;
}

}  // namespace dcclust
