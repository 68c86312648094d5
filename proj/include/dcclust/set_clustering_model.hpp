#pragma once

#include "dcclust/clustering_model.hpp"

#include <vector>

namespace dcclust {

/// Constrained set clustering: the data are closed convex targets Lambda_i
/// and distances are squared set distances,
///
///   f(X) = 1/2 sum_i min_l d(x^l; Lambda_i)^2 + tau/2 sum_l sum_j d(x^l; Omega_j^l)^2,
///
/// split as g1 = m/2 |X|_F^2, g2 = tau q/2 |X|_F^2,
/// h1 = sum_i (1/2 sum_l phi_{Lambda_i}(x^l) + 1/2 max_r sum_{l != r} d(x^l; Lambda_i)^2),
/// h2 = tau/2 sum_l sum_j phi_{Omega_j^l}(x^l).
class SetClusteringProblem : public DcProblem {
 public:
  SetClusteringProblem(std::vector<ConvexSet> targets, ConstraintSystem constraints);

  double eval_cost(const Matrix& X) const override;
  double eval_penalized(const Matrix& X, double tau) const override;
  Matrix dca_point(const Matrix& X, double tau) const override;
  ProblemDims dims() const override;

  DcComponents eval_g_h(const Matrix& X, double tau) const;
  /// (m + tau q) X
  Matrix grad_g(const Matrix& X, double tau) const;
  /// V + tau U with V = m X - sum_i e_{r(i)} (x^{r(i)} - P(x^{r(i)}; Lambda_i)).
  Matrix subgradient_h(const Matrix& X, double tau) const;
  std::vector<Eigen::Index> assignments(const Matrix& X) const;

  const std::vector<ConvexSet>& targets() const noexcept { return targets_; }
  const ConstraintSystem& constraints() const noexcept { return constraints_; }

 private:
  void check_shape(const Matrix& X) const;
  Matrix assignment_residual(const Matrix& X) const;

  std::vector<ConvexSet> targets_;
  ConstraintSystem constraints_;
};

}  // namespace dcclust
