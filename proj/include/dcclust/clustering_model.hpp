#pragma once

#include "dcclust/constraint_system.hpp"
#include "dcclust/dc_solver.hpp"

#include <vector>

namespace dcclust {

struct DcComponents {
  double g = 0.0;
  double h = 0.0;
};

/// Constrained point clustering:
///
///   min  psi(X) = sum_i min_l |x^l - a^i|^2   s.t.  x^l in Omega_j^l,
///
/// solved through the penalized objective
///
///   f(X) = 1/2 sum_i min_l |x^l - a^i|^2 + tau/2 sum_l sum_j d(x^l; Omega_j^l)^2
///
/// with the DC split g = g1 + g2, h = h1 + h2 where
///   g1 = 1/2 sum_i sum_l |x^l - a^i|^2,       g2 = tau q/2 |X|_F^2,
///   h1 = 1/2 sum_i max_r sum_{l != r} |x^l - a^i|^2,
///   h2 = tau/2 sum_l sum_j phi_{Omega_j^l}(x^l).
class ClusteringProblem : public DcProblem {
 public:
  ClusteringProblem(Matrix data, ConstraintSystem constraints);

  double eval_cost(const Matrix& X) const override;
  double eval_penalized(const Matrix& X, double tau) const override;
  Matrix dca_point(const Matrix& X, double tau) const override;
  ProblemDims dims() const override;

  DcComponents eval_g_h(const Matrix& X, double tau) const;
  /// (m + tau q) X - E A
  Matrix grad_g(const Matrix& X, double tau) const;
  /// W + tau U, an element of the subdifferential of h at X.
  Matrix subgradient_h(const Matrix& X, double tau) const;
  /// r(i): nearest center of datum i, smallest index on ties.
  std::vector<Eigen::Index> assignments(const Matrix& X) const;

  const Matrix& data() const noexcept { return data_; }
  const ConstraintSystem& constraints() const noexcept { return constraints_; }

 private:
  void check_shape(const Matrix& X) const;
  /// sum_i (x^{r(i)} - a^i) scattered into row r(i).
  Matrix assignment_residual(const Matrix& X) const;

  Matrix data_;
  ConstraintSystem constraints_;
  Vector data_sum_;  // each row of E A
};

}  // namespace dcclust
