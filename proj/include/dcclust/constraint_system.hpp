#pragma once

#include "dcclust/convex_set.hpp"

#include <vector>

namespace dcclust {

/// For every center l a list of q sets Omega_j^l. Construction pads shorter
/// lists with WholeSpace so q is uniform; padding adds no penalty and
/// projects to the identity.
class ConstraintSystem {
 public:
  ConstraintSystem(std::vector<std::vector<ConvexSet>> per_center, Eigen::Index dim);

  Eigen::Index centers() const noexcept { return static_cast<Eigen::Index>(sets_.size()); }
  Eigen::Index per_center() const noexcept { return q_; }
  Eigen::Index dim() const noexcept { return dim_; }

  const std::vector<ConvexSet>& operator[](Eigen::Index center) const { return sets_[static_cast<std::size_t>(center)]; }

  /// sum_j P(x; Omega_j^l), the row u^l.
  Vector projection_sum(Eigen::Index center, const VectorRef& x) const;
  /// sum_j d(x; Omega_j^l)^2
  double dist_sq_sum(Eigen::Index center, const VectorRef& x) const;
  /// sum_j phi_{Omega_j^l}(x)
  double phi_sum(Eigen::Index center, const VectorRef& x) const;

  /// Penalty sum over all centers and sets, without the tau/2 factor.
  double penalty(const Matrix& X) const;
  /// Matrix U whose row l is projection_sum(l, x^l).
  Matrix projection_sums(const Matrix& X) const;

  /// True when every center lies in all of its sets within `tol`.
  bool feasible(const Matrix& X, double tol = 1e-9) const;

 private:
  std::vector<std::vector<ConvexSet>> sets_;
  Eigen::Index q_ = 0;
  Eigen::Index dim_ = 0;
};

}  // namespace dcclust
