#include "dcclust/constraint_system.hpp"

#include <algorithm>

namespace dcclust {

ConstraintSystem::ConstraintSystem(std::vector<std::vector<ConvexSet>> per_center, Eigen::Index dim)
    : sets_(std::move(per_center)), dim_(dim) {
  if (dim_ <= 0) throw InputError("constraints: dimension must be positive");
  if (sets_.empty()) throw InputError("constraints: at least one center is required");
  std::size_t q = 1;
  for (const auto& list : sets_) q = std::max(q, list.size());
  for (std::size_t l = 0; l < sets_.size(); ++l) {
    for (const ConvexSet& s : sets_[l]) {
      if (s.dim() != dim_) {
        throw InputError("constraints: set " + s.describe() + " of center " + std::to_string(l) +
                         " does not have dimension " + std::to_string(dim_));
      }
    }
    while (sets_[l].size() < q) sets_[l].push_back(ConvexSet::whole_space(dim_));
  }
  q_ = static_cast<Eigen::Index>(q);
}

Vector ConstraintSystem::projection_sum(Eigen::Index center, const VectorRef& x) const {
  Vector u = Vector::Zero(dim_);
  for (const ConvexSet& s : (*this)[center]) u += s.project(x);
  return u;
}

double ConstraintSystem::dist_sq_sum(Eigen::Index center, const VectorRef& x) const {
  double total = 0.0;
  for (const ConvexSet& s : (*this)[center]) total += s.dist_sq(x);
  return total;
}

double ConstraintSystem::phi_sum(Eigen::Index center, const VectorRef& x) const {
  double total = 0.0;
  for (const ConvexSet& s : (*this)[center]) total += s.phi(x);
  return total;
}

double ConstraintSystem::penalty(const Matrix& X) const {
  double total = 0.0;
  for (Eigen::Index l = 0; l < centers(); ++l) total += dist_sq_sum(l, X.row(l).transpose());
  return total;
}

Matrix ConstraintSystem::projection_sums(const Matrix& X) const {
  Matrix U(X.rows(), X.cols());
  for (Eigen::Index l = 0; l < centers(); ++l) U.row(l) = projection_sum(l, X.row(l).transpose()).transpose();
  return U;
}

bool ConstraintSystem::feasible(const Matrix& X, double tol) const {
  for (Eigen::Index l = 0; l < centers(); ++l)
    for (const ConvexSet& s : (*this)[l])
      if (!s.contains(X.row(l).transpose(), tol)) return false;
  return true;
}

}  // namespace dcclust
