#pragma once

#include "dcclust/rng.hpp"
#include "dcclust/types.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace dcclust {

struct Ball {
  Vector center;
  double radius;
};

struct Box {
  Vector lower;
  Vector upper;
};

/// { x : <normal, x> <= offset }
struct Halfspace {
  Vector normal;
  double offset;
};

struct WholeSpace {
  Eigen::Index dim;
};

/// A closed convex subset of R^d with a closed-form Euclidean projection.
///
/// Instances are immutable; construction through the factories validates
/// the shape invariants (positive radius, ordered box bounds, nonzero
/// halfspace normal). All queries are pure and thread safe.
class ConvexSet {
 public:
  using Shape = std::variant<Ball, Box, Halfspace, WholeSpace>;

  static ConvexSet ball(Vector center, double radius);
  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet halfspace(Vector normal, double offset);
  static ConvexSet whole_space(Eigen::Index dim);

  const Shape& shape() const noexcept { return shape_; }
  Eigen::Index dim() const noexcept;
  std::string_view kind() const noexcept;
  bool bounded() const noexcept;

  /// Unique nearest point of the set.
  Vector project(const VectorRef& x) const;

  /// Squared Euclidean distance, evaluated without forming the projection.
  double dist_sq(const VectorRef& x) const;

  /// True iff dist_sq(x) <= tol^2.
  bool contains(const VectorRef& x, double tol = 1e-9) const;

  /// phi(x) = sup_{w in S} 2<x,w> - |w|^2 = 2<x,P(x)> - |P(x)|^2.
  /// Satisfies |x|^2 - phi(x) = dist_sq(x) and grad phi(x) = 2 P(x).
  double phi(const VectorRef& x) const;

  /// Uniform sample; only Ball and Box are supported.
  Vector sample_uniform(Rng& rng) const;

  std::string describe() const;

 private:
  explicit ConvexSet(Shape shape) : shape_(std::move(shape)) {}
  void check_dim(const VectorRef& x) const;

  Shape shape_;
};

}  // namespace dcclust
