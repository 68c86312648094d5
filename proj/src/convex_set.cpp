#include "dcclust/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcclust {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw InputError("ball: empty center");
  if (!all_finite(center) || !std::isfinite(radius)) throw InputError("ball: non-finite parameters");
  if (!(radius > 0.0)) throw InputError("ball: radius must be positive");
  return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw InputError("box: lower and upper must be nonempty and of equal dimension");
  if (!all_finite(lower) || !all_finite(upper)) throw InputError("box: non-finite bounds");
  if ((lower.array() > upper.array()).any()) throw InputError("box: lower must not exceed upper");
  return ConvexSet(Box{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
  if (normal.size() == 0) throw InputError("halfspace: empty normal");
  if (!all_finite(normal) || !std::isfinite(offset)) throw InputError("halfspace: non-finite parameters");
  if (normal.squaredNorm() == 0.0) throw InputError("halfspace: normal must be nonzero");
  return ConvexSet(Halfspace{std::move(normal), offset});
}

ConvexSet ConvexSet::whole_space(Eigen::Index dim) {
  if (dim <= 0) throw InputError("whole_space: dimension must be positive");
  return ConvexSet(WholeSpace{dim});
}

Eigen::Index ConvexSet::dim() const noexcept {
  return std::visit(Overloaded{[](const Ball& b) { return b.center.size(); },
                               [](const Box& b) { return b.lower.size(); },
                               [](const Halfspace& h) { return h.normal.size(); },
                               [](const WholeSpace& w) { return w.dim; }},
                    shape_);
}

std::string_view ConvexSet::kind() const noexcept {
  return std::visit(Overloaded{[](const Ball&) { return std::string_view("ball"); },
                               [](const Box&) { return std::string_view("box"); },
                               [](const Halfspace&) { return std::string_view("halfspace"); },
                               [](const WholeSpace&) { return std::string_view("whole_space"); }},
                    shape_);
}

bool ConvexSet::bounded() const noexcept {
  return std::holds_alternative<Ball>(shape_) || std::holds_alternative<Box>(shape_);
}

void ConvexSet::check_dim(const VectorRef& x) const {
  if (x.size() != dim()) {
    throw InputError("dimension mismatch: point has " + std::to_string(x.size()) + " coordinates, " +
                     std::string(kind()) + " has dimension " + std::to_string(dim()));
  }
}

Vector ConvexSet::project(const VectorRef& x) const {
  check_dim(x);
  return std::visit(
      Overloaded{
          [&](const Ball& b) -> Vector {
            const Vector v = x - b.center;
            const double n = v.norm();
            if (n <= b.radius) return x;
            return b.center + (b.radius / n) * v;
          },
          [&](const Box& b) -> Vector { return x.cwiseMax(b.lower).cwiseMin(b.upper); },
          [&](const Halfspace& h) -> Vector {
            const double excess = h.normal.dot(x) - h.offset;
            if (excess <= 0.0) return x;
            return x - (excess / h.normal.squaredNorm()) * h.normal;
          },
          [&](const WholeSpace&) -> Vector { return x; }},
      shape_);
}

double ConvexSet::dist_sq(const VectorRef& x) const {
  check_dim(x);
  return std::visit(Overloaded{[&](const Ball& b) {
                                 const double n = (x - b.center).norm();
                                 return n <= b.radius ? 0.0 : (n - b.radius) * (n - b.radius);
                               },
                               [&](const Box& b) {
                                 double s = 0.0;
                                 for (Eigen::Index j = 0; j < x.size(); ++j) {
                                   const double c = std::clamp(x[j], b.lower[j], b.upper[j]);
                                   s += (x[j] - c) * (x[j] - c);
                                 }
                                 return s;
                               },
                               [&](const Halfspace& h) {
                                 const double excess = h.normal.dot(x) - h.offset;
                                 return excess <= 0.0 ? 0.0 : excess * excess / h.normal.squaredNorm();
                               },
                               [&](const WholeSpace&) { return 0.0; }},
                    shape_);
}

bool ConvexSet::contains(const VectorRef& x, double tol) const {
  if (tol < 0.0) throw InputError("contains: tolerance must be nonnegative");
  return dist_sq(x) <= tol * tol;
}

double ConvexSet::phi(const VectorRef& x) const {
  const Vector p = project(x);
  return 2.0 * x.dot(p) - p.squaredNorm();
}

Vector ConvexSet::sample_uniform(Rng& rng) const {
  return std::visit(
      Overloaded{[&](const Ball& b) -> Vector {
                   const Eigen::Index d = b.center.size();
                   Vector dir(d);
                   double n = 0.0;
                   do {
                     for (Eigen::Index j = 0; j < d; ++j) dir[j] = rng.normal();
                     n = dir.norm();
                   } while (n == 0.0);
                   const double r = b.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
                   return b.center + (r / n) * dir;
                 },
                 [&](const Box& b) -> Vector {
                   Vector v(b.lower.size());
                   for (Eigen::Index j = 0; j < v.size(); ++j)
                     v[j] = b.lower[j] + (b.upper[j] - b.lower[j]) * rng.uniform();
                   return v;
                 },
                 [&](const Halfspace&) -> Vector {
                   throw UnsupportedSampling("cannot sample uniformly from an unbounded halfspace");
                 },
                 [&](const WholeSpace&) -> Vector {
                   throw UnsupportedSampling("cannot sample uniformly from the whole space");
                 }},
      shape_);
}

std::string ConvexSet::describe() const {
  std::ostringstream os;
  os.precision(10);
  const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", ", ", "", "", "(", ")");
  std::visit(Overloaded{[&](const Ball& b) { os << "Ball(" << b.center.transpose().format(fmt) << ", r=" << b.radius << ")"; },
                        [&](const Box& b) {
                          os << "Box(" << b.lower.transpose().format(fmt) << ", " << b.upper.transpose().format(fmt) << ")";
                        },
                        [&](const Halfspace& h) {
                          os << "Halfspace(" << h.normal.transpose().format(fmt) << " . x <= " << h.offset << ")";
                        },
                        [&](const WholeSpace& w) { os << "WholeSpace(d=" << w.dim << ")"; }},
             shape_);
  return os.str();
}

}  // namespace dcclust
