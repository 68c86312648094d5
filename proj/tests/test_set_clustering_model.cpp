#include "dcclust/clustering_model.hpp"
#include "dcclust/set_clustering_model.hpp"

#include "oracles.hpp"
#include "random_instances.hpp"

#include <doctest.h>

#include <cmath>

using namespace dcclust;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

Matrix centers(std::initializer_list<Vector> c) {
  Matrix X(static_cast<Eigen::Index>(c.size()), c.begin()->size());
  Eigen::Index i = 0;
  for (const Vector& v : c) X.row(i++) = v.transpose();
  return X;
}

ConstraintSystem free_centers(int k, Eigen::Index d) {
  return ConstraintSystem(std::vector<std::vector<ConvexSet>>(static_cast<std::size_t>(k)), d);
}

double rel_err(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace

TEST_CASE("set clustering cost") {
  const ConvexSet near = ConvexSet::ball(v2(0, 0), 1.0);
  const ConvexSet far = ConvexSet::ball(v2(10, 0), 1.0);
  CHECK(SetClusteringProblem({near, ConvexSet::box(v2(-1, -1), v2(1, 1))}, free_centers(1, 2))
            .eval_cost(centers({v2(0.5, 0.5)})) == 0.0);
  CHECK(SetClusteringProblem({ConvexSet::ball(v2(4, 0), 1.0)}, free_centers(1, 2)).eval_cost(centers({v2(2, 0)})) ==
        doctest::Approx(1.0));
  CHECK(SetClusteringProblem({near, far}, free_centers(2, 2)).eval_cost(centers({v2(0, 0), v2(10, 0)})) == 0.0);
}

TEST_CASE("set clustering penalized objective") {
  const ConstraintSystem cs({{ConvexSet::ball(v2(0, 0), 1.0)}}, 2);
  const SetClusteringProblem p({ConvexSet::ball(v2(4, 0), 1.0)}, cs);
  CHECK(p.eval_penalized(centers({v2(2, 0)}), 2.0) == doctest::Approx(1.5));
  CHECK(p.eval_penalized(centers({v2(2, 0)}), 0.0) == 0.5 * p.eval_cost(centers({v2(2, 0)})));
  CHECK(p.eval_penalized(centers({v2(0.9, 0)}), 1e5) == doctest::Approx(0.5 * p.eval_cost(centers({v2(0.9, 0)}))));
}

TEST_CASE("set clustering DC components") {
  SUBCASE("one center: only the phi part of h1 remains") {
    const SetClusteringProblem p({ConvexSet::ball(v2(4, 0), 1.0)}, free_centers(1, 2));
    const Matrix X = centers({v2(2, 0)});
    // phi = |x|^2 - d^2 = 4 - 1
    CHECK(p.eval_g_h(X, 0.0).h == doctest::Approx(1.5));
    CHECK(p.eval_g_h(X, 1.0).h == doctest::Approx(1.5 + 0.5 * 4));
  }
  SUBCASE("two centers by direct evaluation") {
    const ConvexSet t = ConvexSet::ball(v2(4, 0), 1.0);
    const SetClusteringProblem p({t}, free_centers(2, 2));
    const Matrix X = centers({v2(2, 0), v2(7, 0)});
    // 1/2 (phi(x1) + phi(x2)) + 1/2 max(d2^2, d1^2) = 1/2 (3 + 45) + 1/2 * 4
    CHECK(p.eval_g_h(X, 0.0).h == doctest::Approx(26.0));
  }
  SUBCASE("identity and oracle agreement on random instances") {
    Rng rng(41);
    for (int t = 0; t < 100; ++t) {
      const testgen::Instance inst = testgen::random_instance(rng, true);
      const auto& p = static_cast<const SetClusteringProblem&>(*inst.problem);
      const oracle::SetModel ref{inst.targets, inst.constraints.get()};
      const Matrix X = testgen::random_centers(rng, static_cast<int>(p.dims().k), p.dims().d);
      const double tau = std::pow(10.0, rng.uniform(-1.0, 4.0));
      const DcComponents gh = p.eval_g_h(X, tau);
      const double f = p.eval_penalized(X, tau);
      CHECK(std::abs(gh.g - gh.h - f) <= 1e-8 * (1.0 + std::abs(f)));
      CHECK(rel_err(gh.g, ref.g(X, tau)) < 1e-12);
      CHECK(rel_err(gh.h, ref.h(X, tau)) < 1e-11);
      CHECK(rel_err(f, ref.f(X, tau)) < 1e-12);
    }
  }
}

TEST_CASE("set clustering gradient of g against finite differences") {
  Rng rng(42);
  for (int t = 0; t < 100; ++t) {
    const testgen::Instance inst = testgen::random_instance(rng, true);
    const auto& p = static_cast<const SetClusteringProblem&>(*inst.problem);
    const Matrix X = testgen::random_centers(rng, static_cast<int>(p.dims().k), p.dims().d);
    const double tau = std::pow(10.0, rng.uniform(-1.0, 3.0));
    const Matrix fd = oracle::gradient([&](const Matrix& Y) { return p.eval_g_h(Y, tau).g; }, X, 1e-4);
    const Matrix G = p.grad_g(X, tau);
    CHECK((fd - G).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, G.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("set clustering subgradient inequality for h") {
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const testgen::Instance inst = testgen::random_instance(rng, true);
    const auto& p = static_cast<const SetClusteringProblem&>(*inst.problem);
    const Eigen::Index k = p.dims().k, d = p.dims().d;
    const Matrix X = testgen::random_centers(rng, static_cast<int>(k), d);
    const double tau = rng.uniform(0.1, 100.0);
    const Matrix S = p.subgradient_h(X, tau);
    const double hx = p.eval_g_h(X, tau).h;
    for (int s = 0; s < 100; ++s) {
      const Matrix Y = testgen::random_centers(rng, static_cast<int>(k), d);
      CHECK(p.eval_g_h(Y, tau).h >= hx + (S.array() * (Y - X).array()).sum() - 1e-9 * (1.0 + std::abs(hx)));
    }
  }
}

TEST_CASE("set clustering DCA point examples") {
  const ConstraintSystem cs({{ConvexSet::ball(v2(0, 0), 1.0)}}, 2);
  const SetClusteringProblem p({ConvexSet::ball(v2(4, 0), 1.0)}, cs);
  const Matrix X1 = p.dca_point(centers({v2(2, 0)}), 1.0);
  CHECK(X1(0, 0) == doctest::Approx(2.0));
  CHECK(X1(0, 1) == doctest::Approx(0.0));

  // a center inside both its target and its constraint is a fixed point
  const ConstraintSystem wide({{ConvexSet::ball(v2(0, 0), 5.0)}}, 2);
  const SetClusteringProblem q({ConvexSet::ball(v2(1, 1), 1.0)}, wide);
  const Matrix X = centers({v2(1.2, 0.9)});
  CHECK((q.dca_point(X, 3.0) - X).norm() < 1e-15);
  CHECK_THROWS_AS(q.dca_point(X, -1.0), InputError);
}

TEST_CASE("set clustering DCA point matches a numerical subproblem minimizer") {
  Rng rng(44);
  int done = 0;
  while (done < 50) {
    const int m = testgen::uniform_int(rng, 1, 6);
    const int k = testgen::uniform_int(rng, 1, 2);
    const std::vector<ConvexSet> targets = testgen::random_targets(rng, m, 2);
    std::vector<std::vector<ConvexSet>> per;
    for (int l = 0; l < k; ++l) per.push_back({testgen::random_set(rng, 2)});
    const ConstraintSystem cs(std::move(per), 2);
    const SetClusteringProblem p(targets, cs);
    const oracle::SetModel ref{targets, &cs};
    const Matrix X = testgen::random_centers(rng, k, 2);
    const double tau = rng.uniform(0.5, 20.0);

    std::vector<std::vector<double>> dist(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < k; ++l) dist[i].push_back(oracle::dist_sq(targets[i], X.row(l).transpose()));
    if (oracle::assignment_gap(dist) < 1e-3) continue;

    const Matrix Y = oracle::gradient([&](const Matrix& Z) { return ref.h(Z, tau); }, X, 1e-5);
    const Matrix Xs = oracle::newton_minimize(
        [&](const Matrix& Z) { return ref.g(Z, tau) - (Y.array() * Z.array()).sum(); }, X);
    CHECK((p.dca_point(X, tau) - Xs).cwiseAbs().maxCoeff() <= 1e-6);
    ++done;
  }
}

TEST_CASE("shrinking targets recover the point clustering cost") {
  Rng rng(45);
  const Matrix A = testgen::random_points(rng, 12, 2);
  const Matrix X = testgen::random_centers(rng, 3, 2);
  const ClusteringProblem points(A, free_centers(3, 2));
  const double exact = points.eval_cost(X);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    std::vector<ConvexSet> balls;
    for (Eigen::Index i = 0; i < A.rows(); ++i) balls.push_back(ConvexSet::ball(A.row(i).transpose(), eps));
    const double gap = std::abs(SetClusteringProblem(balls, free_centers(3, 2)).eval_cost(X) - exact);
    // each term changes by at most 2 eps |x - a| + eps^2
    CHECK(gap <= eps * (2.0 * std::sqrt(exact) * 12 + 12 * eps));
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("set clustering ties go to the smallest center index") {
  const SetClusteringProblem p({ConvexSet::ball(v2(0, 0), 0.5)}, free_centers(2, 2));
  CHECK(p.assignments(centers({v2(0, 2), v2(2, 0)})) == std::vector<Eigen::Index>{0});
}

TEST_CASE("set clustering construction errors") {
  CHECK_THROWS_AS(SetClusteringProblem({}, free_centers(1, 2)), InputError);
  CHECK_THROWS_AS(SetClusteringProblem({ConvexSet::ball(Vector::Zero(3), 1.0)}, free_centers(1, 2)), InputError);
  const SetClusteringProblem p({ConvexSet::ball(v2(0, 0), 1.0)}, free_centers(1, 2));
  CHECK_THROWS_AS(p.eval_cost(Matrix::Zero(1, 3)), InputError);
}
