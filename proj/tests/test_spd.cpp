#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cocyclelab/rng.hpp"
#include "cocyclelab/spd.hpp"
#include "oracles.hpp"

using namespace cocyclelab::spd;
using cocyclelab::Rng;

namespace {

SpdPoint diag2(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return SpdPoint(m);
}

}  // namespace

TEST_CASE("point validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0.5, 0.2, 1;  // asymmetric
  CHECK_THROWS_AS(SpdPoint{bad}, SpdError);
  Eigen::MatrixXd neg(2, 2);
  neg << 1, 2, 2, 1;  // eigenvalues 3, -1
  CHECK_THROWS_AS(SpdPoint{neg}, SpdError);
}

TEST_CASE("affine-invariant distance closed forms") {
  CHECK(dist(SpdPoint::identity(3), SpdPoint::identity(3)) == 0.0);
  CHECK(dist(SpdPoint::scalar(1.0), SpdPoint::scalar(std::exp(2.0))) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dist(SpdPoint::identity(2), diag2(std::exp(1.0), std::exp(-1.0))) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(dist(SpdPoint::identity(2), SpdPoint::identity(3)), SpdError);
}

TEST_CASE("distance congruence invariance") {
  Rng rng(10);
  for (int m : {1, 2, 3}) {
    for (int trial = 0; trial < 40; ++trial) {
      auto a = oracles::random_spd(rng, m);
      auto b = oracles::random_spd(rng, m);
      Eigen::MatrixXd l(m, m);
      do {
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) l(i, j) = rng.uniform(-1.5, 1.5);
      } while (std::abs(l.determinant()) < 0.1);
      const double d0 = dist(a, b);
      const double d1 = dist(pullback(a, l), pullback(b, l));
      CHECK(d1 == doctest::Approx(d0).epsilon(1e-10));
      CHECK(dist(a, b) == doctest::Approx(dist(b, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("geodesic endpoints, proportional distance, scalar geometric mean") {
  auto a = SpdPoint::scalar(1.0), b = SpdPoint::scalar(4.0);
  CHECK(geodesic(a, b, 0.5).value() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(geodesic(a, a, 0.3).value() == doctest::Approx(1.0));

  auto i2 = SpdPoint::identity(2);
  auto e2 = diag2(std::exp(2.0), std::exp(2.0));
  auto mid = geodesic(i2, e2, 0.5);
  CHECK(mid.matrix()(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(mid.matrix()(1, 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = oracles::random_spd(rng, 2);
    auto y = oracles::random_spd(rng, 2);
    const double d = dist(x, y);
    for (double s : {0.25, 0.5, 0.75}) {
      auto g = geodesic(x, y, s);
      CHECK(dist(x, g) == doctest::Approx(s * d).epsilon(1e-9));
      CHECK(dist(g, y) == doctest::Approx((1 - s) * d).epsilon(1e-9));
    }
  }
}

TEST_CASE("pullback basics") {
  auto e = SpdPoint::identity(2);
  CHECK(dist(pullback(e, Eigen::MatrixXd::Identity(2, 2)), e) == 0.0);
  Eigen::MatrixXd c(1, 1);
  c(0, 0) = 3.0;
  CHECK(pullback(SpdPoint::scalar(1.0), c).value() == doctest::Approx(9.0));
  CHECK_THROWS_AS(pullback(e, Eigen::MatrixXd::Zero(2, 2)), SpdError);
}

TEST_CASE("minimal enclosing ball closed forms") {
  CHECK_THROWS_AS(min_enclosing_ball({}, 1e-8), SpdError);
  auto single = min_enclosing_ball({SpdPoint::scalar(5.0)}, 1e-8);
  CHECK(single.radius == 0.0);
  CHECK(single.center.value() == doctest::Approx(5.0));

  auto pair = min_enclosing_ball({SpdPoint::scalar(1.0), SpdPoint::scalar(4.0)}, 1e-8);
  CHECK(pair.center.value() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(pair.radius == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  auto two = min_enclosing_ball({SpdPoint::identity(2), diag2(std::exp(2), std::exp(2))},
                                1e-10);
  CHECK(two.center.matrix()(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(two.radius == doctest::Approx(std::numbers::sqrt2).epsilon(1e-9));
}

TEST_CASE("scalar iterative solver agrees with the log-midpoint closed form") {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<SpdPoint> pts;
    const int n = 2 + rng.index(7);
    for (int i = 0; i < n; ++i)
      pts.push_back(SpdPoint::scalar(std::exp(rng.uniform(-2.0, 2.0))));
    auto exact = min_enclosing_ball(pts, 1e-13);
    MebOptions opt;
    opt.tol = 1e-13;
    auto iter = meb_iterative(pts, opt);
    CHECK(dist(exact.center, iter.center) <= 1e-12);
    CHECK(std::abs(exact.radius - iter.radius) <= 1e-12);
  }
}

TEST_CASE("m = 2 ball matches brute-force minimax on random 20-point sets") {
  Rng rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<SpdPoint> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(oracles::random_spd(rng, 2, 0.5, 2.0));
    auto ball = min_enclosing_ball(pts, 1e-8);
    auto brute = oracles::brute_force_meb(pts);
    CHECK(std::abs(ball.radius - brute.radius) < 1e-4);
    for (const auto& p : pts) CHECK(dist(ball.center, p) <= ball.radius + 1e-8);
  }
}

TEST_CASE("hausdorff closed forms") {
  std::vector<SpdPoint> s1 = {SpdPoint::scalar(1.0)};
  std::vector<SpdPoint> s2 = {SpdPoint::scalar(std::exp(1.0))};
  CHECK(hausdorff(s1, s1) == 0.0);
  CHECK(hausdorff(s1, s2) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<SpdPoint> s3 = {SpdPoint::scalar(1.0), SpdPoint::scalar(std::exp(3.0))};
  CHECK(hausdorff(s1, s3) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(hausdorff({}, s1), SpdError);
}

TEST_CASE("center stability under Hausdorff perturbation") {
  Rng rng(14);
  for (int trial = 0; trial < 120; ++trial) {
    const int m = 1 + rng.index(3);
    const int n = 3 + rng.index(5);
    std::vector<SpdPoint> s1, s2;
    for (int i = 0; i < n; ++i) s1.push_back(oracles::random_spd(rng, m, 0.3, 3.0));
    for (int i = 0; i < n; ++i) {
      // geodesic nudge toward a random target keeps the perturbation small
      auto target = oracles::random_spd(rng, m, 0.3, 3.0);
      s2.push_back(geodesic(s1[static_cast<std::size_t>(i)], target, 0.02));
    }
    const double tol = 1e-5;
    auto b1 = min_enclosing_ball(s1, tol);
    auto b2 = min_enclosing_ball(s2, tol);
    CHECK(dist(b1.center, b2.center) <= hausdorff(s1, s2) + 2 * tol);
  }
}

TEST_CASE("two-point ball center is the geodesic midpoint") {
  Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 1 + rng.index(3);
    auto a = oracles::random_spd(rng, m);
    auto b = oracles::random_spd(rng, m);
    auto ball = min_enclosing_ball({a, b}, 1e-9);
    auto mid = geodesic(a, b, 0.5);
    CHECK(dist(ball.center, mid) < 1e-7);
  }
}

TEST_CASE("ball center is congruence equivariant") {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SpdPoint> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(oracles::random_spd(rng, 2, 0.5, 2.0));
    Eigen::MatrixXd l(2, 2);
    do {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) l(i, j) = rng.uniform(-1.5, 1.5);
    } while (std::abs(l.determinant()) < 0.3);
    std::vector<SpdPoint> moved;
    for (const auto& p : pts) moved.push_back(pullback(p, l));
    auto b1 = min_enclosing_ball(pts, 1e-9);
    auto b2 = min_enclosing_ball(moved, 1e-9);
    CHECK(dist(pullback(b1.center, l), b2.center) < 5e-6);
    CHECK(b1.radius == doctest::Approx(b2.radius).epsilon(1e-6));
  }
}

TEST_CASE("perturbation bound: scalar calculus and fitted constant") {
  Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(1, 1);
  auto [lhs0, rhs0] = perturbation_bound_check(SpdPoint::scalar(1.0), i1);
  CHECK(lhs0 == 0.0);
  CHECK(rhs0 == 0.0);

  for (double h : {0.01, 0.05, 0.1, -0.08}) {
    Eigen::MatrixXd l = (1.0 + h) * i1;
    auto [lhs, rhs] = perturbation_bound_check(SpdPoint::scalar(1.0), l);
    CHECK(lhs == doctest::Approx(2 * std::abs(std::log(1 + h))).epsilon(1e-12));
    CHECK(lhs <= 2.2 * std::abs(h));
    CHECK(rhs == doctest::Approx(std::abs(h)).epsilon(1e-12));
  }

  Rng rng(17);
  std::vector<std::pair<double, double>> pairs;
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + rng.index(3);
    auto tau = oracles::random_spd(rng, m, 0.1, 10.0);
    Eigen::MatrixXd e(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) e(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
    e *= rng.uniform(0.0, 0.1) / svd.singularValues()(0);
    auto [lhs, rhs] = perturbation_bound_check(tau, Eigen::MatrixXd::Identity(m, m) + e);
    if (rhs > 1e-12) pairs.emplace_back(lhs, rhs);
  }
  const double c1 = cocyclelab::diffeo::fit_inequality_constant(pairs);
  CHECK(std::isfinite(c1));
  CHECK(c1 < 25.0);
}
