#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cocyclelab/norms.hpp"
#include "cocyclelab/rng.hpp"
#include "oracles.hpp"

using namespace cocyclelab::diffeo;
using cocyclelab::Rng;

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;
}

TEST_CASE("identity and rotation norms") {
  auto id = CircleMap::identity();
  auto rep = norm_report(id, 1.5);
  CHECK(rep.sup_displacement == 0.0);
  CHECK(rep.deriv_sups.at(0) == 1.0);
  CHECK(rep.holder_seminorm == 0.0);
  CHECK(rep.one_sided == 1.0);
  CHECK(rep.two_sided == 2.0);

  for (double a : {0.2, 0.45, 0.8}) {
    auto rr = norm_report(CircleMap::rotation(a), 1.25);
    const double disp = std::min(a, 1.0 - a);
    CHECK(rr.one_sided == doctest::Approx(disp + 1.0).epsilon(1e-12));
    CHECK(rr.holder_seminorm == 0.0);
    CHECK(rr.two_sided == doctest::Approx(2 * (disp + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("norm of a smooth sine map against a refined grid") {
  auto f = [](double t) { return t + 0.1 * std::sin(kTau * t) / kTau; };
  auto g = CircleMap::grid_from_function(1024, f);
  NormParams coarse{0.25, 4096}, fine{0.25, 16384};
  auto a = norm_report(g, 2.0, coarse);
  auto b = norm_report(g, 2.0, fine);
  CHECK(a.one_sided == doctest::Approx(b.one_sided).epsilon(1e-4));
  CHECK(a.two_sided == doctest::Approx(b.two_sided).epsilon(1e-4));
  // analytic values: sup disp = 0.1/tau, sup|D1| = 1.1, sup|D2| = 0.1*tau
  CHECK(a.sup_displacement == doctest::Approx(0.1 / kTau).epsilon(1e-6));
  CHECK(a.deriv_sups.at(0) == doctest::Approx(1.1).epsilon(1e-8));
  CHECK(a.deriv_sups.at(1) == doctest::Approx(0.1 * kTau).epsilon(1e-6));
}

TEST_CASE("holder seminorm converges under refinement and respects eps0") {
  auto g = CircleMap::grid_from_function(512, [](double t) {
    return t + 0.05 * std::sin(kTau * t) / kTau + 0.01 * std::sin(2 * kTau * t) / kTau;
  });
  NormParams p1{0.25, 2048}, p2{0.25, 8192};
  auto r1 = norm_report(g, 1.5, p1);
  auto r2 = norm_report(g, 1.5, p2);
  CHECK(r1.holder_seminorm <= r2.holder_seminorm + 1e-12);  // grid pairs only: lower bound
  CHECK(r2.holder_seminorm == doctest::Approx(r1.holder_seminorm).epsilon(0.01));
}

TEST_CASE("dist_cr on rotations matches the closed form") {
  CHECK(dist_cr(CircleMap::rotation(0.5), CircleMap::rotation(0.5), 1.5) == 0.0);
  const double d = dist_cr(CircleMap::rotation(0.30), CircleMap::rotation(0.32), 1.0);
  CHECK(d == doctest::Approx(0.04).epsilon(1e-12));
  // maps half a circle apart cannot be aligned
  CHECK_THROWS_AS(dist_cr(CircleMap::rotation(0.0), CircleMap::rotation(0.5), 1.0),
                  MapError);
}

TEST_CASE("dist_cr triangle inequality on close random triples") {
  Rng rng(2718);
  NormParams p{0.25, 1024};
  for (int trial = 0; trial < 100; ++trial) {
    auto base = oracles::random_smooth_map(rng, 256, 4, 0.3);
    auto bump = [&](double eps) {
      Eigen::VectorXd c(2), s(2);
      c << eps * rng.uniform(-1, 1), 0.3 * eps * rng.uniform(-1, 1);
      s << eps * rng.uniform(-1, 1), 0.3 * eps * rng.uniform(-1, 1);
      return CircleMap::grid_from_fourier(256, eps * rng.uniform(-1, 1), c, s);
    };
    auto g = compose(bump(0.01), base);
    auto h = compose(bump(0.01), base);
    auto k = compose(bump(0.01), base);
    const double dgh = dist_cr(g, h, 1.5, p);
    const double dhk = dist_cr(h, k, 1.5, p);
    const double dgk = dist_cr(g, k, 1.5, p);
    CHECK(dgk <= dgh + dhk + 1e-12);
    CHECK(dgh == doctest::Approx(dist_cr(h, g, 1.5, p)).epsilon(1e-12));
  }
}

TEST_CASE("fit_inequality_constant basics") {
  CHECK(fit_inequality_constant({{1, 2}, {3, 2}}) == doctest::Approx(1.5));
  CHECK(fit_inequality_constant({{0, 1}, {0, 5}}) == 0.0);
  CHECK_THROWS_AS(fit_inequality_constant({}), MapError);
  CHECK_THROWS_AS(fit_inequality_constant({{1.0, 0.0}}), MapError);
}

TEST_CASE("composition norm estimate: fitted constant finite and grid stable") {
  // ||h o g||_{C^r} <= M_r ||h||_{C^r} (1 + ||g||_{C^r})^r over random pairs
  for (double r : {1.0, 1.5}) {
    double fitted_coarse = 0, fitted_fine = 0;
    for (int pass = 0; pass < 2; ++pass) {
      const int n = pass == 0 ? 1024 : 4096;
      Rng rng(1234);  // same maps, two storage grids
      std::vector<std::pair<double, double>> pairs;
      NormParams p{0.25, 4096};
      for (int i = 0; i < 40; ++i) {
        auto g = oracles::random_smooth_map(rng, n, 5);
        auto h = oracles::random_smooth_map(rng, n, 5);
        const double lhs = one_sided_norm(compose(h, g), r, p);
        const double rhs =
            one_sided_norm(h, r, p) * std::pow(1.0 + one_sided_norm(g, r, p), r);
        pairs.emplace_back(lhs, rhs);
      }
      (pass == 0 ? fitted_coarse : fitted_fine) = fit_inequality_constant(pairs);
    }
    CHECK(fitted_coarse > 0);
    CHECK(std::isfinite(fitted_coarse));
    CHECK(fitted_fine == doctest::Approx(fitted_coarse).epsilon(0.05));
  }
}

TEST_CASE("loglog fit recovers a power law") {
  std::vector<std::pair<double, double>> xy;
  for (int i = 1; i <= 20; ++i) {
    const double x = std::pow(0.5, i * 0.4);
    xy.emplace_back(x, 3.0 * std::pow(x, 1.7));
  }
  auto fit = loglog_fit(xy);
  CHECK(!fit.degenerate);
  CHECK(fit.slope == doctest::Approx(1.7).epsilon(1e-10));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(loglog_fit({{1.0, 2.0}}).degenerate);
}
