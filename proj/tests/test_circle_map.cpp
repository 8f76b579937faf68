#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cocyclelab/circle_map.hpp"
#include "cocyclelab/rng.hpp"
#include "oracles.hpp"

using namespace cocyclelab::diffeo;
using cocyclelab::Rng;

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;
}

TEST_CASE("rotation composition adds angles") {
  auto g = compose(CircleMap::rotation(0.3), CircleMap::rotation(0.45));
  CHECK(g.is_rotation());
  CHECK(g.rotation_rep().angle == doctest::Approx(0.75).epsilon(1e-15));

  auto h = compose(CircleMap::rotation(0.3), CircleMap::identity());
  CHECK(h.lift(0.2) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("moebius composition is the matrix product up to sign") {
  Eigen::Matrix2d a, b;
  a << 1.2, 0.0, 0.0, 1.0 / 1.2;
  b << std::cosh(0.3), std::sinh(0.3), std::sinh(0.3), std::cosh(0.3);
  auto g = compose(CircleMap::moebius(a), CircleMap::moebius(b));
  CHECK(g.is_moebius());
  Eigen::Matrix2d prod = a * b;
  const auto& m = g.moebius_rep().m;
  const double scale = prod(0, 0) / m(0, 0);
  CHECK(std::abs(std::abs(scale) - 1.0) < 1e-12);
  CHECK((prod - scale * m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("moebius boundary action fixed points and multipliers") {
  Eigen::Matrix2d hy;
  hy << 1.2, 0, 0, 1.0 / 1.2;
  auto h = CircleMap::moebius(hy);
  CHECK(h.lift(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(h.lift(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(h.derivative(1, 0.0) == doctest::Approx(1.0 / 1.44).epsilon(1e-13));
  CHECK(h.derivative(1, 0.5) == doctest::Approx(1.44).epsilon(1e-13));
  CHECK_THROWS_AS(h.derivative(4, 0.1), MapError);
}

TEST_CASE("rotation derivatives are constant") {
  auto r = CircleMap::rotation(0.37);
  for (double t : {0.0, 0.21, 0.99}) {
    CHECK(r.derivative(1, t) == 1.0);
    CHECK(r.derivative(2, t) == 0.0);
    CHECK(r.derivative(3, t) == 0.0);
  }
}

TEST_CASE("grid map reproduces a band-limited displacement exactly") {
  auto g = CircleMap::grid_from_function(64, [](double t) {
    return t + 0.1 * std::sin(kTau * t) / kTau;
  });
  for (double t : {0.0, 0.33, 0.71, 0.999}) {
    CHECK(g.lift(t) ==
          doctest::Approx(t + 0.1 * std::sin(kTau * t) / kTau).epsilon(1e-13));
    CHECK(g.derivative(1, t) ==
          doctest::Approx(1 + 0.1 * std::cos(kTau * t)).epsilon(1e-12));
  }
  CHECK(g.lift(1.25) == doctest::Approx(1.0 + g.lift(0.25)).epsilon(1e-12));
}

TEST_CASE("spectral derivatives match finite differences on band-limited maps") {
  // gentle two-mode displacement keeps the FD oracle's truncation error
  // (~ h^2 |D^4 phi| / 12) well below the tolerance
  Eigen::VectorXd c(2), s(2);
  c << 0.0, 0.005;
  s << 0.02, 0.0;
  auto g = CircleMap::grid_from_fourier(1024, 0.07, c, s);
  Rng rng(4321);
  for (int i = 0; i < 64; ++i) {
    const double t = rng.uniform();
    CHECK(std::abs(g.derivative(2, t) - oracles::fd_derivative(g, 2, t)) < 1e-6);
    CHECK(std::abs(g.derivative(1, t) - oracles::fd_derivative(g, 1, t)) < 1e-7);
  }
}

TEST_CASE("inversion round trips") {
  CHECK(invert(CircleMap::rotation(0.3)).rotation_rep().angle ==
        doctest::Approx(0.7).epsilon(1e-15));
  CHECK(invert(CircleMap::identity()).lift(0.4) == doctest::Approx(0.4));

  Rng rng(77);
  auto g = oracles::random_smooth_map(rng, 1024, 5);
  auto gi = invert(g);
  double worst = 0;
  for (int i = 0; i < 257; ++i) {
    const double t = i / 257.0;
    worst = std::max(worst, std::abs(g.lift(gi.lift(t)) - t));
    worst = std::max(worst, std::abs(gi.lift(g.lift(t)) - t));
  }
  CHECK(worst < 1e-10);

  auto gii = invert(invert(g));
  double diff = 0;
  for (int i = 0; i < 257; ++i) {
    const double t = i / 257.0;
    diff = std::max(diff, std::abs(gii.lift(t) - g.lift(t)));
  }
  CHECK(diff < 1e-10);
}

TEST_CASE("composition is associative within grid tolerance") {
  Rng rng(5150);
  for (int trial = 0; trial < 6; ++trial) {
    auto a = oracles::random_smooth_map(rng, 512, 4);
    auto b = oracles::random_smooth_map(rng, 512, 4);
    auto c = oracles::random_smooth_map(rng, 512, 4);
    auto lhs = compose(compose(a, b), c);
    auto rhs = compose(a, compose(b, c));
    double diff = 0;
    for (int i = 0; i < 173; ++i) {
      const double t = i / 173.0;
      diff = std::max(diff, std::abs(lhs.lift(t) - rhs.lift(t)));
    }
    CHECK(diff < 1e-9);
  }
  auto m = CircleMap::moebius_boost(0.4);
  auto r1 = CircleMap::rotation(0.3), r2 = CircleMap::rotation(0.9);
  auto lhs = compose(compose(m, r1), r2);
  auto rhs = compose(m, compose(r1, r2));
  for (double t : {0.1, 0.6})
    CHECK(lhs.lift(t) == doctest::Approx(rhs.lift(t)).epsilon(1e-14));
}

TEST_CASE("mixed rotation/moebius composition stays exact") {
  auto m = CircleMap::moebius_boost(0.2);
  auto r = CircleMap::rotation(0.3);
  auto back = compose(invert(m), compose(m, r));
  CHECK(back.is_moebius());
  for (double t : {0.05, 0.44, 0.93})
    CHECK(wrap01(back.lift(t)) == doctest::Approx(wrap01(t + 0.3)).epsilon(1e-13));
}

TEST_CASE("derivative floor rejects collapsing grid maps") {
  Eigen::ArrayXd disp(16);
  for (int j = 0; j < 16; ++j) disp(j) = -1.2 * std::sin(kTau * j / 16.0) / kTau;
  // displacement slope -1.2 drives F' = 1 + phi' below the floor
  CHECK_THROWS_AS(CircleMap::grid_from_displacement(disp), MapError);
}

TEST_CASE("grid resampling agrees with direct evaluation") {
  Rng rng(31);
  auto g = oracles::random_smooth_map(rng, 256, 5);
  auto up = g.derivative_grid(1, 1024);
  for (int j = 0; j < 1024; j += 37)
    CHECK(up(j) == doctest::Approx(g.derivative(1, j / 1024.0)).epsilon(1e-11));
  auto down = to_grid(g, 128);
  for (int j = 0; j < 128; ++j)
    CHECK(down.lift(j / 128.0) == doctest::Approx(g.lift(j / 128.0)).epsilon(1e-11));
}
