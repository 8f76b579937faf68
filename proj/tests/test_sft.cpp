#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cocyclelab/sft.hpp"

using namespace cocyclelab::sft;

namespace {

SpacePtr full2() { return full_shift(2, 0.5); }
SpacePtr golden() { return golden_mean_shift(0.5); }

SftPoint zeros(const SpacePtr& sp) { return periodic_point(sp, "0"); }

}  // namespace

TEST_CASE("space validation") {
  CHECK(full2()->mixing_power() == 1);
  CHECK(golden()->mixing_power() == 2);
  Eigen::MatrixXi dead(2, 2);
  dead << 1, 1, 0, 0;  // column 0 unreachable from symbol 1, row 1 dead
  CHECK_THROWS_AS(make_space(dead, 0.5), SftError);
  Eigen::MatrixXi perm(2, 2);
  perm << 0, 1, 1, 0;  // periodic, not mixing
  CHECK_THROWS_AS(make_space(perm, 0.5), SftError);
}

TEST_CASE("shift acts by index arithmetic") {
  auto sp = full2();
  auto x = zeros(sp);
  CHECK(metric(shift(x, 0), x) == 0.0);
  CHECK(metric(shift(x, 5), x) == 0.0);  // fixed point of the shift

  SftPoint y(sp, "0", "01", 0, "0");
  auto y1 = shift(y, 1);
  CHECK(y1.symbol_at(-1) == 0);
  CHECK(y1.symbol_at(0) == 1);
  for (int i = -6; i <= 6; ++i) CHECK(y1.symbol_at(i) == y.symbol_at(i + 1));

  // composition law on indices
  auto a = shift(shift(y, 3), -5);
  auto b = shift(y, -2);
  CHECK(metric(a, b) == 0.0);
}

TEST_CASE("metric is lambda^{first disagreement}") {
  auto sp = full2();
  auto x = zeros(sp);
  CHECK(metric(x, x) == 0.0);

  SftPoint y(sp, "0", "1", 2, "0");  // differs from zeros only at index 2
  CHECK(metric(x, y) == 0.25);
  SftPoint z(sp, "0", "1", -3, "0");
  CHECK(metric(x, z) == 0.125);

  CHECK_THROWS_AS(metric(x, zeros(golden())), SftError);
}

TEST_CASE("metric axioms and ultrametric inequality on sampled triples") {
  auto sp = full2();
  std::vector<SftPoint> pts;
  pts.push_back(zeros(sp));
  pts.push_back(periodic_point(sp, "01"));
  pts.push_back(periodic_point(sp, "001"));
  pts.push_back(SftPoint(sp, "0", "11010", -2, "10"));
  pts.push_back(SftPoint(sp, "01", "0", 0, "1"));
  for (const auto& a : pts)
    for (const auto& b : pts) {
      CHECK(metric(a, b) == metric(b, a));
      if (metric(a, b) == 0.0) CHECK(same_point(a, b));
      for (const auto& c : pts)
        CHECK(metric(a, c) <= std::max(metric(a, b), metric(b, c)));
    }
}

TEST_CASE("bracket splices future of x with past of z") {
  auto sp = full2();
  auto x = zeros(sp);
  CHECK(metric(bracket(x, x), x) == 0.0);

  SftPoint z(sp, "1", "0", 0, "0");  // ..111 0 000.. with z_0 = 0
  auto y = bracket(x, z);
  for (int i = 0; i <= 8; ++i) CHECK(y.symbol_at(i) == x.symbol_at(i));
  for (int i = -8; i <= 0; ++i) CHECK(y.symbol_at(i) == z.symbol_at(i));
  CHECK(metric(y, z) == 0.0);  // example: the splice equals z here

  SftPoint x2(sp, "0", "01", 0, "0");   // x_0 = 0, x_1 = 1
  SftPoint z2(sp, "0", "10", -1, "0");  // z_{-1} = 1, z_0 = 0
  auto y2 = bracket(x2, z2);
  CHECK(y2.symbol_at(1) == 1);
  CHECK(y2.symbol_at(-1) == 1);
  CHECK(y2.symbol_at(0) == 0);

  SftPoint w(sp, "1", "1", 0, "1");
  CHECK_THROWS_AS(bracket(x, w), SftError);  // x_0 != w_0

  // idempotence: bracket(x, bracket(x,z)) = bracket(x,z)
  CHECK(metric(bracket(x2, bracket(x2, z2)), bracket(x2, z2)) == 0.0);
}

TEST_CASE("stable and unstable scaling is exact") {
  auto sp = full2();
  auto x = zeros(sp);
  SftPoint y(sp, "1", "0", 0, "0");  // agrees with x for i >= 0, differs at -1
  CHECK(in_local_stable(x, y));
  CHECK(metric(x, y) == 0.5);
  for (int n = 0; n <= 20; ++n)
    CHECK(stable_contraction_check(x, y, n) == std::pow(0.5, n) * metric(x, y));
  CHECK(stable_contraction_check(x, x, 7) == 0.0);

  SftPoint u(sp, "0", "1", 2, "0");  // unstable-side partner: differs at +2
  CHECK(in_local_unstable(x, u));
  for (int n = 0; n <= 10; ++n)
    CHECK(metric(shift(x, -n), shift(u, -n)) == std::pow(0.5, n) * metric(x, u));

  CHECK_THROWS_AS(stable_contraction_check(x, u, 1), SftError);
}

TEST_CASE("closing lemma with constant 1, exactly") {
  auto sp = full2();
  // x agreeing with shift(x,4) on |i| <= 3
  SftPoint x(sp, "0", "0110011", -3, "0");
  REQUIRE(x.symbol_at(0) == x.symbol_at(4));
  auto p = closing(x, 4);
  CHECK(metric(shift(p, 4), p) == 0.0);
  const double d = metric(x, shift(x, 4));
  for (int i = 0; i <= 4; ++i) CHECK(metric(shift(x, i), shift(p, i)) <= d);

  // golden mean: admissible wrap
  auto gm = golden();
  SftPoint g(gm, "0", "0100", 0, "0");
  auto pg = closing(g, 3);
  CHECK(metric(pg, periodic_point(gm, "010")) == 0.0);

  SftPoint bad(gm, "0", "01", 0, "0");  // x_0 = 0, x_1 = 1: closing at k=1 undefined
  CHECK_THROWS_AS(closing(bad, 1), SftError);

  // already periodic
  auto per = periodic_point(sp, "0110");
  CHECK(metric(closing(per, 4), per) == 0.0);
}

TEST_CASE("randomized closing bound, 500 cases") {
  auto sp = full2();
  cocyclelab::Rng rng(99);
  int done = 0;
  while (done < 500) {
    const int k = 1 + rng.index(6);
    std::string w;
    for (int i = 0; i < k + 8; ++i) w.push_back(char('0' + rng.index(2)));
    SftPoint x(sp, "0", w, -4, "0");
    if (x.symbol_at(0) != x.symbol_at(k)) continue;
    auto p = closing(x, k);
    const double d = metric(x, shift(x, k));
    for (int i = 0; i <= k; ++i) CHECK(metric(shift(x, i), shift(p, i)) <= d);
    ++done;
  }
}

TEST_CASE("periodic point counts match traces") {
  auto sp = full2();
  auto gm = golden();
  Eigen::MatrixXi m3(3, 3);
  m3 << 1, 1, 0, 0, 1, 1, 1, 0, 1;
  auto s3 = make_space(m3, 0.5);

  CHECK(periodic_point_count(*sp, 1) == 2);
  CHECK(periodic_point_count(*sp, 3) == 8);
  CHECK(periodic_point_count(*gm, 4) == 7);

  for (const auto& space : {sp, gm, s3}) {
    auto pts = periodic_points(space, 8);
    for (int k = 1; k <= 8; ++k) {
      std::int64_t count = 0;
      for (const auto& [p, d] : pts)
        if (k % d == 0) ++count;
      CHECK(count == periodic_point_count(*space, k));
    }
    for (const auto& [p, d] : pts) {
      CHECK(metric(shift(p, d), p) == 0.0);
      for (int j = 1; j < d; ++j) CHECK(metric(shift(p, j), p) > 0.0);
    }
  }
}

TEST_CASE("dense orbit visits every cylinder") {
  for (auto space : {full2(), golden()}) {
    for (int L : {0, 1}) {
      auto z = dense_orbit_point(space, L);
      auto words = admissible_words(*space, 2 * L + 1);
      std::set<std::string> wanted(words.begin(), words.end());
      for (int n = L; n <= 4000 && !wanted.empty(); ++n)
        wanted.erase(shift(z, n).window(-L, L));
      CHECK(wanted.empty());
    }
  }
}

TEST_CASE("parry measure: perron data and cylinder frequencies") {
  auto mu2 = parry_measure(full2());
  CHECK(mu2.perron_root == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mu2.stationary(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cylinder_measure(mu2, "01") == doctest::Approx(0.25).epsilon(1e-12));

  auto mug = parry_measure(golden());
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(mug.perron_root == doctest::Approx(phi).epsilon(1e-12));

  // row-stochastic and stationary to 1e-12
  for (auto mu : {mu2, mug}) {
    const int k = mu.space->alphabet_size();
    for (int i = 0; i < k; ++i)
      CHECK(mu.kernel.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::VectorXd piP = mu.kernel.transpose() * mu.stationary;
    for (int i = 0; i < k; ++i)
      CHECK(piP(i) == doctest::Approx(mu.stationary(i)).epsilon(1e-12));
    CHECK(mu.stationary.minCoeff() > 0);
  }

  // empirical one- and two-symbol frequencies vs closed form, 3 sigma
  auto pts = sample(mug, 777, 100000, 4);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd single = Eigen::VectorXd::Zero(2);
  for (const auto& p : pts) {
    single(p.symbol_at(0)) += 1;
    counts(p.symbol_at(0), p.symbol_at(1)) += 1;
  }
  const double n = static_cast<double>(pts.size());
  for (int i = 0; i < 2; ++i) {
    const double pi = mug.stationary(i);
    const double se = std::sqrt(pi * (1 - pi) / n);
    CHECK(std::abs(single(i) / n - pi) <= 3 * se);
    for (int j = 0; j < 2; ++j) {
      const double pij = pi * mug.kernel(i, j);
      if (pij == 0) {
        CHECK(counts(i, j) == 0);
        continue;
      }
      const double se2 = std::sqrt(pij * (1 - pij) / n);
      CHECK(std::abs(counts(i, j) / n - pij) <= 3 * se2);
    }
  }

  // determinism of sampling
  auto again = sample(mug, 777, 50, 4);
  auto first = sample(mug, 777, 50, 4);
  for (int i = 0; i < 50; ++i)
    CHECK(first[static_cast<std::size_t>(i)].serialize() ==
          again[static_cast<std::size_t>(i)].serialize());
}

TEST_CASE("point serialization round trip") {
  auto sp = golden();
  SftPoint x(sp, "01", "00100", -2, "0");
  auto y = SftPoint::parse(sp, x.serialize());
  CHECK(metric(x, y) == 0.0);
  CHECK(x.serialize() == y.serialize());
  CHECK(x.serialize() == "01|00100@-2|0");
}

TEST_CASE("surgery partners sit at exact dyadic distances") {
  auto sp = full2();
  SftPoint x(sp, "0", "0110100", -3, "10");
  for (int depth = 1; depth <= 10; ++depth) {
    auto ys = stable_partner(x, depth);
    REQUIRE(ys.has_value());
    CHECK(in_local_stable(x, *ys));
    CHECK(metric(x, *ys) == std::pow(0.5, depth));
    auto yu = unstable_partner(x, depth);
    REQUIRE(yu.has_value());
    CHECK(in_local_unstable(x, *yu));
    CHECK(metric(x, *yu) == std::pow(0.5, depth));
  }
  // golden mean: a forced position returns nothing instead of garbage
  auto gm = golden();
  SftPoint g(gm, "0", "0101", -2, "0");  // positions before each 1 are forced to 0
  for (int depth = 1; depth <= 2; ++depth) {
    auto y = stable_partner(g, depth);
    if (y) {
      CHECK(in_local_stable(g, *y));
      CHECK(metric(g, *y) == std::pow(0.5, depth));
    }
  }
}
