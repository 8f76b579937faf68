#include "cocyclelab/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <memory>

namespace cocyclelab::holonomy {

using cocycle::Cocycle;
using cocycle::OrbitProducts;
using diffeo::CircleMap;
using sft::SftPoint;

namespace {

constexpr double kExactFloor = 1e-14;

struct LimitState {
  CircleMap h = CircleMap::identity();
  CircleMap h_inv = CircleMap::identity();
};

// Shared Cauchy-limit driver for both holonomy directions.  `advance` moves
// the two orbit products one step and must refresh the current H_n and its
// inverse.
HolonomyResult run_limit(const Cocycle& c, const HolonomyParams& p,
                         const std::function<void(LimitState&)>& advance,
                         const char* what) {
  if (!(p.r < c.q))
    throw cocycle::CocycleError("holonomy regularity r must satisfy r < q");
  HolonomyResult res;
  LimitState cur;  // H_0 = Id
  CircleMap id = CircleMap::identity();
  res.map = cur.h;
  res.map_inverse = cur.h_inv;
  std::deque<double> ratios;
  int non_decreasing = 0;
  for (long n = 0; n < p.n_max; ++n) {
    LimitState next = cur;
    double d = 0;
    try {
      advance(next);
      d = diffeo::dist_cr(cur.h, next.h, p.r, c.norms, &cur.h_inv, &next.h_inv);
      res.max_dist_to_id = std::max(
          res.max_dist_to_id,
          diffeo::dist_cr(next.h, id, p.r, c.norms, &next.h_inv, &id));
    } catch (const diffeo::MapError& e) {
      throw NoDecayError(std::string(what) + ": iterates diverged at step " +
                         std::to_string(n + 1) + " (" + e.what() + ")");
    }
    res.consecutive_dists.push_back(d);
    res.n_used = n + 1;
    res.map = next.h;
    res.map_inverse = next.h_inv;
    if (d <= kExactFloor) {  // stabilized exactly (locally constant families)
      res.theta_hat = 0;
      res.tail_bound = 0;
      return res;
    }
    if (d > 1e9)
      throw NoDecayError(std::string(what) + ": consecutive distances blew up");
    const auto& ds = res.consecutive_dists;
    if (ds.size() >= 2) {
      const double prev = ds[ds.size() - 2];
      if (prev > 0) {
        const double ratio = d / prev;
        ratios.push_back(ratio);
        if (ratios.size() > 5) ratios.pop_front();
        if (ratio >= 1.0) {
          if (++non_decreasing >= 10)
            throw NoDecayError(std::string(what) +
                               ": no decay over a 10-step window (hypotheses fail)");
        } else {
          non_decreasing = 0;
        }
        if (ratios.size() == 5 &&
            std::all_of(ratios.begin(), ratios.end(), [](double x) { return x < 1; })) {
          double lg = 0;
          for (double x : ratios) lg += std::log(x);
          res.theta_hat = std::exp(lg / 5.0);
          res.tail_bound = d * res.theta_hat / (1.0 - res.theta_hat);
          if (d < p.tol * (1.0 - res.theta_hat)) return res;
        }
      }
    }
    cur = next;
  }
  return res;  // n_max reached; tail_bound reflects the last fitted ratio
}

}  // namespace

HolonomyResult stable_holonomy(const Cocycle& c, const SftPoint& x, const SftPoint& y,
                               const HolonomyParams& p) {
  if (!sft::in_local_stable(x, y))
    throw cocycle::CocycleError("stable holonomy requires y in W^s_loc(x)");
  auto ox = std::make_shared<OrbitProducts>(c, x);
  auto oy = std::make_shared<OrbitProducts>(c, y);
  return run_limit(
      c, p,
      [ox, oy](LimitState& st) {
        ox->step_forward();
        oy->step_forward();
        st.h = compose(oy->forward_inverse(), ox->forward());
        st.h_inv = compose(ox->forward_inverse(), oy->forward());
      },
      "stable holonomy");
}

HolonomyResult unstable_holonomy(const Cocycle& c, const SftPoint& x, const SftPoint& y,
                                 const HolonomyParams& p) {
  if (!sft::in_local_unstable(x, y))
    throw cocycle::CocycleError("unstable holonomy requires y in W^u_loc(x)");
  auto ox = std::make_shared<OrbitProducts>(c, x);
  auto oy = std::make_shared<OrbitProducts>(c, y);
  return run_limit(
      c, p,
      [ox, oy](LimitState& st) {
        ox->step_backward();
        oy->step_backward();
        st.h = compose(oy->backward_inverse(), ox->backward());
        st.h_inv = compose(ox->backward_inverse(), oy->backward());
      },
      "unstable holonomy");
}

double verify_H1(const Cocycle& c, const SftPoint& x, const SftPoint& y,
                 const SftPoint& z, const HolonomyParams& p) {
  HolonomyResult hxy = stable_holonomy(c, x, y, p);
  HolonomyResult hyz = stable_holonomy(c, y, z, p);
  HolonomyResult hxz = stable_holonomy(c, x, z, p);
  CircleMap lhs = compose(hyz.map, hxy.map);
  CircleMap lhs_inv = compose(hxy.map_inverse, hyz.map_inverse);
  return diffeo::dist_cr(lhs, hxz.map, p.r, c.norms, &lhs_inv, &hxz.map_inverse);
}

double verify_H2(const Cocycle& c, const SftPoint& x, const SftPoint& y, long n,
                 const HolonomyParams& p) {
  if (n < 1) throw cocycle::CocycleError("verify_H2 requires n >= 1");
  HolonomyResult lhs = stable_holonomy(c, x, y, p);
  HolonomyResult shifted = stable_holonomy(c, shift(x, n), shift(y, n), p);
  OrbitProducts ox(c, x), oy(c, y);
  for (long i = 0; i < n; ++i) {
    ox.step_forward();
    oy.step_forward();
  }
  CircleMap rhs = compose(oy.forward_inverse(), compose(shifted.map, ox.forward()));
  CircleMap rhs_inv =
      compose(ox.forward_inverse(), compose(shifted.map_inverse, oy.forward()));
  return diffeo::dist_cr(lhs.map, rhs, p.r, c.norms, &lhs.map_inverse, &rhs_inv);
}

H3Fit fit_H3(const Cocycle& c,
             const std::vector<std::pair<SftPoint, SftPoint>>& stable_pairs,
             double beta_rho, const HolonomyParams& p) {
  if (stable_pairs.empty()) throw cocycle::CocycleError("empty stable pair sample");
  H3Fit out;
  CircleMap id = CircleMap::identity();
  std::vector<std::pair<double, double>> xy;
  std::vector<std::pair<double, double>> final_vs_pow;  // (dist, d^{beta rho})
  std::vector<std::pair<double, double>> inter_vs_pow;  // (sup_n dist, d^{beta rho})
  for (const auto& [x, y] : stable_pairs) {
    const double d = sft::metric(x, y);
    if (d == 0) continue;
    HolonomyResult h = stable_holonomy(c, x, y, p);
    const double v = diffeo::dist_cr(h.map, id, p.r, c.norms, &h.map_inverse, &id);
    if (v <= 0) {
      ++out.zero_pairs;
      continue;
    }
    xy.emplace_back(d, v);
    final_vs_pow.emplace_back(v, std::pow(d, beta_rho));
    inter_vs_pow.emplace_back(h.max_dist_to_id, std::pow(d, beta_rho));
  }
  if (xy.empty()) {
    out.exact = true;
    out.fit.degenerate = true;
    return out;
  }
  out.fit = diffeo::loglog_fit(xy);
  out.uniform_constant = diffeo::fit_inequality_constant(final_vs_pow);
  for (const auto& [sup_n, pow_d] : inter_vs_pow)
    if (sup_n > 1.1 * out.uniform_constant * pow_d) out.intermediate_bound_ok = false;
  return out;
}

SkewContraction skew_stable_contraction(const Cocycle& c, const SftPoint& x, double t,
                                        const SftPoint& y, long n_max,
                                        const HolonomyParams& p) {
  SkewContraction out;
  HolonomyResult h = stable_holonomy(c, x, y, p);
  const double t_prime = diffeo::wrap01(h.map.lift(t));
  OrbitProducts ox(c, x), oy(c, y);
  for (long n = 1; n <= n_max; ++n) {
    ox.step_forward();
    oy.step_forward();
    const double base_d = sft::metric(shift(x, n), shift(y, n));
    const double ax = diffeo::wrap01(ox.forward().lift(t));
    const double ay = diffeo::wrap01(oy.forward().lift(t_prime));
    out.dists.push_back(base_d + diffeo::circle_dist(ax, ay));
    HolonomyResult hn = stable_holonomy(c, shift(x, n), shift(y, n), p);
    out.crosscheck_sup = std::max(
        out.crosscheck_sup, diffeo::circle_dist(ay, diffeo::wrap01(hn.map.lift(ax))));
  }
  return out;
}

}  // namespace cocyclelab::holonomy
