#include "cocyclelab/invariant_metric.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cocyclelab::invmetric {

using cocycle::Cocycle;
using diffeo::CircleMap;
using sft::SftPoint;

namespace {

// Orbit generator maps around x, fetched once per row.
struct OrbitMaps {
  std::vector<CircleMap> fwd;      // A(f^i x), i = 0..k-1
  std::vector<CircleMap> bwd;      // A(f^{-j} x), j = 1..k
  std::vector<CircleMap> bwd_inv;  // A(f^{-j} x)^{-1}
};

OrbitMaps orbit_maps(const Cocycle& c, const SftPoint& x, int k) {
  OrbitMaps m;
  m.fwd.reserve(static_cast<std::size_t>(k));
  m.bwd.reserve(static_cast<std::size_t>(k));
  m.bwd_inv.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) m.fwd.push_back(c.gen.value(shift(x, i)));
  for (int j = 1; j <= k; ++j) {
    SftPoint at = shift(x, -j);
    m.bwd.push_back(c.gen.value(at));
    m.bwd_inv.push_back(c.gen.value_inverse(at));
  }
  return m;
}

// log pullback entries 2 * log D_t A_x^n for n = -k..k at a single t, via the
// chain rule in log space.  Returns extremes over the window [lo, hi] and
// optionally records running extremes at checkpoints.
struct WalkResult {
  double lo_log = 0, hi_log = 0;
};

WalkResult walk_extremes(const OrbitMaps& m, double t, int lo, int hi,
                         double log_cap, double* at_half = nullptr,
                         double* at_last = nullptr) {
  double mn = 0, mx = 0;
  bool have = false;
  auto add = [&](double v) {
    if (std::abs(v) > 2 * log_cap)
      throw FieldError("log pullback out of range; cocycle appears unbounded");
    if (!have) {
      mn = mx = v;
      have = true;
    } else {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  };
  if (lo <= 0 && 0 <= hi) add(0.0);
  const int k_fwd = std::max(0, hi);
  const int k_bwd = std::max(0, -lo);
  const int k = std::max(k_fwd, k_bwd);
  const int half = k / 2, last = k - 1;
  double uf = 0, ub = 0, tf = t, tb = t;
  for (int n = 1; n <= k; ++n) {
    if (n <= k_fwd) {
      const CircleMap& g = m.fwd[static_cast<std::size_t>(n - 1)];
      uf += std::log(g.derivative(1, tf));
      tf = diffeo::wrap01(g.lift(tf));
      if (n >= std::max(1, lo)) add(2 * uf);
    }
    if (n <= k_bwd) {
      const CircleMap& gi = m.bwd_inv[static_cast<std::size_t>(n - 1)];
      tb = diffeo::wrap01(gi.lift(tb));
      ub -= std::log(m.bwd[static_cast<std::size_t>(n - 1)].derivative(1, tb));
      if (-n <= std::min(-1, hi)) add(2 * ub);
    }
    if (at_half && n == half) *at_half = 0.5 * (mn + mx);
    if (at_last && n == last) *at_last = 0.5 * (mn + mx);
  }
  return {mn, mx};
}

double log_tau_window(const Cocycle& c, const SftPoint& x, double t, int lo, int hi,
                      double cap) {
  OrbitMaps m = orbit_maps(c, x, std::max(std::max(0, hi), std::max(0, -lo)));
  WalkResult w = walk_extremes(m, t, lo, hi, cap);
  return 0.5 * (w.lo_log + w.hi_log);
}

}  // namespace

std::vector<spd::SpdPoint> orbit_pullbacks(const Cocycle& c, const SftPoint& x,
                                           double t, int k) {
  OrbitMaps m = orbit_maps(c, x, k);
  std::vector<spd::SpdPoint> out;
  out.reserve(static_cast<std::size_t>(2 * k + 1));
  std::vector<double> logs(static_cast<std::size_t>(2 * k + 1), 0.0);
  double uf = 0, ub = 0, tf = t, tb = t;
  for (int n = 1; n <= k; ++n) {
    const CircleMap& g = m.fwd[static_cast<std::size_t>(n - 1)];
    uf += std::log(g.derivative(1, tf));
    tf = diffeo::wrap01(g.lift(tf));
    logs[static_cast<std::size_t>(k + n)] = 2 * uf;
    const CircleMap& gi = m.bwd_inv[static_cast<std::size_t>(n - 1)];
    tb = diffeo::wrap01(gi.lift(tb));
    ub -= std::log(m.bwd[static_cast<std::size_t>(n - 1)].derivative(1, tb));
    logs[static_cast<std::size_t>(k - n)] = 2 * ub;
  }
  for (double lv : logs) {
    if (std::abs(lv) > 21.0)  // exp out of SpdPoint validity range
      throw FieldError("orbit pullback left the representable SPD range");
    out.push_back(spd::SpdPoint::scalar(std::exp(lv)));
  }
  return out;
}

double tau_hat(const Cocycle& c, const SftPoint& x, double t, int k) {
  return std::exp(log_tau_window(c, x, t, -k, k, 80.0));
}

double tau_hat_window(const Cocycle& c, const SftPoint& x, double t, int lo, int hi) {
  return std::exp(log_tau_window(c, x, t, lo, hi, 80.0));
}

double invariance_defect(const Cocycle& c, const SftPoint& x, double t, int k) {
  CircleMap a = c.gen.value(x);
  const double da = a.derivative(1, t);
  const double t_next = diffeo::wrap01(a.lift(t));
  const double lhs = log_tau_window(c, shift(x, 1), t_next, -k, k, 80.0);
  const double rhs = log_tau_window(c, x, t, -k, k, 80.0);
  return std::abs(lhs + 2 * std::log(da) - rhs);
}

Eigen::ArrayXd log_density_row(const Cocycle& c, const SftPoint& x,
                               const FieldParams& p, RowDiag* diag) {
  OrbitMaps m = orbit_maps(c, x, p.horizon);
  const int n = p.fiber_grid;
  Eigen::ArrayXd row(n);
  RowDiag d;
  for (int j = 0; j < n; ++j) {
    double at_half = 0, at_last = 0;
    WalkResult w = walk_extremes(m, double(j) / n, -p.horizon, p.horizon,
                                 p.log_range_cap, &at_half, &at_last);
    row(j) = 0.5 * (w.lo_log + w.hi_log);
    d.gap_half = std::max(d.gap_half, std::abs(row(j) - at_half));
    d.gap_last = std::max(d.gap_last, std::abs(row(j) - at_last));
  }
  for (int j = 0; j < n; ++j)
    d.interp_osc = std::max(d.interp_osc, std::abs(row((j + 1) % n) - row(j)));
  if (diag) *diag = d;
  return row;
}

double interp_log_density(const Eigen::ArrayXd& row, double t) {
  const int n = static_cast<int>(row.size());
  const double u = diffeo::wrap01(t) * n;
  const int j = std::min(static_cast<int>(u), n - 1);
  const double frac = u - j;
  return (1.0 - frac) * row(j) + frac * row((j + 1) % n);
}

int MetricField::find(const SftPoint& x) const {
  const std::string key = x.serialize();
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (keys[i] == key) return static_cast<int>(i);
  return -1;
}

MetricField build_field(const Cocycle& c, const std::vector<SftPoint>& samples,
                        const FieldParams& p) {
  MetricField f{c, p, {}, {}, {}, {}};
  std::set<std::string> seen;
  for (const auto& x : samples) {
    const std::string key = x.serialize();
    if (!seen.insert(key).second) continue;
    f.base_points.push_back(x);
    f.keys.push_back(key);
  }
  f.log_rho.resize(static_cast<Eigen::Index>(f.base_points.size()), p.fiber_grid);
  f.diags.resize(f.base_points.size());
  for (std::size_t i = 0; i < f.base_points.size(); ++i)
    f.log_rho.row(static_cast<Eigen::Index>(i)) =
        log_density_row(c, f.base_points[i], p, &f.diags[i]).transpose();
  return f;
}

FiberHolderFit fiber_holder_check(const MetricField& field, double eps0) {
  const int n = field.params.fiber_grid;
  FiberHolderFit out;
  std::vector<std::pair<double, double>> xy;
  double vmax = 0;
  for (int lag = 1; lag < static_cast<int>(eps0 * n); lag *= 2) {
    double v = 0;
    for (Eigen::Index r = 0; r < field.log_rho.rows(); ++r)
      for (int j = 0; j < n; ++j)
        v = std::max(v, std::abs(field.log_rho(r, (j + lag) % n) - field.log_rho(r, j)));
    vmax = std::max(vmax, v);
    if (v > 0) xy.emplace_back(double(lag) / n, v);
  }
  if (vmax < 1e-12) {
    out.exact = true;
    out.fit.degenerate = true;
    return out;
  }
  out.fit = diffeo::loglog_fit(xy);
  return out;
}

double fiber_metric_distance(const Eigen::ArrayXd& row_x, const Eigen::ArrayXd& row_y,
                             double alpha, double eps0) {
  Eigen::ArrayXd delta = row_x - row_y;
  return delta.abs().maxCoeff() + diffeo::grid_holder_seminorm(delta, alpha, eps0);
}

IsometryDefect holonomy_isometry_defect(const Cocycle& c, const SftPoint& x,
                                        const SftPoint& y, const FieldParams& p,
                                        Side side, const holonomy::HolonomyParams& hp) {
  holonomy::HolonomyResult h = side == Side::Stable
                                   ? holonomy::stable_holonomy(c, x, y, hp)
                                   : holonomy::unstable_holonomy(c, x, y, hp);
  RowDiag dx, dy;
  Eigen::ArrayXd row_x = log_density_row(c, x, p, &dx);
  Eigen::ArrayXd row_y = log_density_row(c, y, p, &dy);
  IsometryDefect out;
  const int n = p.fiber_grid;
  double h_min = 1e300;
  for (int j = 0; j < n; ++j) {
    const double t = double(j) / n;
    const double ht = h.map.lift(t);
    const double hd = h.map.derivative(1, t);
    h_min = std::min(h_min, hd);
    const double v = interp_log_density(row_y, ht) + 2 * std::log(hd) - row_x(j);
    out.defect = std::max(out.defect, std::abs(v));
  }
  const double lip_y = dy.interp_osc * n;
  out.budget_tail = h.tail_bound * (lip_y + 2.0 / std::max(h_min, 1e-6));
  out.budget_horizon = dx.gap_last + dy.gap_last;
  out.budget_interp = dy.interp_osc;
  return out;
}

BaseHolderFit base_holder_check(const Cocycle& c, const FieldParams& p,
                                const std::vector<std::pair<SftPoint, SftPoint>>& pairs,
                                double alpha, double beta_rho) {
  if (pairs.empty()) throw cocycle::CocycleError("empty base pair sample");
  BaseHolderFit out;
  std::vector<std::pair<double, double>> xy, vs_pow;
  for (const auto& [x, y] : pairs) {
    const double d = sft::metric(x, y);
    if (d == 0) continue;
    Eigen::ArrayXd rx = log_density_row(c, x, p);
    Eigen::ArrayXd ry = log_density_row(c, y, p);
    const double v = fiber_metric_distance(rx, ry, alpha);
    if (v < 1e-13) {
      ++out.zero_pairs;
      continue;
    }
    xy.emplace_back(d, v);
    vs_pow.emplace_back(v, std::pow(d, beta_rho));
  }
  if (xy.empty()) {
    out.exact = true;
    out.fit.degenerate = true;
    return out;
  }
  out.fit = diffeo::loglog_fit(xy);
  out.uniform_constant = diffeo::fit_inequality_constant(vs_pow);
  return out;
}

Thm13Report theorem13_verdict(const Cocycle& c, const FieldParams& p,
                              const std::vector<SftPoint>& samples, double alpha,
                              double beta, const Thm13Tolerances& tol) {
  Thm13Report rep;
  rep.alpha = alpha;
  rep.beta_rho = beta * c.rho();

  auto gate = cocycle::periodic_data(c, tol.gate_k_max, tol.gate_growth_threshold);
  rep.gate_bounded = gate.bounded;
  rep.gate_growth_ratio = gate.growth_ratio;
  if (!gate.bounded) {
    rep.verdict = "NOT-APPLICABLE";
    rep.failures.push_back("periodic data unbounded (growth ratio " +
                           std::to_string(gate.growth_ratio) + ")");
    return rep;
  }

  MetricField field = build_field(c, samples, p);
  const int n = p.fiber_grid;

  // (a) isometry defect of the skew product across every sampled base point.
  for (std::size_t i = 0; i < field.base_points.size(); ++i) {
    const SftPoint& x = field.base_points[i];
    Eigen::ArrayXd row_fx = log_density_row(c, shift(x, 1), p);
    CircleMap a = c.gen.value(x);
    for (int j = 0; j < n; ++j) {
      const double t = double(j) / n;
      const double v = interp_log_density(row_fx, a.lift(t)) +
                       2 * std::log(a.derivative(1, t)) -
                       field.log_rho(static_cast<Eigen::Index>(i), j);
      rep.isometry_defect = std::max(rep.isometry_defect, std::abs(v));
    }
  }

  // (b) fiber Hoelder continuity.
  rep.fiber = fiber_holder_check(field);

  // (c) base Hoelder continuity along leaves plus bracket-routed pairs.
  std::vector<std::pair<SftPoint, SftPoint>> stable_pairs, unstable_pairs;
  const std::size_t n_surgery = std::min<std::size_t>(field.base_points.size(), 3);
  for (std::size_t i = 0; i < n_surgery; ++i) {
    for (int depth = 2; depth <= 11; ++depth) {
      if (auto y = sft::stable_partner(field.base_points[i], depth))
        stable_pairs.emplace_back(field.base_points[i], *y);
      if (auto y = sft::unstable_partner(field.base_points[i], depth))
        unstable_pairs.emplace_back(field.base_points[i], *y);
    }
  }
  rep.base_stable = base_holder_check(c, p, stable_pairs, alpha, rep.beta_rho);
  rep.base_unstable = base_holder_check(c, p, unstable_pairs, alpha, rep.beta_rho);
  rep.leaf_constant =
      std::max(rep.base_stable.uniform_constant, rep.base_unstable.uniform_constant);

  std::vector<std::pair<double, double>> bracket_vs_pow;
  for (std::size_t i = 0; i < n_surgery; ++i) {
    for (auto [js, ju] : {std::pair{2, 3}, {3, 2}, {4, 4}, {5, 3}, {3, 5}}) {
      auto mid = sft::unstable_partner(field.base_points[i], ju);
      if (!mid) continue;
      auto y = sft::stable_partner(*mid, js);
      if (!y) continue;
      const double d = sft::metric(field.base_points[i], *y);
      if (d == 0) continue;
      Eigen::ArrayXd rx = log_density_row(c, field.base_points[i], p);
      Eigen::ArrayXd ry = log_density_row(c, *y, p);
      const double v = fiber_metric_distance(rx, ry, alpha);
      bracket_vs_pow.emplace_back(v, std::pow(d, rep.beta_rho));
    }
  }
  if (!bracket_vs_pow.empty())
    rep.bracket_constant = diffeo::fit_inequality_constant(bracket_vs_pow);

  // (d) joint exponent on X x M.
  {
    std::vector<std::pair<double, double>> xy;
    double vmax = 0;
    const SftPoint& x0 = field.base_points.front();
    Eigen::ArrayXd rx = log_density_row(c, x0, p);
    const double lambda = c.space->lambda();
    for (int depth = 2; depth <= 10; ++depth) {
      auto y = sft::stable_partner(x0, depth);
      if (!y) continue;
      Eigen::ArrayXd ry = log_density_row(c, *y, p);
      const double dt = 0.6 * std::pow(lambda, depth);
      const double t = 0.37;
      const double v =
          std::abs(interp_log_density(ry, t + dt) - interp_log_density(rx, t));
      const double d = sft::metric(x0, *y) + dt;
      vmax = std::max(vmax, v);
      if (v > 0) xy.emplace_back(d, v);
    }
    if (vmax < 1e-12) {
      rep.joint_exact = true;
      rep.joint_fit.degenerate = true;
    } else {
      rep.joint_fit = diffeo::loglog_fit(xy);
    }
  }

  // verdict assembly
  if (rep.isometry_defect > tol.isometry_defect)
    rep.failures.push_back("isometry defect " + std::to_string(rep.isometry_defect) +
                           " above tolerance");
  if (!rep.fiber.exact && rep.fiber.fit.slope < alpha - tol.exponent_slack)
    rep.failures.push_back("fiber Hoelder exponent too small");
  if (!rep.base_stable.exact &&
      rep.base_stable.fit.slope < rep.beta_rho - tol.exponent_slack)
    rep.failures.push_back("stable base Hoelder exponent too small");
  if (!rep.base_unstable.exact &&
      rep.base_unstable.fit.slope < rep.beta_rho - tol.exponent_slack)
    rep.failures.push_back("unstable base Hoelder exponent too small");
  if (rep.leaf_constant > 0 &&
      rep.bracket_constant > tol.bracket_factor * rep.leaf_constant)
    rep.failures.push_back("bracket-routed constant above 3x leaf constant");
  if (!rep.joint_exact &&
      rep.joint_fit.slope < std::min(alpha, rep.beta_rho) - tol.exponent_slack)
    rep.failures.push_back("joint Hoelder exponent too small");

  rep.verdict = rep.failures.empty() ? "PASS" : "FAIL";
  return rep;
}

}  // namespace cocyclelab::invmetric
