#include "cocyclelab/cocycle.hpp"

#include <algorithm>
#include <cmath>

namespace cocyclelab::cocycle {

using diffeo::CircleMap;
using sft::SftPoint;

double SeriesParams::eval(const SftPoint& x) const {
  const int t = truncation();
  double acc = symbol_values(x.symbol_at(0));
  double w = 1.0;
  for (int i = 1; i <= t; ++i) {
    w *= weight;
    acc += w * (symbol_values(x.symbol_at(i)) + symbol_values(x.symbol_at(-i)));
  }
  return offset + amplitude * acc;
}

int SeriesParams::truncation() const {
  if (!(weight > 0 && weight < 1)) throw CocycleError("series weight must lie in (0,1)");
  const int t = static_cast<int>(std::ceil(std::log(1e-18) / std::log(weight)));
  return std::min(t, 512);
}

Generator Generator::rotation_table(int lo, int hi, std::map<std::string, double> angles) {
  Generator g;
  g.kind_ = Kind::RotationTable;
  g.window_lo_ = lo;
  g.window_hi_ = hi;
  g.angle_table_ = std::move(angles);
  return g;
}

Generator Generator::conjugated_rotation_table(int lo, int hi,
                                               std::map<std::string, CircleMap> conj,
                                               std::map<std::string, double> angles) {
  Generator g;
  g.kind_ = Kind::ConjugatedRotationTable;
  g.window_lo_ = lo;
  g.window_hi_ = hi;
  g.conj_table_ = std::move(conj);
  g.angle_table_ = std::move(angles);
  return g;
}

Generator Generator::moebius_table(int lo, int hi,
                                   std::map<std::string, Eigen::Matrix2d> matrices) {
  Generator g;
  g.kind_ = Kind::MoebiusTable;
  g.window_lo_ = lo;
  g.window_hi_ = hi;
  g.moebius_table_ = std::move(matrices);
  return g;
}

Generator Generator::rotation_series(SeriesParams angle) {
  Generator g;
  g.kind_ = Kind::RotationSeries;
  g.angle_series_ = std::move(angle);
  g.window_lo_ = -g.angle_series_.truncation();
  g.window_hi_ = g.angle_series_.truncation();
  return g;
}

Generator Generator::conjugated_rotation_series(SeriesParams angle, SeriesParams conj) {
  Generator g;
  g.kind_ = Kind::ConjugatedRotationSeries;
  g.angle_series_ = std::move(angle);
  g.conj_series_ = std::move(conj);
  const int t = std::max(g.angle_series_.truncation(), g.conj_series_.truncation());
  g.window_lo_ = -t;
  g.window_hi_ = t;
  return g;
}

Generator Generator::moebius_series(double s, SeriesParams tilt) {
  if (!(s > 0)) throw CocycleError("hyperbolic parameter must be positive");
  Generator g;
  g.kind_ = Kind::MoebiusSeries;
  g.moebius_s_ = s;
  g.conj_series_ = std::move(tilt);
  g.window_lo_ = -g.conj_series_.truncation();
  g.window_hi_ = g.conj_series_.truncation();
  return g;
}

bool Generator::locally_constant() const {
  return kind_ == Kind::RotationTable || kind_ == Kind::ConjugatedRotationTable ||
         kind_ == Kind::MoebiusTable;
}

std::string Generator::word(const SftPoint& x) const {
  return x.window(window_lo_, window_hi_);
}

std::string Generator::extended_word(const SftPoint& x) const {
  return x.window(window_lo_, window_hi_ + 1);
}

namespace {

template <typename T>
const T& table_at(const std::map<std::string, T>& table, const std::string& key) {
  auto it = table.find(key);
  if (it == table.end())
    throw CocycleError("window word '" + key + "' missing from generator table");
  return it->second;
}

Eigen::Matrix2d hyperbolic_sl2(double s) {
  Eigen::Matrix2d m;
  m << s, 0, 0, 1.0 / s;
  return m;
}

}  // namespace

CircleMap Generator::value(const SftPoint& x) const {
  switch (kind_) {
    case Kind::RotationTable:
      return CircleMap::rotation(table_at(angle_table_, word(x)));
    case Kind::MoebiusTable:
      return CircleMap::moebius(table_at(moebius_table_, word(x)));
    case Kind::ConjugatedRotationTable: {
      const std::string key = extended_word(x);
      auto it = value_cache_.find(key);
      if (it != value_cache_.end()) return it->second;
      const std::string w = word(x);
      const std::string wf = shift(x, 1).window(window_lo_, window_hi_);
      const CircleMap& g_next = table_at(conj_table_, wf);
      const CircleMap& g_here = table_at(conj_table_, w);
      CircleMap v = compose(g_next, compose(CircleMap::rotation(table_at(angle_table_, w)),
                                            invert(g_here)));
      value_cache_.emplace(key, v);
      return v;
    }
    case Kind::RotationSeries:
      return CircleMap::rotation(angle_series_.eval(x));
    case Kind::ConjugatedRotationSeries: {
      const double c_here = conj_series_.eval(x);
      const double c_next = conj_series_.eval(shift(x, 1));
      return compose(CircleMap::moebius_boost(c_next),
                     compose(CircleMap::rotation(angle_series_.eval(x)),
                             CircleMap::moebius_boost(-c_here)));
    }
    case Kind::MoebiusSeries: {
      const double nu = conj_series_.eval(x);
      CircleMap tilt = CircleMap::rotation(nu);
      return compose(tilt, compose(CircleMap::moebius(hyperbolic_sl2(moebius_s_)),
                                   invert(tilt)));
    }
  }
  throw CocycleError("unreachable generator kind");
}

CircleMap Generator::value_inverse(const SftPoint& x) const {
  if (kind_ == Kind::ConjugatedRotationTable) {
    const std::string key = "inv:" + extended_word(x);
    auto it = inverse_cache_.find(key);
    if (it != inverse_cache_.end()) return it->second;
    CircleMap vi = invert(value(x));
    inverse_cache_.emplace(key, vi);
    return vi;
  }
  return invert(value(x));
}

double Generator::angle(const SftPoint& x) const {
  switch (kind_) {
    case Kind::RotationTable:
    case Kind::ConjugatedRotationTable:
      return table_at(angle_table_, word(x));
    case Kind::RotationSeries:
    case Kind::ConjugatedRotationSeries:
      return angle_series_.eval(x);
    default:
      throw CocycleError("generator has no rotation part");
  }
}

CircleMap Generator::conjugacy(const SftPoint& x) const {
  switch (kind_) {
    case Kind::ConjugatedRotationTable:
      return table_at(conj_table_, word(x));
    case Kind::ConjugatedRotationSeries:
      return CircleMap::moebius_boost(conj_series_.eval(x));
    case Kind::RotationTable:
    case Kind::RotationSeries:
      return CircleMap::identity();
    default:
      throw CocycleError("generator has no conjugacy part");
  }
}

CircleMap iterate(const Cocycle& c, const SftPoint& x, long n) {
  CircleMap acc = CircleMap::identity();
  if (n >= 0) {
    for (long i = 0; i < n; ++i) acc = compose(c.gen.value(shift(x, i)), acc);
  } else {
    for (long i = 1; i <= -n; ++i) acc = compose(acc, c.gen.value_inverse(shift(x, -i)));
  }
  return acc;
}

OrbitProducts::OrbitProducts(const Cocycle& c, SftPoint x)
    : c_(&c),
      base_(std::move(x)),
      fwd_(CircleMap::identity()),
      fwd_inv_(CircleMap::identity()),
      bwd_(CircleMap::identity()),
      bwd_inv_(CircleMap::identity()) {}

void OrbitProducts::step_forward() {
  SftPoint at = shift(base_, fwd_n_);
  fwd_ = compose(c_->gen.value(at), fwd_);
  fwd_inv_ = compose(fwd_inv_, c_->gen.value_inverse(at));
  ++fwd_n_;
}

void OrbitProducts::step_backward() {
  SftPoint at = shift(base_, -(bwd_n_ + 1));
  bwd_ = compose(bwd_, c_->gen.value_inverse(at));
  bwd_inv_ = compose(c_->gen.value(at), bwd_inv_);
  ++bwd_n_;
}

PeriodicDataSummary periodic_data(const Cocycle& c, int k_max, double growth_threshold) {
  PeriodicDataSummary out;
  auto orbit_points = sft::periodic_points(c.space, k_max);
  for (const auto& [p, d] : orbit_points) {
    CircleMap ret = iterate(c, p, d);
    CircleMap power = ret;
    for (int k = d; k <= k_max; k += d) {
      CircleMap power_inv = invert(power);
      diffeo::NormReport nq = diffeo::norm_report(power, c.q, c.norms, &power_inv);
      diffeo::NormReport n1 = diffeo::norm_report(power, 1.0, c.norms, &power_inv);
      out.data.push_back({p, k, d, nq.two_sided, n1.two_sided});
      if (k + d <= k_max) power = compose(ret, power);
    }
  }
  double early_sup = 0, late_sup = 0;
  const int half = std::max(1, k_max / 2);
  for (const auto& datum : out.data) {
    out.sup_q = std::max(out.sup_q, datum.norm_q);
    out.sup_1 = std::max(out.sup_1, datum.norm_1);
    if (datum.period <= half)
      early_sup = std::max(early_sup, datum.norm_q);
    else
      late_sup = std::max(late_sup, datum.norm_q);
  }
  out.growth_ratio = early_sup > 0 ? std::max(late_sup, early_sup) / early_sup : 1.0;
  out.bounded = out.growth_ratio <= growth_threshold;
  return out;
}

namespace {

ScanRow make_row(int x_id, long n, const CircleMap& map, const CircleMap& inv,
                 const Cocycle& c, double r) {
  diffeo::NormReport nr = diffeo::norm_report(map, r, c.norms, &inv);
  diffeo::NormReport n1 = diffeo::norm_report(map, 1.0, c.norms, &inv);
  ScanRow row;
  row.x_id = x_id;
  row.n = n;
  row.norm_r = nr.two_sided;
  row.norm_1 = n1.two_sided;
  if (n != 0) {
    const double d1 = std::max(n1.deriv_sups.at(0), 1e-300);
    row.log_deriv_rate = std::log(d1) / static_cast<double>(n);
  }
  return row;
}

}  // namespace

ScanSummary value_bound_scan(const Cocycle& c, const std::vector<SftPoint>& samples,
                             long n_max, double r, long early_n,
                             double growing_threshold) {
  ScanSummary s;
  s.early_n = early_n;
  for (int xi = 0; xi < static_cast<int>(samples.size()); ++xi) {
    OrbitProducts orbit(c, samples[static_cast<std::size_t>(xi)]);
    s.rows.push_back(make_row(xi, 0, orbit.forward(), orbit.forward_inverse(), c, r));
    for (long n = 1; n <= n_max; ++n) {
      orbit.step_forward();
      s.rows.push_back(make_row(xi, n, orbit.forward(), orbit.forward_inverse(), c, r));
      orbit.step_backward();
      s.rows.push_back(make_row(xi, -n, orbit.backward(), orbit.backward_inverse(), c, r));
    }
  }
  for (const auto& row : s.rows) {
    if (row.norm_r > s.sup_norm) {
      s.sup_norm = row.norm_r;
      s.argmax_x = row.x_id;
      s.argmax_n = row.n;
    }
    if (std::llabs(row.n) <= early_n) s.early_sup = std::max(s.early_sup, row.norm_r);
  }
  s.growth_ratio = s.early_sup > 0 ? s.sup_norm / s.early_sup : 1.0;
  s.growing = s.growth_ratio > growing_threshold;
  return s;
}

std::vector<std::pair<long, double>> growth_exponent(const Cocycle& c, const SftPoint& x,
                                                     double t, long n_max) {
  std::vector<std::pair<long, double>> out;
  out.reserve(static_cast<std::size_t>(2 * n_max));
  double tf = t, acc_f = 0;
  for (long n = 1; n <= n_max; ++n) {
    SftPoint at = shift(x, n - 1);
    CircleMap g = c.gen.value(at);
    acc_f += std::log(g.derivative(1, tf));
    tf = diffeo::wrap01(g.lift(tf));
    out.emplace_back(n, acc_f / static_cast<double>(n));
  }
  double tb = t, acc_b = 0;
  for (long n = 1; n <= n_max; ++n) {
    SftPoint at = shift(x, -n);
    CircleMap gi = c.gen.value_inverse(at);
    tb = diffeo::wrap01(gi.lift(tb));
    // D A_x^{-n} accumulates 1 / A'(f^{-i} x) at the pulled-back fiber point.
    acc_b -= std::log(c.gen.value(at).derivative(1, tb));
    out.emplace_back(-n, acc_b / static_cast<double>(-n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SubexpRow> subexp_fit(const Cocycle& c, const SftPoint& x, long n_max,
                                  double q, const std::vector<double>& eps_grid) {
  std::vector<std::pair<long, double>> norms;  // (n, |A^n|_{C^q})
  OrbitProducts orbit(c, x);
  norms.emplace_back(0, diffeo::norm_report(orbit.forward(), q, c.norms,
                                            &orbit.forward_inverse())
                            .two_sided);
  for (long n = 1; n <= n_max; ++n) {
    orbit.step_forward();
    norms.emplace_back(n, diffeo::norm_report(orbit.forward(), q, c.norms,
                                              &orbit.forward_inverse())
                              .two_sided);
    orbit.step_backward();
    norms.emplace_back(-n, diffeo::norm_report(orbit.backward(), q, c.norms,
                                               &orbit.backward_inverse())
                               .two_sided);
  }
  std::vector<SubexpRow> out;
  for (double eps : eps_grid) {
    SubexpRow row;
    row.eps = eps;
    for (const auto& [n, norm] : norms) {
      const double v = norm * std::exp(-std::abs(static_cast<double>(n)) * eps);
      if (v > row.K_eps) {
        row.K_eps = v;
        row.argmax_n = n;
      }
    }
    row.stabilized = std::llabs(row.argmax_n) <= n_max / 2;
    out.push_back(row);
  }
  return out;
}

HolderFit holder_exponent_fit(const Cocycle& c,
                              const std::vector<std::pair<SftPoint, SftPoint>>& pairs) {
  if (pairs.empty()) throw CocycleError("empty pair sample");
  std::vector<std::pair<double, double>> xy;
  HolderFit out;
  for (const auto& [x, y] : pairs) {
    const double d = sft::metric(x, y);
    if (d == 0) continue;
    CircleMap ax = c.gen.value(x), ay = c.gen.value(y);
    CircleMap axi = c.gen.value_inverse(x), ayi = c.gen.value_inverse(y);
    const double dc = diffeo::dist_cr(ax, ay, c.q, c.norms, &axi, &ayi);
    if (dc <= 0) {
      ++out.zero_distance_pairs;
      continue;
    }
    xy.emplace_back(d, dc);
  }
  if (xy.empty()) {
    out.exact = true;
    out.fit.degenerate = true;
    return out;
  }
  out.fit = diffeo::loglog_fit(xy);
  return out;
}

}  // namespace cocyclelab::cocycle
