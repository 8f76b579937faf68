#include "cocyclelab/norms.hpp"

#include <algorithm>
#include <cmath>

namespace cocyclelab::diffeo {

namespace {

struct SplitR {
  int k;
  double alpha;
};

SplitR split_r(double r) {
  if (r < 0) throw MapError("regularity index must be nonnegative");
  int k = static_cast<int>(std::floor(r + 1e-12));
  double alpha = r - k;
  if (alpha < 1e-12) alpha = 0.0;
  if (k > 3) throw MapError("regularity above C^3+alpha not supported");
  return {k, alpha};
}

}  // namespace

// Lags are scanned from the widest down, with a Lipschitz-based bound to stop
// early once no smaller lag can improve the running maximum.
double grid_holder_seminorm(const Eigen::ArrayXd& v, double alpha, double eps0,
                            double shift) {
  const int n = static_cast<int>(v.size());
  int lmax = static_cast<int>(std::ceil(eps0 * n)) - 1;
  lmax = std::clamp(lmax, 0, n / 2);
  if (lmax == 0 || alpha <= 0) return 0.0;
  double lip_step = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = i + 1 == n ? 0 : i + 1;
    const double add = i + 1 == n ? shift : 0.0;
    lip_step = std::max(lip_step, std::abs(v(j) + add - v(i)));
  }
  double best = 0.0;
  for (int l = lmax; l >= 1; --l) {
    const double d = double(l) / n;
    const double bound = lip_step * l * std::pow(d, -alpha);
    if (bound <= best) break;
    double md = 0.0;
    for (int i = 0; i < n; ++i) {
      int j = i + l;
      double add = 0.0;
      if (j >= n) {
        j -= n;
        add = shift;
      }
      md = std::max(md, std::abs(v(j) + add - v(i)));
    }
    best = std::max(best, md * std::pow(d, -alpha));
  }
  return best;
}

namespace {

struct OneSided {
  double sup_disp = 0;
  std::vector<double> deriv_sups;
  double seminorm = 0;
  double total = 0;
};

OneSided one_sided_parts(const CircleMap& g, int k, double alpha, const NormParams& p) {
  OneSided out;
  const int n = p.grid;
  Eigen::ArrayXd lift = g.lift_grid(n);
  for (int j = 0; j < n; ++j)
    out.sup_disp = std::max(out.sup_disp, std::abs(wrap_half(lift(j) - double(j) / n)));
  Eigen::ArrayXd dk;
  for (int i = 1; i <= k; ++i) {
    Eigen::ArrayXd di = g.derivative_grid(i, n);
    out.deriv_sups.push_back(di.abs().maxCoeff());
    if (i == k) dk = std::move(di);
  }
  if (alpha > 0) {
    if (k == 0)
      out.seminorm = grid_holder_seminorm(lift, alpha, p.eps0, 1.0);
    else
      out.seminorm = grid_holder_seminorm(dk, alpha, p.eps0, 0.0);
  }
  out.total = out.sup_disp + out.seminorm;
  if (!out.deriv_sups.empty())
    out.total += *std::max_element(out.deriv_sups.begin(), out.deriv_sups.end());
  return out;
}

// ||g - h||_{C^r} on aligned lifts.
double diff_norm(const CircleMap& g, const CircleMap& h, int k, double alpha,
                 const NormParams& p) {
  const int n = p.grid;
  Eigen::ArrayXd delta = g.lift_grid(n) - h.lift_grid(n);
  const double m = std::round(delta(0));
  delta -= m;
  if (delta.abs().maxCoeff() >= 0.5)
    throw MapError("maps too far apart for norm-difference distance");
  double total = delta.abs().maxCoeff();
  Eigen::ArrayXd dk = delta;
  double dmax = 0.0;
  for (int i = 1; i <= k; ++i) {
    Eigen::ArrayXd di = g.derivative_grid(i, n) - h.derivative_grid(i, n);
    dmax = std::max(dmax, di.abs().maxCoeff());
    if (i == k) dk = std::move(di);
  }
  total += dmax;
  if (alpha > 0) total += grid_holder_seminorm(dk, alpha, p.eps0, 0.0);
  return total;
}

}  // namespace

double one_sided_norm(const CircleMap& g, double r, const NormParams& p) {
  auto [k, alpha] = split_r(r);
  return one_sided_parts(g, k, alpha, p).total;
}

NormReport norm_report(const CircleMap& g, double r, const NormParams& p,
                       const CircleMap* inverse) {
  auto [k, alpha] = split_r(r);
  NormReport rep;
  rep.r = r;
  rep.k = k;
  rep.alpha = alpha;
  OneSided fwd = one_sided_parts(g, k, alpha, p);
  rep.sup_displacement = fwd.sup_disp;
  rep.deriv_sups = fwd.deriv_sups;
  rep.holder_seminorm = fwd.seminorm;
  rep.one_sided = fwd.total;
  if (inverse) {
    rep.two_sided = rep.one_sided + one_sided_parts(*inverse, k, alpha, p).total;
  } else {
    CircleMap inv = invert(g);
    rep.two_sided = rep.one_sided + one_sided_parts(inv, k, alpha, p).total;
  }
  return rep;
}

double diff_norm_cr(const CircleMap& g, const CircleMap& h, double r,
                    const NormParams& p) {
  auto [k, alpha] = split_r(r);
  return diff_norm(g, h, k, alpha, p);
}

double dist_cr(const CircleMap& g, const CircleMap& h, double r, const NormParams& p,
               const CircleMap* g_inv, const CircleMap* h_inv) {
  auto [k, alpha] = split_r(r);
  double total = diff_norm(g, h, k, alpha, p);
  CircleMap gi = g_inv ? *g_inv : invert(g);
  CircleMap hi = h_inv ? *h_inv : invert(h);
  total += diff_norm(gi, hi, k, alpha, p);
  return total;
}

double fit_inequality_constant(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw MapError("empty sample for constant fit");
  double best = 0.0;
  for (const auto& [lhs, rhs] : pairs) {
    if (!(rhs > 0)) throw MapError("nonpositive rhs in constant fit");
    best = std::max(best, lhs / rhs);
  }
  return best;
}

LogLogFit loglog_fit(const std::vector<std::pair<double, double>>& xy) {
  LogLogFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double xmin = 0, xmax = 0;
  for (const auto& [x, y] : xy) {
    if (!(x > 0) || !(y > 0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    if (fit.n_used == 0) {
      xmin = xmax = lx;
    } else {
      xmin = std::min(xmin, lx);
      xmax = std::max(xmax, lx);
    }
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.n_used;
  }
  if (fit.n_used < 2 || xmax - xmin < 1e-12) {
    fit.degenerate = true;
    return fit;
  }
  const double n = fit.n_used;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace cocyclelab::diffeo
