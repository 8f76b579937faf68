#include "cocyclelab/circle_map.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace cocyclelab::diffeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::complex<double> unit(double t) {
  return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

Eigen::ArrayXcd forward_spectrum(const Eigen::ArrayXd& samples) {
  const int n = static_cast<int>(samples.size());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(samples.data(), samples.data() + n), out;
  fft.fwd(out, in);
  Eigen::ArrayXcd half(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) half(k) = out[static_cast<std::size_t>(k)] / double(n);
  return half;
}

// Padded inverse transform of a derivative-weighted half spectrum onto an
// N-point grid.  order 0 reproduces the displacement samples; N < n
// truncates to the resolvable modes.
Eigen::ArrayXd resample(const GridDiffeo& g, int order, int N) {
  const int n = g.n;
  std::vector<std::complex<double>> full(static_cast<std::size_t>(N),
                                         std::complex<double>(0, 0));
  auto weight = [&](int k) {
    std::complex<double> w(1.0, 0.0);
    const std::complex<double> ik(0.0, kTwoPi * k);
    for (int d = 0; d < order; ++d) w *= ik;
    return w;
  };
  const int nyq = n / 2;
  const int keep = std::min(nyq, N / 2);
  for (int k = 0; k < keep; ++k) {
    std::complex<double> c = g.half_spectrum(k) * weight(k);
    full[static_cast<std::size_t>(k)] += c;
    if (k > 0) full[static_cast<std::size_t>(N - k)] += std::conj(c);
  }
  if (nyq <= N / 2) {
    // Nyquist mode: real interpolant Re(c (2 pi i nyq)^d e^{2 pi i nyq t}).
    std::complex<double> c = g.half_spectrum(nyq) * weight(nyq);
    if (N == n) {
      full[static_cast<std::size_t>(nyq)] += c;  // folded with its mirror
    } else {
      full[static_cast<std::size_t>(nyq)] += 0.5 * c;
      full[static_cast<std::size_t>(N - nyq)] += 0.5 * std::conj(c);
    }
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.inv(out, full);
  Eigen::ArrayXd res(N);
  for (int j = 0; j < N; ++j) res(j) = out[static_cast<std::size_t>(j)].real() * N;
  return res;
}

double eval_series(const GridDiffeo& g, int order, double t) {
  const int half = g.n / 2;
  const std::complex<double> z = unit(t);
  std::complex<double> zk(1.0, 0.0);
  double acc = 0.0;
  for (int k = 0; k <= half; ++k) {
    std::complex<double> w(1.0, 0.0);
    const std::complex<double> ik(0.0, kTwoPi * k);
    for (int d = 0; d < order; ++d) w *= ik;
    const double scale = (k == 0 || k == half) ? 1.0 : 2.0;
    acc += scale * (g.half_spectrum(k) * w * zk).real();
    zk *= z;
  }
  return acc;
}

Moebius make_moebius(const Eigen::Matrix2d& sl2) {
  Eigen::Matrix2d m = sl2;
  const double det = m.determinant();
  if (std::abs(det - 1.0) > 1e-12) {
    if (det <= 0) throw MapError("Moebius matrix must have positive determinant");
    m /= std::sqrt(det);
  }
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  std::complex<double> alpha(0.5 * (a + d), 0.5 * (b - c));
  std::complex<double> beta(0.5 * (a - d), -0.5 * (b + c));
  // Projective sign: pin Re(alpha) > 0 so the canonical lift is reproducible.
  if (alpha.real() < 0 || (alpha.real() == 0 && alpha.imag() < 0)) {
    m = -m;
    alpha = -alpha;
    beta = -beta;
  }
  return Moebius{m, alpha, beta};
}

double moebius_lift(const Moebius& mo, double t) {
  const std::complex<double> q = mo.beta / mo.alpha;
  const std::complex<double> v = 1.0 + q * std::conj(unit(t));
  return t + (std::arg(mo.alpha) + std::arg(v)) / std::numbers::pi;
}

// |beta- z + alpha-|^2 and its t-derivatives; F' = 1/D.
struct DenomDerivs {
  double D, D1, D2, D3;
};

DenomDerivs moebius_denom(const Moebius& mo, double t) {
  const std::complex<double> w = mo.alpha * std::conj(mo.beta) * unit(t);
  const double n2 = std::norm(mo.alpha) + std::norm(mo.beta);
  DenomDerivs r;
  r.D = n2 + 2.0 * w.real();
  r.D1 = -2.0 * kTwoPi * w.imag();
  r.D2 = -2.0 * kTwoPi * kTwoPi * w.real();
  r.D3 = 2.0 * kTwoPi * kTwoPi * kTwoPi * w.imag();
  return r;
}

double moebius_derivative(const Moebius& mo, int order, double t) {
  const auto d = moebius_denom(mo, t);
  switch (order) {
    case 1:
      return 1.0 / d.D;
    case 2:
      return -d.D1 / (d.D * d.D);
    case 3:
      return (2.0 * d.D1 * d.D1 - d.D * d.D2) / (d.D * d.D * d.D);
    default:
      throw MapError("unsupported derivative order");
  }
}

Eigen::Matrix2d rotation_sl2(double angle) {
  const double h = std::numbers::pi * angle;
  Eigen::Matrix2d m;
  m << std::cos(h), std::sin(h), -std::sin(h), std::cos(h);
  return m;
}

void check_floor(const GridDiffeo& g) {
  Eigen::ArrayXd d1 = resample(g, 1, g.n);
  if ((1.0 + d1).minCoeff() <= kDerivativeFloor)
    throw MapError("derivative floor violated (under-resolved or non-diffeo)");
}

GridDiffeo make_grid(Eigen::ArrayXd disp) {
  const int n = static_cast<int>(disp.size());
  if (!is_pow2(n) || n < 8) throw MapError("grid size must be a power of two >= 8");
  GridDiffeo g;
  g.n = n;
  g.half_spectrum = forward_spectrum(disp);
  g.disp = std::move(disp);
  check_floor(g);
  return g;
}

}  // namespace

double wrap01(double t) {
  double r = t - std::floor(t);
  return r < 1.0 ? r : 0.0;
}

double wrap_half(double t) {
  double r = t - std::floor(t + 0.5);
  return r >= 0.5 ? r - 1.0 : r;
}

double circle_dist(double a, double b) { return std::abs(wrap_half(a - b)); }

CircleMap CircleMap::rotation(double angle) { return CircleMap(Rotation{wrap01(angle)}); }

CircleMap CircleMap::moebius(const Eigen::Matrix2d& sl2) {
  return CircleMap(make_moebius(sl2));
}

CircleMap CircleMap::moebius_boost(double c) {
  Eigen::Matrix2d m;
  m << std::cosh(c), std::sinh(c), std::sinh(c), std::cosh(c);
  return CircleMap(make_moebius(m));
}

CircleMap CircleMap::grid_from_function(int n, const std::function<double(double)>& lift_fn) {
  Eigen::ArrayXd disp(n);
  for (int j = 0; j < n; ++j) {
    const double t = double(j) / n;
    disp(j) = lift_fn(t) - t;
  }
  return CircleMap(make_grid(std::move(disp)));
}

CircleMap CircleMap::grid_from_displacement(Eigen::ArrayXd disp) {
  return CircleMap(make_grid(std::move(disp)));
}

CircleMap CircleMap::grid_from_fourier(int n, double c0, const Eigen::VectorXd& cos_coef,
                                       const Eigen::VectorXd& sin_coef) {
  Eigen::ArrayXd disp = Eigen::ArrayXd::Constant(n, c0);
  for (int j = 0; j < n; ++j) {
    const double t = double(j) / n;
    for (int m = 0; m < cos_coef.size(); ++m)
      disp(j) += cos_coef(m) * std::cos(kTwoPi * (m + 1) * t);
    for (int m = 0; m < sin_coef.size(); ++m)
      disp(j) += sin_coef(m) * std::sin(kTwoPi * (m + 1) * t);
  }
  return CircleMap(make_grid(std::move(disp)));
}

double CircleMap::lift(double t) const {
  if (const auto* r = std::get_if<Rotation>(&rep_)) return t + r->angle;
  if (const auto* m = std::get_if<Moebius>(&rep_)) return moebius_lift(*m, t);
  return t + eval_series(std::get<GridDiffeo>(rep_), 0, t);
}

double CircleMap::derivative(int order, double t) const {
  if (order < 1 || order > 3) throw MapError("unsupported derivative order");
  if (std::holds_alternative<Rotation>(rep_)) return order == 1 ? 1.0 : 0.0;
  if (const auto* m = std::get_if<Moebius>(&rep_)) return moebius_derivative(*m, order, t);
  const double base = order == 1 ? 1.0 : 0.0;
  return base + eval_series(std::get<GridDiffeo>(rep_), order, t);
}

Eigen::ArrayXd CircleMap::lift_grid(int N) const {
  Eigen::ArrayXd ts(N);
  for (int j = 0; j < N; ++j) ts(j) = double(j) / N;
  if (const auto* r = std::get_if<Rotation>(&rep_)) return ts + r->angle;
  if (const auto* m = std::get_if<Moebius>(&rep_)) {
    Eigen::ArrayXd out(N);
    for (int j = 0; j < N; ++j) out(j) = moebius_lift(*m, ts(j));
    return out;
  }
  return ts + resample(std::get<GridDiffeo>(rep_), 0, N);
}

Eigen::ArrayXd CircleMap::derivative_grid(int order, int N) const {
  if (order == 0) {
    Eigen::ArrayXd ts(N);
    for (int j = 0; j < N; ++j) ts(j) = double(j) / N;
    return lift_grid(N) - ts;
  }
  if (std::holds_alternative<Rotation>(rep_))
    return Eigen::ArrayXd::Constant(N, order == 1 ? 1.0 : 0.0);
  if (const auto* m = std::get_if<Moebius>(&rep_)) {
    Eigen::ArrayXd out(N);
    for (int j = 0; j < N; ++j) out(j) = moebius_derivative(*m, order, double(j) / N);
    return out;
  }
  Eigen::ArrayXd out = resample(std::get<GridDiffeo>(rep_), order, N);
  if (order == 1) out += 1.0;
  return out;
}

CircleMap compose(const CircleMap& g, const CircleMap& h) {
  const auto* gr = std::get_if<Rotation>(&g.rep_);
  const auto* hr = std::get_if<Rotation>(&h.rep_);
  if (gr && hr) return CircleMap::rotation(gr->angle + hr->angle);

  const bool g_closed = !g.is_grid();
  const bool h_closed = !h.is_grid();
  if (g_closed && h_closed) {
    const Eigen::Matrix2d gm = gr ? rotation_sl2(gr->angle) : g.moebius_rep().m;
    const Eigen::Matrix2d hm = hr ? rotation_sl2(hr->angle) : h.moebius_rep().m;
    return CircleMap::moebius(gm * hm);
  }
  const int n = std::max({g.grid_size_hint(), h.grid_size_hint(), 8});
  Eigen::ArrayXd hh = h.lift_grid(n);
  Eigen::ArrayXd disp(n);
  for (int j = 0; j < n; ++j) disp(j) = g.lift(hh(j)) - double(j) / n;
  return CircleMap::grid_from_displacement(std::move(disp));
}

CircleMap invert(const CircleMap& g) {
  if (const auto* r = std::get_if<Rotation>(&g.rep_))
    return CircleMap::rotation(-r->angle);
  if (const auto* m = std::get_if<Moebius>(&g.rep_)) {
    Eigen::Matrix2d inv;
    inv << m->m(1, 1), -m->m(0, 1), -m->m(1, 0), m->m(0, 0);
    return CircleMap::moebius(inv);
  }
  const auto& gd = std::get<GridDiffeo>(g.rep_);
  const int n = gd.n;
  const double lo_off = gd.disp.minCoeff() - 1.0, hi_off = gd.disp.maxCoeff() + 1.0;
  Eigen::ArrayXd disp(n);
  for (int j = 0; j < n; ++j) {
    const double target = double(j) / n;
    double lo = target - hi_off, hi = target - lo_off;
    // Safeguarded Newton on F(s) = target; F is strictly increasing.
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double val = g.lift(s) - target;
      if (std::abs(val) < 1e-14) break;
      if (val > 0)
        hi = s;
      else
        lo = s;
      const double der = g.derivative(1, s);
      double next = s - val / der;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo < 1e-16) { s = 0.5 * (lo + hi); break; }
      s = next;
    }
    disp(j) = s - target;
  }
  return CircleMap::grid_from_displacement(std::move(disp));
}

CircleMap to_grid(const CircleMap& g, int n) {
  if (g.is_grid() && g.grid_size_hint() == n) return g;
  Eigen::ArrayXd ts(n);
  for (int j = 0; j < n; ++j) ts(j) = double(j) / n;
  Eigen::ArrayXd disp = g.lift_grid(n) - ts;
  return CircleMap::grid_from_displacement(std::move(disp));
}

}  // namespace cocyclelab::diffeo
