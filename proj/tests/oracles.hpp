// Test-only oracles: independent closed forms and brute-force searches the
// implementation is checked against.  Nothing here may call back into the
// code path it certifies.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "cocyclelab/circle_map.hpp"
#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/rng.hpp"
#include "cocyclelab/spd.hpp"

namespace oracles {

using cocyclelab::Rng;
using cocyclelab::diffeo::CircleMap;
using cocyclelab::spd::SpdPoint;

// Random band-limited circle diffeomorphism: displacement from a short
// Fourier series with m^{-3} decay, scaled to keep the derivative above 0.2.
inline CircleMap random_smooth_map(Rng& rng, int n_grid = 1024, int modes = 6,
                                   double amplitude = 0.6) {
  Eigen::VectorXd cosc(modes), sinc(modes);
  double deriv_budget = 0;
  for (int m = 0; m < modes; ++m) {
    const double decay = 1.0 / ((m + 1.0) * (m + 1.0) * (m + 1.0));
    cosc(m) = amplitude * decay * rng.uniform(-1.0, 1.0);
    sinc(m) = amplitude * decay * rng.uniform(-1.0, 1.0);
    deriv_budget += 2.0 * std::numbers::pi * (m + 1) *
                    (std::abs(cosc(m)) + std::abs(sinc(m)));
  }
  if (deriv_budget > 0.8) {
    cosc *= 0.8 / deriv_budget;
    sinc *= 0.8 / deriv_budget;
  }
  const double c0 = rng.uniform(-0.3, 0.3);
  return CircleMap::grid_from_fourier(n_grid, c0, cosc, sinc);
}

// Central finite difference of the lift.
inline double fd_derivative(const CircleMap& g, int order, double t, double h = 1e-4) {
  switch (order) {
    case 1:
      return (g.lift(t + h) - g.lift(t - h)) / (2 * h);
    case 2:
      return (g.lift(t + h) - 2 * g.lift(t) + g.lift(t - h)) / (h * h);
    case 3:
      return (g.lift(t + 2 * h) - 2 * g.lift(t + h) + 2 * g.lift(t - h) -
              g.lift(t - 2 * h)) /
             (2 * h * h * h);
    default:
      return 0;
  }
}

// Brute-force minimax center: candidates on geodesic hulls of pairs and
// triples, then a shrinking pattern search in the tangent symmetric
// coordinates at the best candidate.
inline cocyclelab::spd::Ball brute_force_meb(const std::vector<SpdPoint>& pts,
                                             double refine_tol = 1e-7) {
  using namespace cocyclelab::spd;
  auto phi = [&](const SpdPoint& c) {
    double worst = 0;
    for (const auto& p : pts) worst = std::max(worst, dist(c, p));
    return worst;
  };
  SpdPoint best = pts.front();
  double best_r = phi(best);
  auto consider = [&](const SpdPoint& c) {
    const double r = phi(c);
    if (r < best_r) {
      best_r = r;
      best = c;
    }
  };
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int a = 1; a < 16; ++a) consider(geodesic(pts[i], pts[j], a / 16.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int a = 1; a < 8; ++a)
          for (int b = 1; b < 8; ++b)
            consider(geodesic(pts[i], geodesic(pts[j], pts[k], a / 8.0), b / 8.0));
  // Shrinking-grid search over c = B^{1/2} exp(S) B^{1/2}: the full
  // {-1,0,1}^dim stencil (diagonal moves included) avoids stalling on the
  // kinks of the max-distance function.
  // Local refinement: pattern search on the smooth p-norm surrogate
  // (1/2p) logsumexp(2p log d_i), with p-continuation.  The surrogate is
  // geodesically convex and smooth, so the full {-1,0,1}^dim stencil cannot
  // stall on minimax kinks; the smoothing bias is ln(n)/(2p).
  const int m = pts.front().dim();
  const int dim = m * (m + 1) / 2;
  const int combos = static_cast<int>(std::pow(3.0, dim));
  auto log_phi_p = [&](const SpdPoint& c, double p) {
    double mx = -1e300;
    std::vector<double> logs;
    logs.reserve(pts.size());
    for (const auto& q : pts) {
      const double ld = std::log(std::max(dist(c, q), 1e-300));
      logs.push_back(2 * p * ld);
      mx = std::max(mx, 2 * p * ld);
    }
    double acc = 0;
    for (double l : logs) acc += std::exp(l - mx);
    return (mx + std::log(acc)) / (2 * p);
  };
  for (double p = 4.0; p < 3.0e7; p *= 8.0) {
    double step = 0.02;
    double cur = log_phi_p(best, p);
    while (step > refine_tol) {
      bool improved = false;
      Eigen::MatrixXd b_half = sym_sqrt(best.matrix());
      for (int code = 0; code < combos; ++code) {
        if (code == (combos - 1) / 2) continue;  // all-zero move
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
        int rem = code, idx = 0;
        for (int a = 0; a < m; ++a)
          for (int b = a; b < m; ++b, ++idx) {
            const int digit = (rem % 3) - 1;
            rem /= 3;
            s(a, b) = s(b, a) = digit * step;
          }
        SpdPoint cand(b_half * sym_exp(s) * b_half);
        const double v = log_phi_p(cand, p);
        if (v < cur) {
          cur = v;
          best = cand;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
  }
  best_r = phi(best);
  return {best, best_r};
}

// Random SPD matrix with log-uniform spectrum in [lo, hi].
inline SpdPoint random_spd(Rng& rng, int m, double lo = 0.1, double hi = 10.0) {
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd ev(m);
  for (int i = 0; i < m; ++i)
    ev(i) = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  Eigen::MatrixXd out = q * ev.asDiagonal() * q.transpose();
  return SpdPoint(0.5 * (out + out.transpose()));
}

// Closed-form data for conjugated-rotation cocycles A(x) = g_{fx} R_a g_x^{-1}:
// the n-step product is g_{f^n x} R_{S_n} g_x^{-1} with S_n the angle sum.
inline double angle_sum(const cocyclelab::cocycle::Cocycle& c,
                        const cocyclelab::sft::SftPoint& x, long n) {
  double s = 0;
  for (long i = 0; i < n; ++i) s += c.gen.angle(shift(x, i));
  return s;
}

inline CircleMap conjugated_iterate_oracle(const cocyclelab::cocycle::Cocycle& c,
                                           const cocyclelab::sft::SftPoint& x, long n) {
  using cocyclelab::diffeo::compose;
  CircleMap g_end = c.gen.conjugacy(shift(x, n));
  CircleMap g_start = c.gen.conjugacy(x);
  return compose(g_end, compose(CircleMap::rotation(angle_sum(c, x, n)),
                                invert(g_start)));
}

}  // namespace oracles
