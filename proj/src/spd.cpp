#include "cocyclelab/spd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cocyclelab::spd {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd sym_apply(const Eigen::MatrixXd& m, double (*f)(double)) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = f(ev(i));
  return symmetrize(es.eigenvectors() * ev.asDiagonal() *
                    es.eigenvectors().transpose());
}

void check_dims(const SpdPoint& a, const SpdPoint& b) {
  if (a.dim() != b.dim()) throw SpdError("dimension mismatch");
}

// log generalized eigenvalues of (B, A): spectrum of A^{-1} B.  Closed forms
// for m <= 2, solver otherwise.
void log_gen_eigs(const SpdPoint& a, const SpdPoint& b, Eigen::VectorXd& out) {
  const int m = a.dim();
  out.resize(m);
  if (m == 1) {
    out(0) = std::log(b.value() / a.value());
    return;
  }
  if (m == 2) {
    const auto& A = a.matrix();
    const auto& B = b.matrix();
    const double da = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    const double db = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
    const double c = A(0, 0) * B(1, 1) + A(1, 1) * B(0, 0) -
                     A(0, 1) * B(1, 0) - A(1, 0) * B(0, 1);
    double disc = c * c - 4.0 * da * db;
    if (disc < 0) disc = 0;  // roundoff guard; SPD pencils have real spectrum
    const double s = std::sqrt(disc);
    const double l1 = (c + s) / (2.0 * da);
    const double l2 = (c - s) / (2.0 * da);
    if (!(l1 > 0) || !(l2 > 0)) throw SpdError("non-SPD inputs in distance");
    out(0) = std::log(l1);
    out(1) = std::log(l2);
    return;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(b.matrix(),
                                                               a.matrix());
  for (int i = 0; i < m; ++i) {
    if (!(es.eigenvalues()(i) > 0)) throw SpdError("non-SPD inputs in distance");
    out(i) = std::log(es.eigenvalues()(i));
  }
}

int farthest_index(const std::vector<SpdPoint>& pts, const SpdPoint& c,
                   double* radius) {
  int arg = 0;
  double best = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = dist(c, pts[i]);
    if (d > best) {  // ties keep the lowest index
      best = d;
      arg = static_cast<int>(i);
    }
  }
  *radius = best;
  return arg;
}

double max_dist(const std::vector<SpdPoint>& pts, const SpdPoint& c) {
  double r;
  farthest_index(pts, c, &r);
  return r;
}

// Frobenius-preserving flattening of a symmetric matrix.
Eigen::VectorXd sym_flatten(const Eigen::MatrixXd& s) {
  const int m = static_cast<int>(s.rows());
  Eigen::VectorXd v(m * (m + 1) / 2);
  int idx = 0;
  for (int a = 0; a < m; ++a) {
    v(idx++) = s(a, a);
    for (int b = a + 1; b < m; ++b) v(idx++) = std::numbers::sqrt2 * s(a, b);
  }
  return v;
}

Eigen::MatrixXd sym_unflatten(const Eigen::VectorXd& v, int m) {
  Eigen::MatrixXd s(m, m);
  int idx = 0;
  for (int a = 0; a < m; ++a) {
    s(a, a) = v(idx++);
    for (int b = a + 1; b < m; ++b) {
      s(a, b) = s(b, a) = v(idx++) / std::numbers::sqrt2;
    }
  }
  return s;
}

// Local polish of the circumcenter: linearize the distances in the tangent
// chart at c (conjugated so c = Id), solve the equal-distance system for the
// near-support points with a minimum-norm step, and backtrack on the true
// max distance.  Converges quadratically once the support is identified.
struct PolishResult {
  SpdPoint center;
  double radius;
};

PolishResult support_polish(const std::vector<SpdPoint>& pts, SpdPoint c, double tol) {
  const int m = c.dim();
  const int dim = m * (m + 1) / 2;
  double radius = max_dist(pts, c);
  double gap = std::max(0.02 * radius, 1e-12);
  SpdPoint best = c;
  double best_r = radius;
  for (int iter = 0; iter < 80; ++iter) {
    Eigen::MatrixXd c_half = sym_sqrt(c.matrix());
    Eigen::MatrixXd c_ihalf =
        sym_apply(c.matrix(), [](double x) { return 1.0 / std::sqrt(x); });
    std::vector<std::pair<double, Eigen::VectorXd>> all;  // (d_i, u_i)
    double r_now = 0, second = 0;
    for (const auto& p : pts) {
      Eigen::MatrixXd tp = symmetrize(c_ihalf * p.matrix() * c_ihalf);
      Eigen::MatrixXd lg = sym_log(tp);
      const double d = lg.norm();
      if (d > r_now) {
        second = r_now;
        r_now = d;
      } else {
        second = std::max(second, d);
      }
      if (d > 1e-14) all.emplace_back(d, sym_flatten(lg / d));
    }
    radius = r_now;
    if (radius < best_r) {
      best_r = radius;
      best = c;
    }
    if (all.size() < 2) break;
    // At the optimum the support has >= 2 points; make sure the candidate
    // support is at least a pair.
    double eff_gap = std::max(gap, 1.5 * (radius - second) + 1e-15);
    std::vector<std::pair<double, Eigen::VectorXd>> sup;
    for (auto& e : all)
      if (e.first >= radius - eff_gap) sup.push_back(e);
    // Equalize the support distances: eliminate the common level by
    // centering, then take the minimum-norm tangent step.
    Eigen::VectorXd u_mean = Eigen::VectorXd::Zero(dim);
    double d_mean = 0;
    for (const auto& [d, u] : sup) {
      u_mean += u;
      d_mean += d;
    }
    u_mean /= double(sup.size());
    d_mean /= double(sup.size());
    Eigen::MatrixXd a(sup.size(), dim);
    Eigen::VectorXd rhs(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i) {
      a.row(static_cast<Eigen::Index>(i)) = (sup[i].second - u_mean).transpose();
      rhs(static_cast<Eigen::Index>(i)) = sup[i].first - d_mean;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-10);
    // Equalizing component, plus a common-descent component along the
    // null-space projection of the mean direction (zero exactly when the
    // support directions surround the center).
    Eigen::VectorXd z = cod.solve(rhs);
    Eigen::VectorXd w = u_mean - cod.solve(a * u_mean);
    const double wn = w.norm();
    if (wn > 1e-12) {
      const double s_len = std::min(0.3 * radius, 2.0 * radius * wn * wn) / wn;
      z += s_len * w;
    }
    Eigen::MatrixXd v = sym_unflatten(z, m);
    double step_norm = v.norm();
    if (step_norm > 0.5 * radius) {
      v *= 0.5 * radius / step_norm;  // trust region
      step_norm = 0.5 * radius;
    }
    if (step_norm < 0.25 * tol) break;
    bool accepted = false;
    for (double sigma = 1.0; sigma > 1e-4; sigma *= 0.5) {
      SpdPoint cand(symmetrize(c_half * sym_exp(sigma * v) * c_half));
      const double r_cand = max_dist(pts, cand);
      if (r_cand < radius - 1e-15) {
        c = cand;
        radius = r_cand;
        gap = std::max(4.0 * sigma * step_norm, 1e-13);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (gap <= 1e-13 * std::max(radius, 1.0)) break;
      gap *= 0.25;  // support likely over-included; tighten
    }
  }
  if (radius < best_r) {
    best_r = radius;
    best = c;
  }
  return {best, best_r};
}

}  // namespace

SpdPoint::SpdPoint(Eigen::MatrixXd matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) throw SpdError("matrix must be square");
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m_.cwiseAbs().maxCoeff()))
    throw SpdError("matrix not symmetric");
  m_ = symmetrize(m_);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-10)
    throw SpdError("matrix not positive definite (min eigenvalue <= 1e-10)");
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m) {
  return sym_apply(m, [](double x) { return std::sqrt(x); });
}
Eigen::MatrixXd sym_log(const Eigen::MatrixXd& m) {
  return sym_apply(m, [](double x) { return std::log(x); });
}
Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& m) {
  return sym_apply(m, [](double x) { return std::exp(x); });
}
Eigen::MatrixXd sym_power(const Eigen::MatrixXd& m, double s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::pow(ev(i), s);
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

double dist(const SpdPoint& a, const SpdPoint& b) {
  check_dims(a, b);
  Eigen::VectorXd logs;
  log_gen_eigs(a, b, logs);
  return logs.norm();
}

SpdPoint geodesic(const SpdPoint& a, const SpdPoint& b, double s) {
  check_dims(a, b);
  if (a.dim() == 1)
    return SpdPoint::scalar(std::exp((1.0 - s) * std::log(a.value()) +
                                     s * std::log(b.value())));
  Eigen::MatrixXd a_half = sym_sqrt(a.matrix());
  Eigen::MatrixXd a_ihalf = sym_apply(a.matrix(), [](double x) { return 1.0 / std::sqrt(x); });
  Eigen::MatrixXd mid = sym_power(symmetrize(a_ihalf * b.matrix() * a_ihalf), s);
  return SpdPoint(symmetrize(a_half * mid * a_half));
}

SpdPoint pullback(const SpdPoint& e, const Eigen::MatrixXd& l) {
  if (l.rows() != e.dim() || l.cols() != e.dim()) throw SpdError("dimension mismatch");
  if (std::abs(l.determinant()) < 1e-12) throw SpdError("singular congruence matrix");
  return SpdPoint(symmetrize(l.transpose() * e.matrix() * l));
}

Ball min_enclosing_ball(const std::vector<SpdPoint>& points, double tol) {
  if (points.empty()) throw SpdError("empty point set");
  for (const auto& p : points) check_dims(points.front(), p);
  if (points.size() == 1) return Ball{points.front(), 0.0};
  if (points.front().dim() == 1) {
    double lo = std::log(points.front().value()), hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, std::log(p.value()));
      hi = std::max(hi, std::log(p.value()));
    }
    return Ball{SpdPoint::scalar(std::exp(0.5 * (lo + hi))), 0.5 * (hi - lo)};
  }
  MebOptions opt;
  opt.tol = tol;
  return meb_iterative(points, opt);
}

Ball meb_iterative(const std::vector<SpdPoint>& points, const MebOptions& opt) {
  if (points.empty()) throw SpdError("empty point set");
  SpdPoint c = points.front();
  if (points.size() == 1) return Ball{c, 0.0};
  long steps = 0;
  double radius = 0;

  // Phase A: the plain farthest-point averaging scheme.
  for (int k = 1; k <= opt.phase_a_steps && steps < opt.max_total_steps; ++k, ++steps) {
    const int far = farthest_index(points, c, &radius);
    SpdPoint next = geodesic(c, points[static_cast<std::size_t>(far)], 1.0 / (k + 1));
    const double move = dist(c, next);
    c = next;
    if (move < opt.tol) break;
  }

  // Phase B: short step-decay refinement to localize the support set.
  SpdPoint best = c;
  double best_r = max_dist(points, c);
  for (double t : {0.25, 0.125, 0.0625, 0.03125}) {
    int since_improve = 0;
    for (int i = 0; i < opt.max_stage_steps && steps < opt.max_total_steps; ++i, ++steps) {
      const int far = farthest_index(points, c, &radius);
      if (radius < best_r - 1e-15) {
        best_r = radius;
        best = c;
        since_improve = 0;
      } else if (++since_improve >= 50) {
        break;
      }
      c = geodesic(c, points[static_cast<std::size_t>(far)], t);
    }
  }

  // Phase C: equal-distance polish on the identified support.
  PolishResult polished = support_polish(points, best, opt.tol);
  if (polished.radius <= best_r) return Ball{polished.center, polished.radius};
  return Ball{best, best_r};
}

double hausdorff(const std::vector<SpdPoint>& s1, const std::vector<SpdPoint>& s2) {
  if (s1.empty() || s2.empty()) throw SpdError("empty set in Hausdorff distance");
  auto one_sided = [](const std::vector<SpdPoint>& a, const std::vector<SpdPoint>& b) {
    double worst = 0;
    for (const auto& p : a) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : b) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(s1, s2), one_sided(s2, s1));
}

std::pair<double, double> perturbation_bound_check(const SpdPoint& tau,
                                                   const Eigen::MatrixXd& l) {
  const double lhs = dist(tau, pullback(tau, l));
  Eigen::MatrixXd e = l - Eigen::MatrixXd::Identity(l.rows(), l.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  return {lhs, svd.singularValues()(0)};
}

}  // namespace cocyclelab::spd
