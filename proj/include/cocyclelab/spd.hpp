#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace cocyclelab::spd {

class SpdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric positive definite form on R^m.  Symmetry is enforced to 1e-12
/// and the spectrum must stay above 1e-10.
class SpdPoint {
 public:
  explicit SpdPoint(Eigen::MatrixXd matrix);
  static SpdPoint identity(int dim) {
    return SpdPoint(Eigen::MatrixXd::Identity(dim, dim));
  }
  static SpdPoint scalar(double a) {
    return SpdPoint(Eigen::MatrixXd::Constant(1, 1, a));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double value() const { return m_(0, 0); }  // m = 1 convenience

 private:
  Eigen::MatrixXd m_;
};

struct Ball {
  SpdPoint center;
  double radius = 0;
};

// Symmetric matrix functions used by the geometry (eigendecomposition based,
// resymmetrized to suppress drift).
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m);
Eigen::MatrixXd sym_log(const Eigen::MatrixXd& m);
Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& m);
Eigen::MatrixXd sym_power(const Eigen::MatrixXd& m, double s);

/// Affine-invariant distance: Frobenius norm of log(A^{-1/2} B A^{-1/2}),
/// i.e. the l2 norm of the log generalized eigenvalues.
double dist(const SpdPoint& a, const SpdPoint& b);

/// Geodesic A^{1/2} (A^{-1/2} B A^{-1/2})^s A^{1/2}; s in [0,1] interpolates.
SpdPoint geodesic(const SpdPoint& a, const SpdPoint& b, double s);

/// Congruence action L^T E L (an isometry of the space for fixed invertible L).
SpdPoint pullback(const SpdPoint& e, const Eigen::MatrixXd& l);

struct MebOptions {
  double tol = 1e-8;
  int phase_a_steps = 200;   // prescribed 1/(k+1) farthest-point averaging
  int max_stage_steps = 2000;
  long max_total_steps = 100000;
};

/// Smallest enclosing ball.  m = 1 uses the exact log-midpoint closed form;
/// m >= 2 runs farthest-point iteration with a step-decay refinement and an
/// exact two-point-support upgrade.
Ball min_enclosing_ball(const std::vector<SpdPoint>& points, double tol = 1e-8);

/// The iterative solver on its own (any m), for cross-checks against the
/// closed form.
Ball meb_iterative(const std::vector<SpdPoint>& points, const MebOptions& opt = {});

double hausdorff(const std::vector<SpdPoint>& s1, const std::vector<SpdPoint>& s2);

/// (lhs, rhs) of the perturbation bound: distance moved by the congruence
/// action of a near-identity L against the operator norm of L - Id.
std::pair<double, double> perturbation_bound_check(const SpdPoint& tau,
                                                   const Eigen::MatrixXd& l);

}  // namespace cocyclelab::spd
