#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <variant>

namespace cocyclelab::diffeo {

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distance on the circle R/Z of circumference 1.
double circle_dist(double a, double b);

/// Wrap to [0, 1).
double wrap01(double t);

/// Wrap to [-1/2, 1/2).
double wrap_half(double t);

inline constexpr double kDerivativeFloor = 1e-6;

/// Exact rotation t -> t + angle.
struct Rotation {
  double angle = 0.0;  // canonical representative in [0, 1)
};

/// Boundary action of an SL(2,R) matrix on the circle, transported through
/// the fixed Cayley chart to R/Z.  Internally the disk-model coefficients
/// (alpha, beta) with |alpha|^2 - |beta|^2 = 1 are cached; the canonical lift
///   F(t) = t + arg(alpha)/pi + Arg(1 + (beta/alpha) e^{-2 pi i t}) / pi
/// is globally continuous because |beta/alpha| < 1.
struct Moebius {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  std::complex<double> alpha{1.0, 0.0};
  std::complex<double> beta{0.0, 0.0};
};

/// Sampled displacement phi(t) = F(t) - t on a power-of-two uniform grid with
/// cached trigonometric interpolation coefficients.
struct GridDiffeo {
  int n = 0;
  Eigen::ArrayXd disp;            // phi at t_j = j/n
  Eigen::ArrayXcd half_spectrum;  // c_0..c_{n/2}, c_k = (1/n) sum phi_j w^{-jk}
};

/// Orientation-preserving circle diffeomorphism in one of three
/// representations.  Values are immutable; all operations are free functions
/// returning new maps.
class CircleMap {
 public:
  CircleMap() : rep_(Rotation{0.0}) {}

  static CircleMap identity() { return CircleMap(); }
  static CircleMap rotation(double angle);
  static CircleMap moebius(const Eigen::Matrix2d& sl2);
  /// Hyperbolic one-parameter subgroup exp(c * [[0,1],[1,0]]); a convenient
  /// smooth family of conjugacies.
  static CircleMap moebius_boost(double c);
  static CircleMap grid_from_function(int n, const std::function<double(double)>& lift_fn);
  static CircleMap grid_from_displacement(Eigen::ArrayXd disp);
  /// Displacement given by a finite Fourier series:
  /// phi(t) = c0 + sum_m cos_m cos(2 pi (m+1) t) + sin_m sin(2 pi (m+1) t).
  static CircleMap grid_from_fourier(int n, double c0, const Eigen::VectorXd& cos_coef,
                                     const Eigen::VectorXd& sin_coef);

  bool is_rotation() const { return std::holds_alternative<Rotation>(rep_); }
  bool is_moebius() const { return std::holds_alternative<Moebius>(rep_); }
  bool is_grid() const { return std::holds_alternative<GridDiffeo>(rep_); }

  const Rotation& rotation_rep() const { return std::get<Rotation>(rep_); }
  const Moebius& moebius_rep() const { return std::get<Moebius>(rep_); }
  const GridDiffeo& grid_rep() const { return std::get<GridDiffeo>(rep_); }

  /// Canonical continuous lift; F(t + 1) = F(t) + 1.
  double lift(double t) const;
  double displacement(double t) const { return lift(t) - t; }
  double circle_value(double t) const { return wrap01(lift(t)); }

  /// Pointwise derivative of the lift, order in {1, 2, 3}.
  double derivative(int order, double t) const;

  /// Lift sampled at t_j = j/N (fast spectral resampling for grid maps).
  Eigen::ArrayXd lift_grid(int N) const;
  /// Derivative of given order (0 = displacement) sampled at t_j = j/N.
  Eigen::ArrayXd derivative_grid(int order, int N) const;

  int grid_size_hint() const {
    return is_grid() ? std::get<GridDiffeo>(rep_).n : 0;
  }

 private:
  explicit CircleMap(Rotation r) : rep_(r) {}
  explicit CircleMap(Moebius m) : rep_(std::move(m)) {}
  explicit CircleMap(GridDiffeo g) : rep_(std::move(g)) {}
  friend CircleMap compose(const CircleMap&, const CircleMap&);
  friend CircleMap invert(const CircleMap&);

  std::variant<Rotation, Moebius, GridDiffeo> rep_;
};

/// result(t) = g(h(t)).  Rotation pairs stay rotations, Moebius-representable
/// pairs stay Moebius (a rotation is promoted exactly), anything involving a
/// grid map is resampled onto a grid.
CircleMap compose(const CircleMap& g, const CircleMap& h);

CircleMap invert(const CircleMap& g);

/// Forced grid representation of any map, n samples.
CircleMap to_grid(const CircleMap& g, int n);

}  // namespace cocyclelab::diffeo
