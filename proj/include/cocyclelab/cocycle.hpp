#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cocyclelab/circle_map.hpp"
#include "cocyclelab/norms.hpp"
#include "cocyclelab/sft.hpp"

namespace cocyclelab::cocycle {

class CocycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometrically weighted series over the coordinates of a point:
/// value(x) = offset + amplitude * sum_i weight^{|i|} u(x_i).
struct SeriesParams {
  double offset = 0;
  double amplitude = 0;
  double weight = 0.5;                  // lambda_w
  Eigen::VectorXd symbol_values;        // u per symbol
  double eval(const sft::SftPoint& x) const;
  int truncation() const;               // |i| beyond which terms are < 1e-18
};

/// Generator x -> A(x) of a circle-diffeomorphism cocycle.  Locally constant
/// families read the window word x_{lo}..x_{hi}; series families read all
/// coordinates with geometric weights.
class Generator {
 public:
  enum class Kind {
    RotationTable,
    ConjugatedRotationTable,
    MoebiusTable,
    RotationSeries,
    ConjugatedRotationSeries,
    MoebiusSeries,
  };

  static Generator rotation_table(int window_lo, int window_hi,
                                  std::map<std::string, double> angles);
  static Generator conjugated_rotation_table(int window_lo, int window_hi,
                                             std::map<std::string, diffeo::CircleMap> conj,
                                             std::map<std::string, double> angles);
  static Generator moebius_table(int window_lo, int window_hi,
                                 std::map<std::string, Eigen::Matrix2d> matrices);
  static Generator rotation_series(SeriesParams angle);
  /// A(x) = U(c(fx)) o R_{a(x)} o U(c(x))^{-1} with U the Moebius boost family.
  static Generator conjugated_rotation_series(SeriesParams angle, SeriesParams conj);
  /// Hyperbolic Moebius diag(s, 1/s) with the expanding axis tilted by the
  /// series angle; amplitude 0 gives the constant hyperbolic generator.
  static Generator moebius_series(double s, SeriesParams tilt);

  Kind kind() const { return kind_; }
  bool locally_constant() const;
  int window_lo() const { return window_lo_; }
  int window_hi() const { return window_hi_; }

  diffeo::CircleMap value(const sft::SftPoint& x) const;
  diffeo::CircleMap value_inverse(const sft::SftPoint& x) const;

  /// Rotation part for rotation/conjugated families (oracle hook).
  double angle(const sft::SftPoint& x) const;
  /// Conjugacy g_x for conjugated families (oracle hook).
  diffeo::CircleMap conjugacy(const sft::SftPoint& x) const;

  double declared_beta = 1.0;

 private:
  Generator() = default;
  std::string word(const sft::SftPoint& x) const;
  std::string extended_word(const sft::SftPoint& x) const;
  void build_cache(const std::vector<std::string>& keys_hint);

  Kind kind_ = Kind::RotationTable;
  int window_lo_ = 0, window_hi_ = 0;
  std::map<std::string, double> angle_table_;
  std::map<std::string, diffeo::CircleMap> conj_table_;
  std::map<std::string, Eigen::Matrix2d> moebius_table_;
  // Values keyed by the word that determines them (window word, or window
  // word extended by one symbol for conjugated families).
  mutable std::map<std::string, diffeo::CircleMap> value_cache_;
  mutable std::map<std::string, diffeo::CircleMap> inverse_cache_;
  bool cache_complete_ = false;
  SeriesParams angle_series_;
  SeriesParams conj_series_;
  double moebius_s_ = 1.0;
};

struct Cocycle {
  sft::SpacePtr space;
  Generator gen;
  double q = 1.5;
  double r = 1.25;
  diffeo::NormParams norms;
  double rho() const { return q - r; }
};

/// A(x, n) for any integer n; A(x, 0) = Id, negative n through the inverse
/// branch.
diffeo::CircleMap iterate(const Cocycle& c, const sft::SftPoint& x, long n);

/// Forward/backward incremental products along an orbit; keeps the running
/// map and its inverse so norms and distances never re-invert.
class OrbitProducts {
 public:
  OrbitProducts(const Cocycle& c, sft::SftPoint x);
  /// Advance the forward product by one step: A^{n+1} = A(f^n x) o A^n.
  void step_forward();
  /// Advance the backward product: A^{-(m+1)} = A^{-m} o A(f^{-(m+1)} x)^{-1}.
  void step_backward();
  long forward_n() const { return fwd_n_; }
  long backward_n() const { return bwd_n_; }
  const diffeo::CircleMap& forward() const { return fwd_; }
  const diffeo::CircleMap& forward_inverse() const { return fwd_inv_; }
  const diffeo::CircleMap& backward() const { return bwd_; }
  const diffeo::CircleMap& backward_inverse() const { return bwd_inv_; }

 private:
  const Cocycle* c_;
  sft::SftPoint base_;
  long fwd_n_ = 0, bwd_n_ = 0;
  diffeo::CircleMap fwd_, fwd_inv_, bwd_, bwd_inv_;
};

struct PeriodicDatum {
  sft::SftPoint point;
  int period;        // k with f^k p = p for this return value
  int least_period;
  double norm_q;     // |A_p^k|_{C^q}
  double norm_1;     // |A_p^k|_{C^1}
};

struct PeriodicDataSummary {
  std::vector<PeriodicDatum> data;
  double sup_q = 0, sup_1 = 0;
  /// sup over k in (k_max/2, k_max] relative to sup over k <= k_max/2.
  double growth_ratio = 1.0;
  bool bounded = true;
};

PeriodicDataSummary periodic_data(const Cocycle& c, int k_max,
                                  double growth_threshold = 1.2);

struct ScanRow {
  int x_id = 0;
  long n = 0;
  double norm_r = 0;
  double norm_1 = 0;
  double log_deriv_rate = 0;  // n^{-1} log sup|D A_x^n|
};

struct ScanSummary {
  std::vector<ScanRow> rows;
  double sup_norm = 0;
  int argmax_x = 0;
  long argmax_n = 0;
  long early_n = 10;
  double early_sup = 0;  // sup over |n| <= early_n
  double growth_ratio = 1.0;
  bool growing = false;
};

ScanSummary value_bound_scan(const Cocycle& c,
                             const std::vector<sft::SftPoint>& samples, long n_max,
                             double r, long early_n = 10,
                             double growing_threshold = 1.05);

/// n^{-1} log |D_t A_x^n| for n = +-1..+-n_max (chain rule in log space).
std::vector<std::pair<long, double>> growth_exponent(const Cocycle& c,
                                                     const sft::SftPoint& x, double t,
                                                     long n_max);

struct SubexpRow {
  double eps = 0;
  double K_eps = 0;
  long argmax_n = 0;
  bool stabilized = false;  // max attained by |n| <= n_max/2
};

std::vector<SubexpRow> subexp_fit(const Cocycle& c, const sft::SftPoint& x,
                                  long n_max, double q,
                                  const std::vector<double>& eps_grid);

struct HolderFit {
  diffeo::LogLogFit fit;
  int zero_distance_pairs = 0;
  bool exact = false;  // all sampled pairs gave distance zero
};

HolderFit holder_exponent_fit(const Cocycle& c,
                              const std::vector<std::pair<sft::SftPoint, sft::SftPoint>>& pairs);

}  // namespace cocyclelab::cocycle
