#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cocyclelab/rng.hpp"

namespace cocyclelab::sft {

class SftError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixing subshift of finite type over symbols 0..k-1 with 0/1 transition
/// matrix and metric d(x,y) = lambda^{n(x,y)}.
class SftSpace {
 public:
  SftSpace(Eigen::MatrixXi transition, double lambda);

  int alphabet_size() const { return static_cast<int>(transition_.rows()); }
  const Eigen::MatrixXi& transition() const { return transition_; }
  int mixing_power() const { return mixing_power_; }
  double lambda() const { return lambda_; }

  bool allowed(int a, int b) const { return transition_(a, b) == 1; }

  /// Lexicographically smallest word w of minimal length <= mixing_power such
  /// that a w b is admissible (w may be empty).  Deterministic connector used
  /// by dense-orbit construction and tail completion.
  std::string connector(int a, int b) const;

  /// Lexicographically smallest admissible cycle word starting from the
  /// smallest symbol; used as a canonical periodic tail.
  const std::string& canonical_cycle() const { return canonical_cycle_; }

  bool operator==(const SftSpace& o) const {
    return transition_ == o.transition_ && lambda_ == o.lambda_;
  }

 private:
  Eigen::MatrixXi transition_;
  double lambda_;
  int mixing_power_;
  std::string canonical_cycle_;
};

using SpacePtr = std::shared_ptr<const SftSpace>;

SpacePtr make_space(Eigen::MatrixXi transition, double lambda);
SpacePtr full_shift(int k, double lambda);
SpacePtr golden_mean_shift(double lambda);

/// Bi-infinite admissible sequence in eventually periodic representation:
/// left period repeating toward -inf, a finite core on
/// [core_start, core_start + core.size()), right period toward +inf.
/// Words are digit strings over '0'..'9' (alphabet size <= 10).
class SftPoint {
 public:
  SftPoint(SpacePtr space, std::string left_period, std::string core,
           std::int64_t core_start, std::string right_period);

  const SpacePtr& space() const { return space_; }
  int symbol_at(std::int64_t i) const;

  const std::string& left_period() const { return left_; }
  const std::string& core() const { return core_; }
  std::int64_t core_start() const { return core_start_; }
  std::int64_t core_end() const {
    return core_start_ + static_cast<std::int64_t>(core_.size());
  }
  const std::string& right_period() const { return right_; }

  /// Window of symbols [lo, hi] as a digit string.
  std::string window(std::int64_t lo, std::int64_t hi) const;

  /// `left|core@start|right` with words as digit strings.
  std::string serialize() const;
  static SftPoint parse(SpacePtr space, const std::string& text);

 private:
  friend SftPoint shift(const SftPoint& x, std::int64_t n);
  SpacePtr space_;
  std::string left_, core_, right_;
  std::int64_t core_start_;
};

SftPoint shift(const SftPoint& x, std::int64_t n);

/// Purely periodic point p with symbol_at(i) = word[i mod word.size()],
/// the representative word occupying [0, word.size()).
SftPoint periodic_point(SpacePtr space, const std::string& word);

/// d(x,y) = lambda^{n(x,y)}, 0 iff x = y (decided exactly via the eventually
/// periodic representation).
double metric(const SftPoint& x, const SftPoint& y);

bool same_point(const SftPoint& x, const SftPoint& y);

bool in_local_stable(const SftPoint& x, const SftPoint& y);    // agree on i >= 0
bool in_local_unstable(const SftPoint& x, const SftPoint& y);  // agree on i <= 0

/// y_i = x_i for i >= 0, z_i for i <= 0; requires x_0 = z_0.
SftPoint bracket(const SftPoint& x, const SftPoint& z);

/// metric(f^n x, f^n y) for y in W^s_loc(x); equals lambda^n d(x,y) exactly.
double stable_contraction_check(const SftPoint& x, const SftPoint& y, int n);

/// Stable-leaf partner at exact distance lambda^depth: agrees with x at every
/// i > -depth, differs at -depth, canonical tail below.  Empty when the
/// transition structure admits no alternative symbol there.
std::optional<SftPoint> stable_partner(const SftPoint& x, int depth);

/// Mirror surgery on the future side: differs exactly at +depth.
std::optional<SftPoint> unstable_partner(const SftPoint& x, int depth);

/// Periodic shadow of Lemma-3.8 type with constant c = 1: requires x_0 = x_k
/// (i.e. d(x, f^k x) < 1) and returns the periodization of x_0..x_{k-1}.
SftPoint closing(const SftPoint& x, int k);

struct PeriodicOrbitPoint {
  SftPoint point;
  int least_period;
};

/// All points with f^k p = p for some k <= k_max, each listed once with its
/// least period.  Throws if the enumeration exceeds `budget` points.
std::vector<PeriodicOrbitPoint> periodic_points(const SpacePtr& space, int k_max,
                                                std::size_t budget = 2'000'000);

/// Number of points with f^k p = p, i.e. trace(M^k), computed in integers.
std::int64_t periodic_point_count(const SftSpace& space, int k);

/// A point whose forward orbit visits every admissible cylinder of length
/// 2L+1; the concatenation of all such words joined by connectors.
SftPoint dense_orbit_point(const SpacePtr& space, int depth_L,
                           std::size_t budget = 4'000'000);

std::vector<std::string> admissible_words(const SftSpace& space, int length,
                                          std::size_t budget = 4'000'000);

/// Measure of maximal entropy: Parry construction from the Perron eigendata
/// of the transition matrix.
struct MarkovMeasure {
  SpacePtr space;
  Eigen::VectorXd stationary;  // pi, positive, sums to 1
  Eigen::MatrixXd kernel;      // row-stochastic P supported on the transition
  double perron_root = 0;
};

MarkovMeasure parry_measure(const SpacePtr& space);

/// Probability of the cylinder fixing symbols word at positions
/// [pos, pos + word.size()).
double cylinder_measure(const MarkovMeasure& mu, const std::string& word);

/// Two-sided stationary chain sample, materialized as Markov symbols on
/// [-window, window] and canonical periodic tails beyond.
std::vector<SftPoint> sample(const MarkovMeasure& mu, std::uint64_t rng_seed,
                             int count, int window = 64);

}  // namespace cocyclelab::sft
