#pragma once

#include <optional>
#include <vector>

#include "cocyclelab/circle_map.hpp"

namespace cocyclelab::diffeo {

inline constexpr int kNormGrid = 4096;
inline constexpr double kDefaultEps0 = 0.25;

/// C^{k+alpha} size report for a circle diffeomorphism.  r = k + alpha with
/// k in {0,1,2}, alpha in [0,1).  Sup norms are taken over a uniform
/// evaluation grid; the Hoelder seminorm of D^k ranges over grid pairs at
/// circle distance below eps0.
struct NormReport {
  double r = 0;
  int k = 0;
  double alpha = 0;
  double sup_displacement = 0;
  std::vector<double> deriv_sups;  // orders 1..k
  double holder_seminorm = 0;
  double one_sided = 0;  // ||g||_{C^r}
  double two_sided = 0;  // |g|_{C^r} = ||g|| + ||g^{-1}||
};

struct NormParams {
  double eps0 = kDefaultEps0;
  int grid = kNormGrid;
};

NormReport norm_report(const CircleMap& g, double r, const NormParams& p = {},
                       const CircleMap* inverse = nullptr);

/// ||g||_{C^r} of the map alone (no inverse term).
double one_sided_norm(const CircleMap& g, double r, const NormParams& p = {});

/// Norm-difference surrogate ||g - h||_{C^r} + ||g^{-1} - h^{-1}||_{C^r} on
/// aligned lifts; requires sup_t d_M(g(t), h(t)) < 1/2.
double dist_cr(const CircleMap& g, const CircleMap& h, double r,
               const NormParams& p = {}, const CircleMap* g_inv = nullptr,
               const CircleMap* h_inv = nullptr);

/// One-sided difference norm ||g - h||_{C^r} (used where only the forward
/// branch matters).
double diff_norm_cr(const CircleMap& g, const CircleMap& h, double r,
                    const NormParams& p = {});

/// Smallest constant C with lhs <= C * rhs over the sample, i.e.
/// max(lhs/rhs).  Throws on empty input or nonpositive rhs.
double fit_inequality_constant(const std::vector<std::pair<double, double>>& pairs);

/// alpha-Hoelder seminorm of grid samples over circular lags below eps0;
/// wrap_shift is added when an index wraps (1 for lift samples, 0 for
/// periodic data).
double grid_holder_seminorm(const Eigen::ArrayXd& values, double alpha, double eps0,
                            double wrap_shift = 0.0);

/// Least-squares fit of log(y) = slope * log(x) + intercept over the pairs
/// with x > 0 and y > 0.
struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  int n_used = 0;
  bool degenerate = false;  // fewer than two distinct abscissae survived
};

LogLogFit loglog_fit(const std::vector<std::pair<double, double>>& xy);

}  // namespace cocyclelab::diffeo
