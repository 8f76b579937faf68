#pragma once

#include "cocyclelab/cocycle.hpp"

namespace cocyclelab::holonomy {

/// Raised when the consecutive-term distances of the holonomy limit fail to
/// decay, i.e. the sub-exponential-growth hypothesis is violated.
class NoDecayError : public cocycle::CocycleError {
 public:
  using cocycle::CocycleError::CocycleError;
};

struct HolonomyResult {
  diffeo::CircleMap map;          // H^{s/u}_{x,y}
  diffeo::CircleMap map_inverse;  // H_{y,x} = H^{-1}, maintained incrementally
  long n_used = 0;
  std::vector<double> consecutive_dists;  // d_{C^r}(H_n, H_{n+1})
  double theta_hat = 0;                   // fitted geometric ratio
  double tail_bound = 0;                  // d_last * theta / (1 - theta)
  double max_dist_to_id = 0;              // sup_n d_{C^r}(H_n, Id), for (3.4)
};

struct HolonomyParams {
  double r = 1.25;
  double tol = 1e-9;
  long n_max = 120;
};

/// H^s_{x,y} = lim (A_y^n)^{-1} o A_x^n for y in W^s_loc(x).  Stops when the
/// fitted geometric tail puts the truncation error below tol; throws
/// NoDecayError when consecutive distances fail to decrease over a ten-step
/// window.
HolonomyResult stable_holonomy(const cocycle::Cocycle& c, const sft::SftPoint& x,
                               const sft::SftPoint& y, const HolonomyParams& p = {});

/// Mirror limit along n -> -infinity for y in W^u_loc(x).
HolonomyResult unstable_holonomy(const cocycle::Cocycle& c, const sft::SftPoint& x,
                                 const sft::SftPoint& y, const HolonomyParams& p = {});

/// d_{C^r}(H_{y,z} o H_{x,y}, H_{x,z}) for y, z in W^s_loc(x).
double verify_H1(const cocycle::Cocycle& c, const sft::SftPoint& x,
                 const sft::SftPoint& y, const sft::SftPoint& z,
                 const HolonomyParams& p = {});

/// d_{C^r} between H_{x,y} and (A_y^n)^{-1} o H_{f^n x, f^n y} o A_x^n.
double verify_H2(const cocycle::Cocycle& c, const sft::SftPoint& x,
                 const sft::SftPoint& y, long n, const HolonomyParams& p = {});

struct H3Fit {
  diffeo::LogLogFit fit;         // log d_{C^r}(H, Id) against log d_X(x, y)
  double uniform_constant = 0;   // max over pairs of final dist / d^{beta rho}
  bool intermediate_bound_ok = true;  // (3.4) with the fitted constant x 1.1
  int zero_pairs = 0;
  bool exact = false;
};

H3Fit fit_H3(const cocycle::Cocycle& c,
             const std::vector<std::pair<sft::SftPoint, sft::SftPoint>>& stable_pairs,
             double beta_rho, const HolonomyParams& p = {});

struct SkewContraction {
  std::vector<double> dists;     // d_{X x M}(F^n(x,t), F^n(y,t')) for n = 1..
  double crosscheck_sup = 0;     // sup_n |A_y^n(t') - H_{f^n x, f^n y}(A_x^n t)|
};

/// Contraction along the skew-product stable set through (x, t), with
/// t' = H^s_{x,y}(t).
SkewContraction skew_stable_contraction(const cocycle::Cocycle& c,
                                        const sft::SftPoint& x, double t,
                                        const sft::SftPoint& y, long n_max,
                                        const HolonomyParams& p = {});

}  // namespace cocyclelab::holonomy
