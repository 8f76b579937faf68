#pragma once

#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/holonomy.hpp"
#include "cocyclelab/spd.hpp"

namespace cocyclelab::invmetric {

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldParams {
  int fiber_grid = 1024;
  int horizon = 40;            // orbit truncation |n| <= k
  double log_range_cap = 80;   // |log| beyond this flags an unbounded cocycle
};

/// Orbit pullback set S^k(x,t): scalar entries (D_t A_x^n)^2 * tau_ref for
/// |n| <= k, with the constant reference metric tau_ref = 1.
std::vector<spd::SpdPoint> orbit_pullbacks(const cocycle::Cocycle& c,
                                           const sft::SftPoint& x, double t, int k);

/// Circumcenter of the orbit pullback set: for scalar fibers the exact
/// log-midpoint exp((min log + max log)/2).
double tau_hat(const cocycle::Cocycle& c, const sft::SftPoint& x, double t, int k);

/// Center over the window n in [lo, hi] (bookkeeping variant used by the
/// finite-horizon equivariance identity).
double tau_hat_window(const cocycle::Cocycle& c, const sft::SftPoint& x, double t,
                      int lo, int hi);

/// |log( tau_hat(F(x,t)) * (D_t A_x)^2 / tau_hat(x,t) )| at matching horizons.
double invariance_defect(const cocycle::Cocycle& c, const sft::SftPoint& x, double t,
                         int k);

struct RowDiag {
  double gap_last = 0;  // max_t |log tau^k - log tau^{k-1}|
  double gap_half = 0;  // max_t |log tau^k - log tau^{k/2}|
  double interp_osc = 0;  // max neighbor oscillation of the log density
};

/// log rho_x(t_j) over the fiber grid, with stabilization diagnostics.
Eigen::ArrayXd log_density_row(const cocycle::Cocycle& c, const sft::SftPoint& x,
                               const FieldParams& p, RowDiag* diag = nullptr);

/// Circular linear interpolation of a log-density row at fiber point t.
double interp_log_density(const Eigen::ArrayXd& row, double t);

/// Sampled field x -> tau_hat_x as log densities over base samples.
struct MetricField {
  cocycle::Cocycle c;
  FieldParams params;
  std::vector<sft::SftPoint> base_points;
  std::vector<std::string> keys;
  Eigen::MatrixXd log_rho;  // rows: base points, cols: fiber grid
  std::vector<RowDiag> diags;

  int find(const sft::SftPoint& x) const;  // -1 when absent
};

MetricField build_field(const cocycle::Cocycle& c,
                        const std::vector<sft::SftPoint>& samples,
                        const FieldParams& p);

struct FiberHolderFit {
  diffeo::LogLogFit fit;
  bool exact = false;  // constant field
};

FiberHolderFit fiber_holder_check(const MetricField& field, double eps0 = 0.25);

struct IsometryDefect {
  double defect = 0;
  double budget_tail = 0;
  double budget_horizon = 0;
  double budget_interp = 0;
  double budget() const { return budget_tail + budget_horizon + budget_interp; }
};

enum class Side { Stable, Unstable };

/// sup_t |log( rho_y(H(t)) H'(t)^2 / rho_x(t) )| for the computed holonomy,
/// with the truncation/interpolation budget alongside.
IsometryDefect holonomy_isometry_defect(const cocycle::Cocycle& c,
                                        const sft::SftPoint& x, const sft::SftPoint& y,
                                        const FieldParams& p, Side side,
                                        const holonomy::HolonomyParams& hp = {});

/// C^alpha distance between two fiber metrics: sup of |log rho_x - log rho_y|
/// plus the alpha-seminorm of the difference of log densities.
double fiber_metric_distance(const Eigen::ArrayXd& row_x, const Eigen::ArrayXd& row_y,
                             double alpha, double eps0 = 0.25);

struct BaseHolderFit {
  diffeo::LogLogFit fit;
  double uniform_constant = 0;  // max d_T / d^{beta rho}
  int zero_pairs = 0;
  bool exact = false;
};

BaseHolderFit base_holder_check(const cocycle::Cocycle& c, const FieldParams& p,
                                const std::vector<std::pair<sft::SftPoint, sft::SftPoint>>& pairs,
                                double alpha, double beta_rho);

struct Thm13Tolerances {
  double trivial_defect = 1e-10;   // families with constant fields (F1)
  double isometry_defect = 1e-3;
  double exponent_slack = 0.1;
  double bracket_factor = 3.0;
  int gate_k_max = 6;
  double gate_growth_threshold = 1.2;
};

struct Thm13Report {
  std::string verdict;  // PASS / FAIL / NOT-APPLICABLE
  bool gate_bounded = false;
  double gate_growth_ratio = 0;
  double isometry_defect = 0;
  FiberHolderFit fiber;
  BaseHolderFit base_stable;
  BaseHolderFit base_unstable;
  double bracket_constant = 0;     // uniform constant over bracket-routed pairs
  double leaf_constant = 0;        // max of the two leaf-wise constants
  diffeo::LogLogFit joint_fit;
  bool joint_exact = false;
  double alpha = 0;
  double beta_rho = 0;
  std::vector<std::string> failures;
};

Thm13Report theorem13_verdict(const cocycle::Cocycle& c, const FieldParams& p,
                              const std::vector<sft::SftPoint>& samples,
                              double alpha, double beta,
                              const Thm13Tolerances& tol = {});

}  // namespace cocyclelab::invmetric
