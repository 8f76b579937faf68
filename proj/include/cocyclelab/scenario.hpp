#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "cocyclelab/cocycle.hpp"

namespace cocyclelab::lab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// Declarative experiment description.  All real numbers travel as decimal
/// strings in the config for bit-stable reruns.
struct Scenario {
  std::string name;
  Eigen::MatrixXi transition;
  double lambda = 0.5;
  std::string family;  // generator family tag, informational
  double q = 1.5, r = 1.25, alpha = 0.25, beta = 1.0, eps0 = 0.25;
  long n_max = 60;
  int k_horizon = 40;
  int n_grid = 1024;
  int norm_grid = 4096;
  int samples = 100;
  int scan_samples = 8;
  int periodic_k_max = 6;
  std::uint64_t seed = 20250809;
  std::map<std::string, double> tolerances;  // named thresholds, all > 0
  std::string out_dir = "out";
  Json raw;  // canonical form, hashed into reports

  double tol(const std::string& key, double fallback) const;
};

Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::string& path);

/// Canonical family configs: f1 (constant rotation), f2 (locally constant
/// rotation angles), f3lc (locally constant conjugated rotations), f3s
/// (series conjugated rotations), f4 (series rotation angles), f5 (constant
/// hyperbolic Moebius), f5h (series-tilted hyperbolic, the holonomy negative
/// control).  `base` picks the subshift: "full2" or "golden".
Json builtin_scenario(const std::string& family, const std::string& base = "full2");

cocycle::Cocycle make_cocycle(const Scenario& s);

/// Deterministic base-point sample: Parry draws plus all periodic points up
/// to the configured period.
std::vector<sft::SftPoint> scenario_samples(const Scenario& s, int count,
                                            bool with_periodic = true);

/// Map literal parser: {"rotation": a} | {"moebius": [[..]]} | {"boost": c} |
/// {"grid": {"n":.., "const":.., "fourier": {"cos": [...], "sin": [...]}}}.
diffeo::CircleMap parse_map_literal(const Json& j);

double parse_real(const Json& j);  // decimal-string or number

}  // namespace cocyclelab::lab
