#pragma once

#include "cocyclelab/report.hpp"
#include "cocyclelab/scenario.hpp"

namespace cocyclelab::lab {

struct RunOptions {
  std::string out_dir = "out";
  std::uint64_t seed_override = 0;  // 0 keeps the scenario seed
  bool strict = false;
  int jobs = 1;  // accepted for interface compatibility; execution is serial
};

// Exit codes: 0 pass, 1 check failed.  Config problems throw ConfigError,
// which the CLI maps to exit 2.
int run_cocycle_eq(const Scenario& s, const RunOptions& opt);
int run_holonomy(const Scenario& s, const RunOptions& opt);
int run_growth(const Scenario& s, const RunOptions& opt);
int run_boundedness(const Scenario& s, const RunOptions& opt);
int run_invariant_metric(const Scenario& s, const RunOptions& opt);
int verify_thm12(const Scenario& s, const RunOptions& opt);
int verify_thm13(const Scenario& s, const RunOptions& opt);

/// Standalone minimal-enclosing-ball utility over a JSON point-set file.
int spd_meb_util(const std::string& input_path, const std::string& out_path);

}  // namespace cocyclelab::lab
