// Command-line driver for the cocycle laboratory: scenario-based experiment
// pipelines with deterministic JSON/CSV reports.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "cocyclelab/report.hpp"
#include "cocyclelab/runner.hpp"
#include "cocyclelab/scenario.hpp"

namespace lab = cocyclelab::lab;

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool scenario_required = true) {
  auto* s = cmd->add_option("--scenario", args.scenario_path, "scenario config file");
  if (scenario_required) s->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the scenario RNG seed");
  cmd->add_option("--jobs", args.jobs, "worker count (runs are serial and deterministic)");
  cmd->add_flag("--strict", args.strict, "fail on any tolerance breach");
}

int dispatch(const CommonArgs& args, int (*fn)(const lab::Scenario&, const lab::RunOptions&)) {
  lab::Scenario s = lab::load_scenario(args.scenario_path);
  lab::RunOptions opt{args.out_dir, args.seed, args.strict, args.jobs};
  return fn(s, opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for diffeomorphism cocycles over subshifts"};
  app.require_subcommand(1);

  CommonArgs check_args, hol_args, growth_args, bound_args, inv_args, t12_args, t13_args;

  auto* check = app.add_subcommand("check", "algebraic identity checks");
  check->require_subcommand(1);
  auto* check_eq = check->add_subcommand("cocycle-eq", "cocycle equation on random triples");
  add_common(check_eq, check_args);

  auto* run = app.add_subcommand("run", "experiment pipelines");
  run->require_subcommand(1);
  auto* run_hol = run->add_subcommand("holonomy", "stable/unstable holonomy limits");
  add_common(run_hol, hol_args);
  auto* run_growth = run->add_subcommand("growth", "fiber derivative growth rates");
  add_common(run_growth, growth_args);
  auto* run_bound = run->add_subcommand("boundedness", "periodic data and value scans");
  add_common(run_bound, bound_args);
  auto* run_inv = run->add_subcommand("invariant-metric", "circumcenter metric field");
  add_common(run_inv, inv_args);

  auto* verify = app.add_subcommand("verify", "theorem-level verdicts");
  verify->require_subcommand(1);
  auto* v12 = verify->add_subcommand("thm12", "boundedness from bounded periodic data");
  add_common(v12, t12_args);
  auto* v13 = verify->add_subcommand("thm13", "invariant metric construction");
  add_common(v13, t13_args);

  std::string meb_file, meb_out;
  auto* spd_cmd = app.add_subcommand("spd", "SPD geometry utilities");
  spd_cmd->require_subcommand(1);
  auto* meb = spd_cmd->add_subcommand("meb", "minimal enclosing ball of a point set");
  meb->add_option("file", meb_file, "JSON point-set file")->required();
  meb->add_option("--out", meb_out, "write result here instead of stdout");

  std::string render_file;
  auto* report = app.add_subcommand("report", "report utilities");
  report->require_subcommand(1);
  auto* render = report->add_subcommand("render", "print a JSON report as a table");
  render->add_option("file", render_file, "report file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (check_eq->parsed()) return dispatch(check_args, lab::run_cocycle_eq);
    if (run_hol->parsed()) return dispatch(hol_args, lab::run_holonomy);
    if (run_growth->parsed()) return dispatch(growth_args, lab::run_growth);
    if (run_bound->parsed()) return dispatch(bound_args, lab::run_boundedness);
    if (run_inv->parsed()) return dispatch(inv_args, lab::run_invariant_metric);
    if (v12->parsed()) return dispatch(t12_args, lab::verify_thm12);
    if (v13->parsed()) return dispatch(t13_args, lab::verify_thm13);
    if (meb->parsed()) return lab::spd_meb_util(meb_file, meb_out);
    if (render->parsed()) {
      lab::Json j = lab::Json::parse(lab::read_text_file(render_file));
      std::printf("%s", lab::render_report(j).c_str());
      return 0;
    }
  } catch (const lab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "check failed with error: %s\n", e.what());
    return 1;
  }
  return 2;
}
