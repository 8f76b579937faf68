#include "cocyclelab/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cocyclelab/holonomy.hpp"
#include "cocyclelab/invariant_metric.hpp"
#include "cocyclelab/rng.hpp"
#include "cocyclelab/spd.hpp"

namespace cocyclelab::lab {

namespace {

using cocycle::Cocycle;
using sft::SftPoint;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::uint64_t effective_seed(const Scenario& s, const RunOptions& opt) {
  return opt.seed_override ? opt.seed_override : s.seed;
}

Json report_head(const Scenario& s, const RunOptions& opt, const char* command) {
  Json j;
  j["command"] = command;
  j["scenario"] = s.name;
  j["scenario_hash"] = std::to_string(fnv1a(s.raw.dump()));
  j["seed"] = effective_seed(s, opt);
  return j;
}

std::string out_path(const RunOptions& opt, const std::string& file) {
  std::filesystem::create_directories(opt.out_dir);
  return opt.out_dir + "/" + file;
}

Scenario with_seed(const Scenario& s, const RunOptions& opt) {
  Scenario t = s;
  t.seed = effective_seed(s, opt);
  return t;
}

}  // namespace

int run_cocycle_eq(const Scenario& scenario, const RunOptions& opt) {
  Stopwatch clock;
  Scenario s = with_seed(scenario, opt);
  Cocycle c = make_cocycle(s);
  auto samples = scenario_samples(s, std::max(8, s.scan_samples), false);
  Rng rng = Rng::labeled(s.seed, "check.cocycle-eq");
  const double tol = s.tol("cocycle_eq", 1e-9);
  const int triples = 200;
  double sup_eq = 0, sup_inv = 0;
  for (int i = 0; i < triples; ++i) {
    const SftPoint& x = samples[static_cast<std::size_t>(rng.index(static_cast<int>(samples.size())))];
    const long n = static_cast<long>(rng.index(21)) - 10;
    const long k = static_cast<long>(rng.index(21)) - 10;
    auto lhs = iterate(c, x, n + k);
    auto rhs = compose(iterate(c, shift(x, k), n), iterate(c, x, k));
    sup_eq = std::max(sup_eq, diffeo::dist_cr(lhs, rhs, 1.0, c.norms));
    auto fwd = iterate(c, x, n);
    auto back = iterate(c, shift(x, n), -n);
    sup_inv = std::max(sup_inv, diffeo::dist_cr(back, invert(fwd), 1.0, c.norms));
  }
  const bool pass = sup_eq <= tol && sup_inv <= tol;
  Json j = report_head(s, opt, "check cocycle-eq");
  j["triples"] = triples;
  j["sup_defect_equation"] = sup_eq;
  j["sup_defect_inverse_branch"] = sup_inv;
  j["tolerance"] = tol;
  j["pass"] = pass;
  write_report(out_path(opt, "cocycle_eq.json"), j, clock.seconds());
  return pass ? 0 : 1;
}

int run_holonomy(const Scenario& scenario, const RunOptions& opt) {
  Stopwatch clock;
  Scenario s = with_seed(scenario, opt);
  Cocycle c = make_cocycle(s);
  auto samples = scenario_samples(s, 4, false);
  holonomy::HolonomyParams hp{s.r, s.tol("holonomy_tol", 1e-9), s.n_max};
  const bool expect_no_decay = s.tol("expect_no_decay", 0) > 0;

  Json j = report_head(s, opt, "run holonomy");
  Json rows = Json::array();
  bool no_decay_seen = false;
  std::string no_decay_msg;
  double worst_tail = 0;
  try {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (int depth : {2, 4, 6}) {
        auto y = sft::stable_partner(samples[i], depth);
        if (!y) continue;
        auto h = holonomy::stable_holonomy(c, samples[i], *y, hp);
        Json row;
        row["pair"] = {{"x", samples[i].serialize()}, {"y", y->serialize()}};
        row["side"] = "stable";
        row["n_used"] = h.n_used;
        row["theta_hat"] = h.theta_hat;
        row["tail_bound"] = h.tail_bound;
        rows.push_back(row);
        worst_tail = std::max(worst_tail, h.tail_bound);
        auto yu = sft::unstable_partner(samples[i], depth);
        if (!yu) continue;
        auto hu = holonomy::unstable_holonomy(c, samples[i], *yu, hp);
        Json urow;
        urow["pair"] = {{"x", samples[i].serialize()}, {"y", yu->serialize()}};
        urow["side"] = "unstable";
        urow["n_used"] = hu.n_used;
        urow["theta_hat"] = hu.theta_hat;
        urow["tail_bound"] = hu.tail_bound;
        rows.push_back(urow);
      }
    }
    j["holonomies"] = rows;
    // Identity defects and the H3 law on the first sample.
    const SftPoint& x = samples.front();
    auto y2 = sft::stable_partner(x, 2);
    auto y4 = sft::stable_partner(x, 4);
    Json defects;
    if (y2 && y4) {
      defects["H1"] = holonomy::verify_H1(c, x, *y2, *y4, hp);
      defects["H2"] = holonomy::verify_H2(c, x, *y2, 3, hp);
    }
    std::vector<std::pair<SftPoint, SftPoint>> pairs;
    for (int depth = 1; depth <= 11; ++depth)
      if (auto y = sft::stable_partner(x, depth)) pairs.emplace_back(x, *y);
    auto h3 = holonomy::fit_H3(c, pairs, s.beta * c.rho(), hp);
    defects["H3_fit"] = {{"slope", h3.fit.slope},
                         {"constant", h3.uniform_constant},
                         {"exact", h3.exact},
                         {"intermediate_bound_ok", h3.intermediate_bound_ok}};
    j["defects"] = defects;
  } catch (const holonomy::NoDecayError& e) {
    no_decay_seen = true;
    no_decay_msg = e.what();
  }
  j["no_decay_error"] = no_decay_seen;
  if (no_decay_seen) j["no_decay_message"] = no_decay_msg;
  j["expected_no_decay"] = expect_no_decay;
  const bool pass = expect_no_decay == no_decay_seen;
  j["pass"] = pass;
  write_report(out_path(opt, "holonomy.json"), j, clock.seconds());
  return pass ? 0 : 1;
}

int run_growth(const Scenario& scenario, const RunOptions& opt) {
  Stopwatch clock;
  Scenario s = with_seed(scenario, opt);
  Cocycle c = make_cocycle(s);
  auto samples = scenario_samples(s, 3, true);
  std::ostringstream csv;
  csv << "x_id,t,n,rate\n";
  Json j = report_head(s, opt, "run growth");
  Json finals = Json::array();
  const std::vector<double> ts = {0.0, 0.37, 0.5};
  for (std::size_t i = 0; i < samples.size() && i < 5; ++i) {
    for (double t : ts) {
      auto seq = cocycle::growth_exponent(c, samples[i], t, s.n_max);
      double last_fwd = 0, last_bwd = 0;
      for (const auto& [n, rate] : seq) {
        csv << i << "," << format_double(t) << "," << n << "," << format_double(rate)
            << "\n";
        if (n == s.n_max) last_fwd = rate;
        if (n == -s.n_max) last_bwd = rate;
      }
      finals.push_back({{"x_id", i}, {"t", t}, {"forward", last_fwd}, {"backward", last_bwd}});
    }
  }
  write_text_file(out_path(opt, "growth.csv"), csv.str());
  j["final_rates"] = finals;
  write_report(out_path(opt, "growth.json"), j, clock.seconds());
  return 0;
}

int run_boundedness(const Scenario& scenario, const RunOptions& opt) {
  Stopwatch clock;
  Scenario s = with_seed(scenario, opt);
  Cocycle c = make_cocycle(s);
  auto periodic = cocycle::periodic_data(c, s.periodic_k_max,
                                         s.tol("gate_growth_threshold", 1.2));
  std::vector<SftPoint> scan_points = scenario_samples(s, s.scan_samples, false);
  for (const auto& [p, d] : sft::periodic_points(c.space, 2)) scan_points.push_back(p);

  std::ostringstream csv;
  csv << "x_id,n,norm_r,norm_1,log_deriv_rate\n";
  auto scan = cocycle::value_bound_scan(c, scan_points, s.n_max, s.r, 10,
                                        1.0 + s.tol("flat_ratio_slack", 0.05));
  for (const auto& row : scan.rows)
    csv << row.x_id << "," << row.n << "," << format_double(row.norm_r) << ","
        << format_double(row.norm_1) << "," << format_double(row.log_deriv_rate)
        << "\n";
  write_text_file(out_path(opt, "boundedness.csv"), csv.str());

  Json j = report_head(s, opt, "run boundedness");
  j["periodic"] = {{"sup_q", periodic.sup_q},
                   {"sup_1", periodic.sup_1},
                   {"growth_ratio", periodic.growth_ratio},
                   {"bounded", periodic.bounded},
                   {"count", periodic.data.size()}};
  j["scan"] = {{"r", s.r},
               {"sup", scan.sup_norm},
               {"early_sup", scan.early_sup},
               {"growth_ratio", scan.growth_ratio},
               {"growing", scan.growing},
               {"argmax_n", scan.argmax_n}};
  const bool expect_flat = s.tol("expect_flat", 0) > 0;
  bool pass = true;
  if (expect_flat && scan.growing) pass = false;
  if (opt.strict && !periodic.bounded && expect_flat) pass = false;
  j["pass"] = pass;
  write_report(out_path(opt, "boundedness.json"), j, clock.seconds());
  return pass ? 0 : 1;
}

int run_invariant_metric(const Scenario& scenario, const RunOptions& opt) {
  Stopwatch clock;
  Scenario s = with_seed(scenario, opt);
  Cocycle c = make_cocycle(s);
  invmetric::FieldParams fp{s.n_grid, s.k_horizon, 80.0};
  auto samples = scenario_samples(s, s.samples, true);
  Json j = report_head(s, opt, "run invariant-metric");
  bool pass = true;
  try {
    auto field = invmetric::build_field(c, samples, fp);
    Json field_json;
    field_json["fiber_grid"] = fp.fiber_grid;
    field_json["horizon"] = fp.horizon;
    field_json["provenance"] = {{"seed", s.seed},
                                {"family", s.family},
                                {"scenario_hash", std::to_string(fnv1a(s.raw.dump()))}};
    field_json["base_point_ids"] = field.keys;
    Json matrix = Json::array();
    for (Eigen::Index row = 0; row < field.log_rho.rows(); ++row) {
      Json r = Json::array();
      for (int col = 0; col < fp.fiber_grid; ++col) r.push_back(field.log_rho(row, col));
      matrix.push_back(std::move(r));
    }
    field_json["log_density"] = std::move(matrix);
    write_text_file(out_path(opt, "metric_field.json"), field_json.dump() + "\n");

    double worst_invariance = 0;
    const std::size_t probe = std::min<std::size_t>(field.base_points.size(), 10);
    for (std::size_t i = 0; i < probe; ++i)
      for (double t : {0.13, 0.61})
        worst_invariance = std::max(
            worst_invariance,
            invmetric::invariance_defect(c, field.base_points[i], t, s.k_horizon));
    auto fiber = invmetric::fiber_holder_check(field, s.eps0);
    j["invariance_defect"] = worst_invariance;
    j["fiber_fit"] = {{"slope", fiber.fit.slope}, {"exact", fiber.exact}};
    if (worst_invariance > s.tol("invariance_defect", 1e-3)) pass = false;
  } catch (const invmetric::FieldError& e) {
    j["field_error"] = e.what();
    pass = false;
  }
  j["pass"] = pass;
  write_report(out_path(opt, "invariant_metric.json"), j, clock.seconds());
  return pass ? 0 : 1;
}

int verify_thm12(const Scenario& scenario, const RunOptions& opt) {
  Stopwatch clock;
  Scenario s = with_seed(scenario, opt);
  Cocycle c = make_cocycle(s);
  Json j = report_head(s, opt, "verify thm12");
  const bool expect_unbounded = s.tol("expect_unbounded", 0) > 0;
  auto periodic = cocycle::periodic_data(c, s.periodic_k_max,
                                         s.tol("gate_growth_threshold", 1.2));
  j["periodic"] = {{"sup_q", periodic.sup_q},
                   {"growth_ratio", periodic.growth_ratio},
                   {"bounded", periodic.bounded}};
  std::vector<SftPoint> scan_points = scenario_samples(s, s.scan_samples, false);
  for (const auto& [p, d] : sft::periodic_points(c.space, 2)) scan_points.push_back(p);

  std::vector<std::string> failures;
  Json scans = Json::array();
  const double slack = 1.0 + s.tol("flat_ratio_slack", 0.05);
  for (double r : {1.0, s.r, 2.25}) {
    auto scan = cocycle::value_bound_scan(c, scan_points, s.n_max, r, 10, slack);
    scans.push_back({{"r", r},
                     {"sup", scan.sup_norm},
                     {"early_sup", scan.early_sup},
                     {"growth_ratio", scan.growth_ratio},
                     {"growing", scan.growing}});
    if (!expect_unbounded && scan.growing)
      failures.push_back("scan at r=" + format_double(r) + " not flat");
  }
  j["scans"] = scans;

  if (expect_unbounded) {
    if (periodic.bounded) failures.push_back("periodic data unexpectedly bounded");
    auto scan = cocycle::value_bound_scan(c, scan_points, 20, 1.0, 5, 1.05);
    const double factor = scan.early_sup > 0 ? scan.sup_norm / scan.early_sup : 0;
    j["growth_factor_n20_vs_n5"] = factor;
    if (factor < s.tol("growth_factor", 10.0))
      failures.push_back("growth factor below threshold");
    const double expected = s.tol("expected_growth_exponent", 2.0 * std::log(1.2));
    auto seq = cocycle::growth_exponent(c, scan_points.back(), 0.5, s.n_max);
    double final_rate = 0;
    for (const auto& [n, rate] : seq)
      if (n == s.n_max) final_rate = rate;
    j["growth_exponent_final"] = final_rate;
    j["growth_exponent_expected"] = expected;
    if (std::abs(final_rate - expected) > s.tol("growth_exponent_tol", 0.01))
      failures.push_back("growth exponent did not converge to expected value");
  } else if (!periodic.bounded) {
    failures.push_back("periodic data gate failed");
  }

  j["failures"] = failures;
  const bool pass = failures.empty();
  j["verdict"] = pass ? "PASS" : (expect_unbounded || periodic.bounded
                                      ? "FAIL"
                                      : "NOT-APPLICABLE");
  j["pass"] = pass;
  write_report(out_path(opt, "thm12.json"), j, clock.seconds());
  return pass ? 0 : 1;
}

int verify_thm13(const Scenario& scenario, const RunOptions& opt) {
  Stopwatch clock;
  Scenario s = with_seed(scenario, opt);
  Cocycle c = make_cocycle(s);
  invmetric::FieldParams fp{s.n_grid, s.k_horizon, 80.0};
  invmetric::Thm13Tolerances tol;
  tol.isometry_defect = s.tol("isometry_defect", 1e-3);
  tol.exponent_slack = s.tol("exponent_slack", 0.1);
  tol.bracket_factor = s.tol("bracket_factor", 3.0);
  tol.gate_k_max = s.periodic_k_max;
  tol.gate_growth_threshold = s.tol("gate_growth_threshold", 1.2);
  auto samples = scenario_samples(s, s.samples, true);
  auto rep = invmetric::theorem13_verdict(c, fp, samples, s.alpha, s.beta, tol);

  Json j = report_head(s, opt, "verify thm13");
  j["verdict"] = rep.verdict;
  j["gate"] = {{"bounded", rep.gate_bounded}, {"growth_ratio", rep.gate_growth_ratio}};
  j["isometry_defect"] = rep.isometry_defect;
  j["isometry_tolerance"] = tol.isometry_defect;
  j["fiber_fit"] = {{"slope", rep.fiber.fit.slope}, {"exact", rep.fiber.exact}};
  j["base_stable_fit"] = {{"slope", rep.base_stable.fit.slope},
                          {"constant", rep.base_stable.uniform_constant},
                          {"exact", rep.base_stable.exact}};
  j["base_unstable_fit"] = {{"slope", rep.base_unstable.fit.slope},
                            {"constant", rep.base_unstable.uniform_constant},
                            {"exact", rep.base_unstable.exact}};
  j["bracket_constant"] = rep.bracket_constant;
  j["leaf_constant"] = rep.leaf_constant;
  j["joint_fit"] = {{"slope", rep.joint_fit.slope}, {"exact", rep.joint_exact}};
  j["alpha"] = rep.alpha;
  j["beta_rho"] = rep.beta_rho;
  j["failures"] = rep.failures;
  write_report(out_path(opt, "thm13.json"), j, clock.seconds());
  return rep.verdict == "PASS" ? 0 : 1;
}

int spd_meb_util(const std::string& input_path, const std::string& out_path_file) {
  Json j;
  {
    std::ifstream in(input_path);
    if (!in) throw ConfigError("cannot open " + input_path);
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("meb input parse error: ") + e.what());
    }
  }
  const int dim = j.at("dim").get<int>();
  std::vector<spd::SpdPoint> points;
  for (const auto& row : j.at("points")) {
    if (static_cast<int>(row.size()) != dim * dim)
      throw ConfigError("each point must have dim*dim row-major entries");
    Eigen::MatrixXd m(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) m(a, b) = parse_real(row[a * dim + b]);
    points.emplace_back(std::move(m));
  }
  const double tol = j.contains("tol") ? parse_real(j.at("tol")) : 1e-8;
  auto ball = spd::min_enclosing_ball(points, tol);
  Json out;
  out["dim"] = dim;
  out["radius"] = ball.radius;
  Json center = Json::array();
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) center.push_back(ball.center.matrix()(a, b));
  out["center"] = center;
  const std::string text = out.dump(2) + "\n";
  if (out_path_file.empty()) {
    std::printf("%s", text.c_str());
  } else {
    write_text_file(out_path_file, text);
  }
  return 0;
}

}  // namespace cocyclelab::lab
