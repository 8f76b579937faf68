#include "cocyclelab/scenario.hpp"

#include <fstream>

#include "cocyclelab/report.hpp"

namespace cocyclelab::lab {

using cocycle::Generator;
using cocycle::SeriesParams;
using diffeo::CircleMap;

double parse_real(const Json& j) {
  if (j.is_string()) return std::stod(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw ConfigError("expected a decimal string or number, got " + j.dump());
}

namespace {

Eigen::MatrixXi parse_transition(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("transition must be a matrix");
  const int k = static_cast<int>(j.size());
  Eigen::MatrixXi m(k, k);
  for (int i = 0; i < k; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != k)
      throw ConfigError("transition must be square");
    for (int c = 0; c < k; ++c) m(i, c) = j[i][c].get<int>();
  }
  return m;
}

Eigen::Matrix2d parse_matrix2(const Json& j) {
  if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2)
    throw ConfigError("expected a 2x2 matrix");
  Eigen::Matrix2d m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(r, c) = parse_real(j[r][c]);
  return m;
}

SeriesParams parse_series(const Json& j) {
  SeriesParams s;
  s.offset = parse_real(j.at("offset"));
  s.amplitude = parse_real(j.at("amplitude"));
  s.weight = parse_real(j.at("weight"));
  const auto& sv = j.at("symbol_values");
  s.symbol_values.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t i = 0; i < sv.size(); ++i)
    s.symbol_values(static_cast<Eigen::Index>(i)) = parse_real(sv[i]);
  return s;
}

std::pair<int, int> parse_window(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("window must be [lo, hi]");
  return {j[0].get<int>(), j[1].get<int>()};
}

Generator parse_generator(const Json& g, double declared_beta) {
  const std::string family = g.at("family").get<std::string>();
  Generator out = [&] {
    if (family == "rotation_table") {
      auto [lo, hi] = parse_window(g.at("window"));
      std::map<std::string, double> angles;
      for (const auto& [w, a] : g.at("angles").items()) angles[w] = parse_real(a);
      return Generator::rotation_table(lo, hi, std::move(angles));
    }
    if (family == "conjugated_rotation_table") {
      auto [lo, hi] = parse_window(g.at("window"));
      std::map<std::string, double> angles;
      for (const auto& [w, a] : g.at("angles").items()) angles[w] = parse_real(a);
      std::map<std::string, CircleMap> conj;
      for (const auto& [w, c] : g.at("conjugacies").items())
        conj.emplace(w, parse_map_literal(c));
      return Generator::conjugated_rotation_table(lo, hi, std::move(conj),
                                                  std::move(angles));
    }
    if (family == "moebius_table") {
      auto [lo, hi] = parse_window(g.at("window"));
      std::map<std::string, Eigen::Matrix2d> mats;
      for (const auto& [w, m] : g.at("matrices").items()) mats[w] = parse_matrix2(m);
      return Generator::moebius_table(lo, hi, std::move(mats));
    }
    if (family == "rotation_series")
      return Generator::rotation_series(parse_series(g.at("angle_series")));
    if (family == "conjugated_rotation_series")
      return Generator::conjugated_rotation_series(parse_series(g.at("angle_series")),
                                                   parse_series(g.at("conjugacy_series")));
    if (family == "moebius_series")
      return Generator::moebius_series(parse_real(g.at("s")),
                                       parse_series(g.at("tilt_series")));
    throw ConfigError("unknown generator family: " + family);
  }();
  out.declared_beta = declared_beta;
  return out;
}

std::string series_json(const char* offset, const char* amplitude, const char* weight,
                        std::initializer_list<const char*> values) {
  std::string sv = "[";
  bool first = true;
  for (const char* v : values) {
    if (!first) sv += ",";
    sv += std::string("\"") + v + "\"";
    first = false;
  }
  sv += "]";
  return std::string("{\"offset\":\"") + offset + "\",\"amplitude\":\"" + amplitude +
         "\",\"weight\":\"" + weight + "\",\"symbol_values\":" + sv + "}";
}

}  // namespace

diffeo::CircleMap parse_map_literal(const Json& j) {
  if (j.contains("rotation")) return CircleMap::rotation(parse_real(j.at("rotation")));
  if (j.contains("boost")) return CircleMap::moebius_boost(parse_real(j.at("boost")));
  if (j.contains("moebius")) return CircleMap::moebius(parse_matrix2(j.at("moebius")));
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    const int n = g.at("n").get<int>();
    const double c0 = g.contains("const") ? parse_real(g.at("const")) : 0.0;
    Eigen::VectorXd cosc(0), sinc(0);
    if (g.contains("fourier")) {
      const auto& f = g.at("fourier");
      if (f.contains("cos")) {
        cosc.resize(static_cast<Eigen::Index>(f.at("cos").size()));
        for (std::size_t i = 0; i < f.at("cos").size(); ++i)
          cosc(static_cast<Eigen::Index>(i)) = parse_real(f.at("cos")[i]);
      }
      if (f.contains("sin")) {
        sinc.resize(static_cast<Eigen::Index>(f.at("sin").size()));
        for (std::size_t i = 0; i < f.at("sin").size(); ++i)
          sinc(static_cast<Eigen::Index>(i)) = parse_real(f.at("sin")[i]);
      }
    }
    return CircleMap::grid_from_fourier(n, c0, cosc, sinc);
  }
  throw ConfigError("unknown map literal: " + j.dump());
}

double Scenario::tol(const std::string& key, double fallback) const {
  auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.raw = j;
  s.name = j.value("name", std::string("scenario"));
  const auto& sft_block = j.at("sft");
  s.transition = parse_transition(sft_block.at("transition"));
  s.lambda = parse_real(sft_block.at("lambda"));
  const auto& reg = j.at("regularity");
  s.q = parse_real(reg.at("q"));
  s.r = parse_real(reg.at("r"));
  s.alpha = parse_real(reg.at("alpha"));
  s.beta = parse_real(reg.at("beta"));
  s.eps0 = reg.contains("eps0") ? parse_real(reg.at("eps0")) : 0.25;
  if (!(s.r < s.q)) throw ConfigError("regularity requires r < q");
  const double gamma = s.q - std::floor(s.q);
  if (!(s.alpha > 0 && s.alpha < gamma))
    throw ConfigError("regularity requires 0 < alpha < gamma");
  if (!(s.eps0 > 0 && s.eps0 <= 0.25)) throw ConfigError("eps0 must lie in (0, 1/4]");
  s.family = j.at("generator").at("family").get<std::string>();
  if (j.contains("run")) {
    const auto& run = j.at("run");
    s.n_max = run.value("n_max", s.n_max);
    s.k_horizon = run.value("k_horizon", s.k_horizon);
    s.n_grid = run.value("n_grid", s.n_grid);
    s.norm_grid = run.value("norm_grid", s.norm_grid);
    s.samples = run.value("samples", s.samples);
    s.scan_samples = run.value("scan_samples", s.scan_samples);
    s.periodic_k_max = run.value("periodic_k_max", s.periodic_k_max);
    s.seed = run.value("seed", s.seed);
    if (run.contains("tolerances"))
      for (const auto& [key, v] : run.at("tolerances").items()) {
        const double tv = parse_real(v);
        if (!(tv > 0)) throw ConfigError("tolerance '" + key + "' must be positive");
        s.tolerances[key] = tv;
      }
  }
  if (j.contains("outputs")) s.out_dir = j.at("outputs").value("dir", s.out_dir);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  Scenario s = scenario_from_json(j);
  if (s.name == "scenario") {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    s.name = dot == std::string::npos ? base : base.substr(0, dot);
  }
  return s;
}

cocycle::Cocycle make_cocycle(const Scenario& s) {
  cocycle::Cocycle c{sft::make_space(s.transition, s.lambda),
                     parse_generator(s.raw.at("generator"), s.beta), s.q, s.r,
                     diffeo::NormParams{s.eps0, s.norm_grid}};
  return c;
}

std::vector<sft::SftPoint> scenario_samples(const Scenario& s, int count,
                                            bool with_periodic) {
  auto space = sft::make_space(s.transition, s.lambda);
  auto mu = sft::parry_measure(space);
  const int window = std::max(64, s.k_horizon + 24);
  std::vector<sft::SftPoint> out = sft::sample(mu, s.seed, count, window);
  if (with_periodic) {
    for (const auto& [p, d] : sft::periodic_points(space, s.periodic_k_max))
      out.push_back(p);
  }
  return out;
}

Json builtin_scenario(const std::string& family, const std::string& base) {
  const bool golden = base == "golden";
  if (!golden && base != "full2") throw ConfigError("unknown base: " + base);
  std::string transition = golden ? "[[1,1],[1,0]]" : "[[1,1],[1,1]]";
  auto space = golden ? sft::golden_mean_shift(0.5) : sft::full_shift(2, 0.5);

  std::string generator;
  std::string tolerances = "{}";
  if (family == "f1") {
    generator = R"({"family":"rotation_table","window":[0,0],
      "angles":{"0":"0.3741","1":"0.3741"}})";
    tolerances = R"({"isometry_defect":"1e-10","invariance_defect":"1e-10"})";
  } else if (family == "f2") {
    // Locally constant rotation angles on the window [-1, 1].
    std::string angles;
    auto words = sft::admissible_words(*space, 3);
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) angles += ",";
      angles += "\"" + words[i] + "\":\"" + format_double(0.05 + 0.11 * double(i)) + "\"";
    }
    generator = "{\"family\":\"rotation_table\",\"window\":[-1,1],\"angles\":{" +
                angles + "}}";
  } else if (family == "f3lc") {
    // Locally constant conjugated rotations: Moebius boost conjugacies and
    // eighth-lattice angles on the window [-1, 1].
    std::string angles, conj;
    auto words = sft::admissible_words(*space, 3);
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) {
        angles += ",";
        conj += ",";
      }
      angles += "\"" + words[i] + "\":\"" + (i % 2 ? "0.375" : "0.125") + "\"";
      conj += "\"" + words[i] + "\":{\"boost\":\"" +
              format_double(-0.12 + 0.03 * double(i)) + "\"}";
    }
    generator =
        "{\"family\":\"conjugated_rotation_table\",\"window\":[-1,1],\"angles\":{" +
        angles + "},\"conjugacies\":{" + conj + "}}";
    tolerances = R"({"isometry_defect":"1e-6","invariance_defect":"1e-8"})";
  } else if (family == "f3s") {
    generator = "{\"family\":\"conjugated_rotation_series\",\"angle_series\":" +
                series_json("0.2137", "0.35", "0.5", {"0", "1"}) +
                ",\"conjugacy_series\":" +
                series_json("0", "0.04", "0.5", {"-1", "1"}) + "}";
    tolerances = R"({"isometry_defect":"1e-3"})";
  } else if (family == "f4") {
    generator = "{\"family\":\"rotation_series\",\"angle_series\":" +
                series_json("0.3", "0.5", "0.5", {"0", "1"}) + "}";
  } else if (family == "f5") {
    generator = "{\"family\":\"moebius_series\",\"s\":\"1.2\",\"tilt_series\":" +
                series_json("0", "0", "0.5", {"0", "0"}) + "}";
  } else if (family == "f5h") {
    generator = "{\"family\":\"moebius_series\",\"s\":\"1.2\",\"tilt_series\":" +
                series_json("0", "0.02", "0.5", {"-1", "1"}) + "}";
  } else {
    throw ConfigError("unknown builtin family: " + family);
  }

  std::string text = std::string("{") + "\"name\":\"" + family + "_" + base + "\"," +
                     "\"sft\":{\"transition\":" + transition + ",\"lambda\":\"0.5\"}," +
                     "\"generator\":" + generator + "," +
                     R"("regularity":{"q":"1.5","r":"1.25","alpha":"0.25","beta":"1.0","eps0":"0.25"},)" +
                     R"("run":{"n_max":60,"k_horizon":40,"n_grid":1024,"norm_grid":4096,)" +
                     R"("samples":100,"scan_samples":8,"periodic_k_max":6,"seed":20250809,)" +
                     "\"tolerances\":" + tolerances + "}," +
                     R"("outputs":{"dir":"out"})" + "}";
  return Json::parse(text);
}

}  // namespace cocyclelab::lab
