#include "chollag/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chollag/error.hpp"

namespace chollag {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::config, "scenario: " + msg); }

const Json& object_at(const Json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing section \"") + key + "\"");
  if (!j.at(key).is_object()) bad(std::string("section \"") + key + "\" must be an object");
  return j.at(key);
}

double num(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(std::string("\"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

bool flag(const Json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) bad(std::string("\"") + key + "\" must be true or false");
  return j.at(key).get<bool>();
}

std::vector<double> nums(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) bad(std::string("\"") + key + "\" must be an array of numbers");
  std::vector<double> v;
  for (const Json& e : j.at(key)) {
    if (!e.is_number()) bad(std::string("\"") + key + "\" must be an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

Json inline_or_file(const Json& init, const std::filesystem::path& base) {
  if (init.contains("file")) {
    if (!init.at("file").is_string()) bad("\"file\" must be a string");
    std::filesystem::path p = init.at("file").get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    return read_json_file(p);
  }
  return init;
}

}  // namespace

ScenarioConfig parse_scenario(Json j, const ScenarioOverrides& ov, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("top level must be a JSON object");
  if (ov.grid_n) j["grid"]["n"] = *ov.grid_n;
  if (ov.dt) j["solver"]["dt"] = *ov.dt;
  if (ov.t_end) j["solver"]["t_end"] = *ov.t_end;

  ScenarioConfig c;
  c.raw = j;
  c.name = j.value("name", std::string("scenario"));
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) bad("\"name\" must be a plain file stem");

  const Json& init = object_at(j, "initial");
  const std::string type = init.value("type", std::string());
  if (type == "peakons") {
    c.initial = ScenarioConfig::Initial::peakons;
    c.peakons.p = nums(init, "p");
    c.peakons.q = nums(init, "q");
    c.x_min = num(init, "x_min", -20.0);
    c.x_max = num(init, "x_max", 20.0);
    try {
      c.peakons.validate();
    } catch (const Error& e) {
      bad(e.what());
    }
    if (!(c.x_min < c.x_max)) bad("x_min must be below x_max");
    for (double q : c.peakons.q) {
      if (q <= c.x_min || q >= c.x_max) bad("peakon positions must lie inside [x_min, x_max]");
    }
  } else if (type == "pair") {
    c.initial = ScenarioConfig::Initial::pair;
    c.pair = pair_from_json(inline_or_file(init, base_dir));
  } else if (type == "lagrangian") {
    c.initial = ScenarioConfig::Initial::lagrangian;
    c.state = state_from_json(inline_or_file(init, base_dir));
  } else {
    bad("initial.type must be one of peakons, pair, lagrangian");
  }

  if (j.contains("grid")) {
    const Json& g = object_at(j, "grid");
    if (g.contains("n")) {
      if (!g.at("n").is_number_integer() || g.at("n").get<long long>() < 3) bad("grid.n must be an integer >= 3");
      c.grid_n = g.at("n").get<std::size_t>();
    }
    if (g.contains("xi_min")) c.xi_min = num(g, "xi_min", 0.0);
    if (g.contains("xi_max")) c.xi_max = num(g, "xi_max", 0.0);
    c.align_crests = flag(g, "align_crests", true);
  }
  if (c.initial == ScenarioConfig::Initial::lagrangian && j.contains("grid") && j.at("grid").contains("n") &&
      c.grid_n != c.state.size()) {
    bad("grid.n differs from the node count of the Lagrangian input");
  }
  if (c.initial == ScenarioConfig::Initial::pair && (c.xi_min || c.xi_max)) {
    const double need_lo = c.pair.x.front(), need_hi = c.pair.x.back() + energy(c.pair);
    if (c.xi_min.value_or(need_lo) > need_lo || c.xi_max.value_or(need_hi) < need_hi) {
      bad("grid window does not cover the data: labels must span [x_0, x_last + energy]");
    }
  }

  const Json& s = object_at(j, "solver");
  c.solver.dt = num(s, "dt", 1e-3);
  c.solver.t_end = num(s, "t_end", 0.0);
  if (s.contains("monitor_every")) {
    if (!s.at("monitor_every").is_number_integer() || s.at("monitor_every").get<long long>() < 1) {
      bad("solver.monitor_every must be a positive integer");
    }
    c.solver.monitor_every = s.at("monitor_every").get<int>();
  }
  if (!(c.solver.dt > 0.0) || !std::isfinite(c.solver.dt)) bad("solver.dt must be positive");
  if (!(c.solver.t_end >= 0.0) || !std::isfinite(c.solver.t_end)) bad("solver.t_end must be nonnegative");

  if (j.contains("equation")) {
    const Json& e = object_at(j, "equation");
    c.equation = e.value("type", std::string("ch"));
    if (c.equation == "ch") {
      const double kappa = num(e, "kappa", 0.0);
      if (kappa != 0.0) {
        HyperelasticCoeffs h = HyperelasticCoeffs::camassa_holm(kappa);
        h.big_g = [kappa](double v) { return kappa * v * v + v * v * v; };
        c.dynamics.rod = h;
      }
    } else if (c.equation == "rod") {
      if (!e.contains("gamma")) bad("equation rod needs \"gamma\"");
      const double gamma = num(e, "gamma", 1.0);
      if (gamma == 0.0) bad("rod gamma must be nonzero (f'' = gamma)");
      HyperelasticCoeffs h = HyperelasticCoeffs::rod(gamma);
      // G(v) = int_0^v (3 - gamma) z^2 + gamma z^2 = v^3
      h.big_g = [](double v) { return v * v * v; };
      c.dynamics.rod = h;
    } else {
      bad("equation.type must be ch or rod");
    }
  }

  c.prefix = c.name;
  if (j.contains("outputs")) {
    const Json& o = object_at(j, "outputs");
    c.prefix = o.value("prefix", c.name);
    if (c.prefix.empty() || c.prefix.find_first_of("/\\") != std::string::npos) bad("outputs.prefix must be a plain file stem");
    c.write_eulerian = flag(o, "eulerian", true);
    c.write_lagrangian = flag(o, "lagrangian", false);
    c.write_csv = flag(o, "csv", false);
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& ov) {
  return parse_scenario(read_json_file(path), ov, path.parent_path());
}

LagrangianState initial_state(const ScenarioConfig& c) {
  switch (c.initial) {
    case ScenarioConfig::Initial::peakons: {
      const double label_hi = c.x_max + c.peakons.cumulative_energy(c.x_max);
      if (c.xi_min || c.xi_max) {
        return peakon_state(c.peakons, c.x_min, c.x_max, Grid(c.xi_min.value_or(c.x_min), c.xi_max.value_or(label_hi), c.grid_n));
      }
      if (c.align_crests) return peakon_state(c.peakons, c.x_min, c.x_max, c.grid_n);
      return peakon_state(c.peakons, c.x_min, c.x_max, Grid(c.x_min, label_hi, c.grid_n));
    }
    case ScenarioConfig::Initial::pair: {
      const Grid d = default_lagrangian_grid(c.pair, c.grid_n);
      return to_lagrangian(c.pair, Grid(c.xi_min.value_or(d.xi_min()), c.xi_max.value_or(d.xi_max()), c.grid_n));
    }
    case ScenarioConfig::Initial::lagrangian:
      return c.state;
  }
  return c.state;
}

SimulationSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory " + out_dir.string());

  SimulationSummary sum;
  sum.config_hash = config_hash(cfg.raw);
  const LagrangianState x0 = initial_state(cfg);
  const Trajectory tr = evolve(x0, cfg.solver, cfg.dynamics);
  sum.relative_energy_drift = tr.relative_energy_drift();
  sum.max_residual = *std::max_element(tr.max_residual.begin(), tr.max_residual.end());
  sum.rejected_steps = tr.rejected_steps;

  Json snaps = Json::array();
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    const Snapshot& s = tr.snapshots[k];
    Json out = {{"config_hash", sum.config_hash}, {"t", s.t}, {"k", k}};
    EulerianPair e;
    if (cfg.write_eulerian || cfg.write_csv) e = to_eulerian(s.state);
    if (cfg.write_eulerian) out["eulerian"] = to_json(e);
    if (cfg.write_lagrangian) out["lagrangian"] = to_json(s.state);
    const std::string stem = cfg.prefix + "_t" + std::to_string(k);
    const auto path = out_dir / (stem + ".json");
    write_json_file(path, out);
    sum.files.push_back(path);
    Json entry = {{"k", k}, {"t", s.t}, {"file", path.filename().string()}};
    if (cfg.write_csv) {
      const auto csv = out_dir / (stem + ".csv");
      write_csv(csv, e);
      sum.files.push_back(csv);
      entry["csv"] = csv.filename().string();
    }
    snaps.push_back(entry);
  }

  Json manifest = {{"config_hash", sum.config_hash},
                   {"config", cfg.raw},
                   {"grid", {{"xi_min", x0.grid.xi_min()}, {"xi_max", x0.grid.xi_max()}, {"n", x0.size()}}},
                   {"snapshots", snaps},
                   {"times", tr.times},
                   {"energy", tr.energy},
                   {"max_residual", tr.max_residual},
                   {"relative_energy_drift", sum.relative_energy_drift},
                   {"max_constraint_residual", sum.max_residual},
                   {"rejected_steps", sum.rejected_steps}};
  sum.manifest = out_dir / (cfg.prefix + "_manifest.json");
  write_json_file(sum.manifest, manifest);
  return sum;
}

}  // namespace chollag
