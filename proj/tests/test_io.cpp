#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "chollag/error.hpp"
#include "chollag/io.hpp"
#include "chollag/oracles.hpp"
#include "chollag/scenario.hpp"

using namespace chollag;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("chollag_unit_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Json peakon_scenario() {
  return Json::parse(R"({
    "name": "unit",
    "initial": {"type": "peakons", "p": [0.5], "q": [0.0], "x_min": -10, "x_max": 10},
    "grid": {"n": 256},
    "solver": {"dt": 0.01, "t_end": 0.2, "monitor_every": 5},
    "outputs": {"lagrangian": true, "csv": true}
  })");
}

}  // namespace

TEST_CASE("pairs and states survive a JSON round trip bit for bit") {
  std::mt19937_64 rng(1);
  const EulerianPair p = random_smooth_pair(rng);
  const EulerianPair q = pair_from_json(Json::parse(dump_json(to_json(p))));
  CHECK(q.x == p.x);
  CHECK(q.u == p.u);
  CHECK(q.mu.density == p.mu.density);
  REQUIRE(q.mu.atoms.size() == p.mu.atoms.size());
  for (std::size_t k = 0; k < p.mu.atoms.size(); ++k) CHECK(q.mu.atoms[k].mass == p.mu.atoms[k].mass);

  const LagrangianState x = to_lagrangian(p, 300);
  const LagrangianState y = state_from_json(Json::parse(dump_json(to_json(x))));
  CHECK(y.grid == x.grid);
  CHECK(y.zeta == x.zeta);
  CHECK(y.u == x.u);
  CHECK(y.h == x.h);

  // nested forms written by the simulator
  CHECK(pair_from_json(Json{{"eulerian", to_json(p)}}).x == p.x);
  CHECK(state_from_json(Json{{"lagrangian", to_json(x)}}).h == x.h);
}

TEST_CASE("syntax errors name line and column") {
  try {
    parse_json_text("{\n  \"a\": [1, 2\n}", "cfg.json");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    CHECK(std::string(e.what()).find("cfg.json:3:") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_json_text("", "empty"), Error);
  try {
    read_json_file("/nonexistent/dir/file.json");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("malformed pair documents are configuration errors") {
  for (const char* text : {R"({"x": [0, 1], "u": [0]})", R"({"x": [], "u": [], "density": []})",
                           R"({"x": [0, 1], "u": [0, 0], "density": [0, 0], "atoms": [{"x": 0.5}]})", "[1, 2]"}) {
    try {
      pair_from_json(Json::parse(text));
      FAIL("accepted " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config);
    }
  }
}

TEST_CASE("config hash depends on content only") {
  const Json a = Json::parse(R"({"b": 1, "a": [1.5, 2]})");
  const Json b = Json::parse(R"({"a": [1.5, 2], "b": 1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) != config_hash(Json::parse(R"({"a": [1.5, 2], "b": 2})")));
}

TEST_CASE("scenario parsing validates its input") {
  CHECK_NOTHROW(parse_scenario(peakon_scenario()));
  auto broken = [](auto edit) {
    Json j = peakon_scenario();
    edit(j);
    try {
      parse_scenario(j);
    } catch (const Error& e) {
      return e.code() == ErrorCode::config;
    }
    return false;
  };
  CHECK(broken([](Json& j) { j.erase("solver"); }));
  CHECK(broken([](Json& j) { j["solver"]["dt"] = -1.0; }));
  CHECK(broken([](Json& j) { j["grid"]["n"] = 2; }));
  CHECK(broken([](Json& j) { j["initial"]["type"] = "mystery"; }));
  CHECK(broken([](Json& j) { j["initial"]["q"] = Json::array({50.0}); }));
  CHECK(broken([](Json& j) { j["equation"] = {{"type", "rod"}}; }));
  CHECK(broken([](Json& j) { j["name"] = "../escape"; }));
  CHECK(broken([](Json& j) {
    j["initial"] = {{"type", "pair"}, {"x", {0, 1}}, {"u", {0, 0}}, {"density", {1, 0}}, {"atoms", Json::array()}};
    j["grid"]["xi_max"] = 1.5;  // labels need [0, 2]
  }));
}

TEST_CASE("overrides land in the hashed configuration") {
  ScenarioOverrides ov;
  ov.grid_n = 128;
  ov.t_end = 0.1;
  const ScenarioConfig c = parse_scenario(peakon_scenario(), ov);
  CHECK(c.grid_n == 128);
  CHECK(c.solver.t_end == 0.1);
  CHECK(c.raw["grid"]["n"] == 128);
  CHECK(config_hash(c.raw) != config_hash(parse_scenario(peakon_scenario()).raw));
}

TEST_CASE("simulation output is deterministic and tagged") {
  const ScenarioConfig c = parse_scenario(peakon_scenario());
  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  const SimulationSummary s1 = run_scenario(c, d1);
  const SimulationSummary s2 = run_scenario(c, d2);
  REQUIRE(s1.files.size() == s2.files.size());
  CHECK(s1.files.size() == 2 * 5);  // t0..t4, json + csv
  for (std::size_t k = 0; k < s1.files.size(); ++k) CHECK(slurp(s1.files[k]) == slurp(s2.files[k]));
  CHECK(slurp(s1.manifest) == slurp(s2.manifest));

  const Json snap = read_json_file(d1 / "unit_t0.json");
  CHECK(snap["config_hash"] == s1.config_hash);
  CHECK(snap.contains("eulerian"));
  CHECK(snap.contains("lagrangian"));
  const Json man = read_json_file(s1.manifest);
  CHECK(man["config_hash"] == s1.config_hash);
  CHECK(man["relative_energy_drift"].get<double>() <= 1e-6);
  CHECK(man["times"].size() == man["energy"].size());
  CHECK(slurp(d1 / "unit_t0.csv").rfind("x,u,density\n", 0) == 0);
}

TEST_CASE("rod equation runs from a scenario") {
  Json j = peakon_scenario();
  j["equation"] = {{"type", "rod"}, {"gamma", 1.0}};
  j["outputs"] = {{"prefix", "rod"}};
  const SimulationSummary s = run_scenario(parse_scenario(j), scratch("rod"));
  CHECK(s.relative_energy_drift < 1e-6);
}
