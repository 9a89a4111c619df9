#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chollag/io.hpp"
#include "chollag/oracles.hpp"

namespace chollag {

/// Command-line overrides applied on top of a scenario file.
struct ScenarioOverrides {
  std::optional<std::size_t> grid_n;
  std::optional<double> dt;
  std::optional<double> t_end;
};

/// Parsed scenario. `raw` is the configuration after overrides; its hash
/// is embedded in every output file.
struct ScenarioConfig {
  Json raw;
  std::string name;

  enum class Initial { peakons, pair, lagrangian } initial = Initial::peakons;
  PeakonConfig peakons;
  double x_min = -20.0;
  double x_max = 20.0;
  EulerianPair pair;
  LagrangianState state;

  std::size_t grid_n = 2048;
  std::optional<double> xi_min;
  std::optional<double> xi_max;
  bool align_crests = true;

  SolverConfig solver;
  Dynamics dynamics;
  std::string equation = "ch";

  std::string prefix;
  bool write_eulerian = true;
  bool write_lagrangian = false;
  bool write_csv = false;
};

/// Validates and parses a scenario (Error(config) on any problem). Relative
/// file references are resolved against `base_dir`.
ScenarioConfig parse_scenario(Json j, const ScenarioOverrides& ov = {}, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& ov = {});

/// Initial Lagrangian state on the scenario's label grid.
LagrangianState initial_state(const ScenarioConfig& cfg);

struct SimulationSummary {
  std::string config_hash;
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
  double relative_energy_drift = 0.0;
  double max_residual = 0.0;
  int rejected_steps = 0;
};

/// Runs the scenario and writes <prefix>_t{k}.json snapshots plus
/// <prefix>_manifest.json into `out_dir`.
SimulationSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace chollag
