#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "chollag/coords.hpp"
#include "chollag/metric.hpp"

namespace chollag {

using Json = nlohmann::json;

/// {x, u, density, atoms: [{x, mass}]}
Json to_json(const EulerianPair& p);
/// Accepts the bare pair or an object carrying it under "eulerian".
EulerianPair pair_from_json(const Json& j);

/// {xi_min, xi_max, n, zeta, u, h}
Json to_json(const LagrangianState& x);
/// Accepts the bare state or an object carrying it under "lagrangian".
LagrangianState state_from_json(const Json& j);

/// {lower, upper, iterations, witness_knots: {f1, f2}}
Json to_json(const MetricBracket& b);

/// Parses a JSON file; syntax errors carry line and column. Throws
/// Error(io) when the file cannot be read and Error(config) on bad syntax.
Json read_json_file(const std::filesystem::path& path);
Json parse_json_text(const std::string& text, const std::string& origin);
/// Deterministic dump (sorted keys, round-trip exact numbers, trailing newline).
std::string dump_json(const Json& j);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const Json& j);

/// CSV snapshot: columns x, u, density at %.17g, followed by an
/// "atom_x,atom_mass" block when the measure has atoms.
void write_csv(const std::filesystem::path& path, const EulerianPair& p);

}  // namespace chollag
