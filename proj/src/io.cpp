#include "chollag/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "chollag/error.hpp"

namespace chollag {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::config, msg); }

std::vector<double> number_array(const Json& j, const char* key) {
  if (!j.contains(key)) config_error(std::string("missing field \"") + key + "\"");
  const Json& a = j.at(key);
  if (!a.is_array()) config_error(std::string("field \"") + key + "\" must be an array");
  std::vector<double> v;
  v.reserve(a.size());
  for (const Json& e : a) {
    if (!e.is_number()) config_error(std::string("field \"") + key + "\" must hold numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) config_error(std::string("missing numeric field \"") + key + "\"");
  return j.at(key).get<double>();
}

}  // namespace

Json to_json(const EulerianPair& p) {
  Json atoms = Json::array();
  for (const Atom& a : p.mu.atoms) atoms.push_back({{"x", a.x}, {"mass", a.mass}});
  return {{"x", p.x}, {"u", p.u}, {"density", p.mu.density}, {"atoms", atoms}};
}

EulerianPair pair_from_json(const Json& j) {
  if (!j.is_object()) config_error("Eulerian pair must be a JSON object");
  if (j.contains("eulerian")) return pair_from_json(j.at("eulerian"));
  EnergyMeasure mu;
  mu.density = number_array(j, "density");
  if (j.contains("atoms")) {
    if (!j.at("atoms").is_array()) config_error("field \"atoms\" must be an array");
    for (const Json& a : j.at("atoms")) mu.atoms.push_back({number(a, "x"), number(a, "mass")});
  }
  try {
    return EulerianPair(number_array(j, "x"), number_array(j, "u"), std::move(mu));
  } catch (const Error& e) {
    config_error(e.what());
  }
}

Json to_json(const LagrangianState& x) {
  return {{"xi_min", x.grid.xi_min()}, {"xi_max", x.grid.xi_max()}, {"n", x.size()},
          {"zeta", x.zeta},            {"u", x.u},                    {"h", x.h}};
}

LagrangianState state_from_json(const Json& j) {
  if (!j.is_object()) config_error("Lagrangian state must be a JSON object");
  if (j.contains("lagrangian")) return state_from_json(j.at("lagrangian"));
  auto zeta = number_array(j, "zeta");
  auto u = number_array(j, "u");
  auto h = number_array(j, "h");
  try {
    const Grid g(number(j, "xi_min"), number(j, "xi_max"), zeta.size());
    if (j.contains("n") && j.at("n").get<std::size_t>() != zeta.size()) config_error("field \"n\" disagrees with the arrays");
    return LagrangianState(g, std::move(zeta), std::move(u), std::move(h));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    config_error(e.what());
  }
}

Json to_json(const MetricBracket& b) {
  return {{"lower", b.lower},
          {"upper", b.upper},
          {"iterations", b.iterations},
          {"witness_knots", {{"f1", b.witness_f1.values()}, {"f2", b.witness_f2.values()}}}};
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": malformed JSON";
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) os << " (empty input)";
    config_error(os.str());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

std::string dump_json(const Json& j) { return j.dump(1, ' ') + "\n"; }

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << dump_json(j);
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::string config_hash(const Json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_csv(const std::filesystem::path& path, const EulerianPair& p) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error(ErrorCode::io, "cannot write " + path.string());
  std::fprintf(f, "x,u,density\n");
  for (std::size_t i = 0; i < p.size(); ++i) std::fprintf(f, "%.17g,%.17g,%.17g\n", p.x[i], p.u[i], p.mu.density[i]);
  if (!p.mu.atoms.empty()) {
    std::fprintf(f, "\natom_x,atom_mass\n");
    for (const Atom& a : p.mu.atoms) std::fprintf(f, "%.17g,%.17g\n", a.x, a.mass);
  }
  std::fclose(f);
}

}  // namespace chollag
