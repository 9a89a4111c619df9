// Runs the command-line tool and inspects exit codes and files.
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path data_dir = CHOLLAG_TEST_DATA;
const fs::path out_dir = fs::path(CHOLLAG_TEST_OUT) / "cli_out";

struct Run {
  int code;
  std::string err;
};

// Runs the tool with the given arguments; stdout is discarded, stderr kept.
Run cli(const std::string& args) {
  fs::create_directories(out_dir);
  const fs::path err = out_dir / "stderr.txt";
  const std::string cmd = std::string("\"") + CHOLLAG_CLI + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream f(err);
  std::stringstream s;
  s << f.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

std::string in(const char* name) { return "\"" + (data_dir / name).string() + "\""; }
std::string out(const char* name) { return "\"" + (out_dir / name).string() + "\""; }

Json load(const fs::path& p) {
  std::ifstream f(p);
  return Json::parse(f);
}

}  // namespace

TEST_CASE("peakon simulation writes tagged snapshots and a manifest") {
  REQUIRE(cli("simulate --config " + in("peakon.json") + " --out-dir " + out("")).code == 0);
  const Json man = load(out_dir / "peakon_manifest.json");
  CHECK(man["relative_energy_drift"].get<double>() <= 1e-6);
  const std::string hash = man["config_hash"];
  for (int k = 0; k <= 4; ++k) {
    const fs::path snap = out_dir / ("peakon_t" + std::to_string(k) + ".json");
    REQUIRE(fs::exists(snap));
    CHECK(load(snap)["config_hash"] == hash);
  }
}

TEST_CASE("zero data stays zero") {
  REQUIRE(cli("simulate --config " + in("zero.json") + " --out-dir " + out("")).code == 0);
  int seen = 0;
  for (int k = 0; fs::exists(out_dir / ("zero_t" + std::to_string(k) + ".json")); ++k, ++seen) {
    const Json snap = load(out_dir / ("zero_t" + std::to_string(k) + ".json"));
    for (double v : snap["eulerian"]["u"]) CHECK(v == 0.0);
  }
  CHECK(seen >= 2);
}

TEST_CASE("command-line overrides change the run") {
  REQUIRE(cli("simulate --config " + in("peakon.json") + " --out-dir " + out("ovr") + " --grid-n 512 --t-end 0.25").code == 0);
  const Json man = load(out_dir / "ovr" / "peakon_manifest.json");
  CHECK(man["grid"]["n"] == 512);
  CHECK(man["times"].back().get<double>() == doctest::Approx(0.25));
}

TEST_CASE("several scenarios in parallel") {
  setenv("CHOL_LAG_THREADS", "2", 1);
  const Run r = cli("simulate --config " + in("peakon.json") + " --config " + in("zero.json") + " --out-dir " + out("par"));
  unsetenv("CHOL_LAG_THREADS");
  CHECK(r.code == 0);
  CHECK(fs::exists(out_dir / "par" / "peakon_manifest.json"));
  CHECK(fs::exists(out_dir / "par" / "zero_manifest.json"));
}

TEST_CASE("malformed JSON reports its position and exits 2") {
  const Run r = cli("simulate --config " + in("malformed.json") + " --out-dir " + out(""));
  CHECK(r.code == 2);
  CHECK(r.err.find("malformed.json:3:") != std::string::npos);
}

TEST_CASE("missing files exit 4, bad flags exit 2") {
  CHECK(cli("simulate --config " + in("no_such_file.json") + " --out-dir " + out("")).code == 4);
  CHECK(cli("simulate --bogus").code == 2);
  CHECK(cli("").code == 2);
}

TEST_CASE("empty transform input exits 2") {
  CHECK(cli("transform --to-lagrangian " + in("empty.json") + " " + out("empty_out.json")).code == 2);
  CHECK(cli("transform " + in("atom_only.json") + " " + out("x.json")).code == 2);
}

TEST_CASE("atom-only input gives a flat stretch of y as long as the mass") {
  REQUIRE(cli("transform --to-lagrangian " + in("atom_only.json") + " " + out("atom_lag.json") + " --grid-n 91").code == 0);
  const Json s = load(out_dir / "atom_lag.json");
  const double lo = s["xi_min"], hi = s["xi_max"];
  const std::size_t n = s["n"];
  const double h = (hi - lo) / static_cast<double>(n - 1);
  double flat = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double y0 = lo + k * h + s["zeta"][k].get<double>();
    const double y1 = lo + (k + 1) * h + s["zeta"][k + 1].get<double>();
    if (std::abs(y1 - y0) < 1e-9) flat += h;
  }
  CHECK(flat == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(s.contains("config_hash"));
}

TEST_CASE("roundtrip of a peakon is accurate to the grid") {
  REQUIRE(cli("transform --to-lagrangian " + in("peakon_pair.json") + " " + out("peakon_lag.json")).code == 0);
  REQUIRE(cli("transform --to-eulerian " + out("peakon_lag.json") + " " + out("peakon_back.json")).code == 0);
  const std::string rep = (out_dir / "roundtrip_report.json").string();
  const std::string cmd = std::string("\"") + CHOLLAG_CLI + "\" transform --roundtrip " + in("peakon_pair.json") + " " +
                          out("roundtrip.json") + " --grid-n 2048 > \"" + rep + "\"";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const Json r = load(rep);
  CHECK(r["linf_u"].get<double>() <= r["label_spacing"].get<double>());
  CHECK(r["energy_out"].get<double>() == doctest::Approx(r["energy_in"].get<double>()).epsilon(1e-12));
}

TEST_CASE("metric of a file with itself is [0, 0]") {
  REQUIRE(cli("metric " + in("peakon_pair.json") + " " + in("peakon_pair.json") + " --grid-n 512 -o " + out("same.json")).code == 0);
  const Json b = load(out_dir / "same.json");
  CHECK(b["lower"] == 0.0);
  CHECK(b["upper"] == 0.0);
  CHECK(b.contains("witness_knots"));
}

TEST_CASE("restricted metric refuses energies above M") {
  CHECK(cli("metric " + in("peakon_pair.json") + " " + in("atom_only.json") + " --restricted 1.0").code == 2);
  CHECK(cli("metric " + in("peakon_pair.json") + " " + in("atom_only.json") + " --restricted 3.0 --grid-n 256").code == 0);
}

TEST_CASE("validate exit codes") {
  CHECK(cli("validate no_such_suite").code == 2);
  CHECK(cli("validate hyperelastic").code == 0);
}
