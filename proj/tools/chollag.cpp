// Command-line front end. Talks to the solver only through the C API.
//
//   chollag simulate --config a.json [--config b.json] [--out-dir d] [--grid-n N] [--dt s] [--t-end T]
//   chollag transform (--to-lagrangian | --to-eulerian | --roundtrip) in.json out.json [--grid-n N]
//   chollag metric a.json b.json [--restricted M] [--seed S] [--grid-n N] [-o out.json]
//   chollag validate <suite> [--seed S]
//
// Exit codes: 0 ok, 1 a validation criterion failed, 2 configuration or
// input error, 3 solver abort, 4 file error, 5 internal error.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "chollag/chollag.h"

namespace {

int exit_code(chollag_status s) {
  switch (s) {
    case CHOLLAG_OK:
      return 0;
    case CHOLLAG_INVALID:
    case CHOLLAG_CONFIG:
      return 2;
    case CHOLLAG_SOLVER:
      return 3;
    case CHOLLAG_IO:
      return 4;
    default:
      return 5;
  }
}

int report(chollag_status s, const std::string& context) {
  if (s != CHOLLAG_OK) std::fprintf(stderr, "chollag %s: %s\n", context.c_str(), chollag_last_error());
  return exit_code(s);
}

// Owns a string returned by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { chollag_string_free(p); }
  const char* c_str() const { return p ? p : ""; }
};

struct PairHandle {
  chollag_pair* p = nullptr;
  ~PairHandle() { chollag_pair_free(p); }
};

int threads_from_env() {
  const char* env = std::getenv("CHOL_LAG_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

struct SimulateArgs {
  std::vector<std::string> configs;
  std::string out_dir = ".";
  std::optional<std::size_t> grid_n;
  std::optional<double> dt;
  std::optional<double> t_end;
};

int cmd_simulate(const SimulateArgs& a) {
  std::vector<int> codes(a.configs.size(), 0);
  std::vector<std::string> summaries(a.configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < a.configs.size();) {
      LibString summary;
      const chollag_status s = chollag_simulate(a.configs[i].c_str(), a.out_dir.c_str(), a.grid_n.value_or(0),
                                                a.dt.value_or(0.0), a.t_end.value_or(-1.0), &summary.p);
      if (s != CHOLLAG_OK) {
        std::lock_guard<std::mutex> lock(err_mu);
        codes[i] = report(s, "simulate " + a.configs[i]);
      } else {
        summaries[i] = summary.c_str();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(threads_from_env(), a.configs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  int code = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    std::fputs(summaries[i].c_str(), stdout);
    if (codes[i] && !code) code = codes[i];
  }
  return code;
}

int cmd_transform(chollag_transform_mode mode, const std::string& in, const std::string& out, std::size_t grid_n) {
  LibString rep;
  const chollag_status s = chollag_transform(mode, in.c_str(), out.c_str(), grid_n, &rep.p);
  if (s != CHOLLAG_OK) return report(s, "transform");
  std::fputs(rep.c_str(), stdout);
  return 0;
}

int cmd_metric(const std::string& fa, const std::string& fb, double restricted, std::uint64_t seed, std::size_t grid_n,
               const std::string& output) {
  PairHandle a, b;
  if (chollag_status s = chollag_pair_load(fa.c_str(), &a.p); s != CHOLLAG_OK) return report(s, "metric " + fa);
  if (chollag_status s = chollag_pair_load(fb.c_str(), &b.p); s != CHOLLAG_OK) return report(s, "metric " + fb);
  LibString json;
  if (chollag_status s = chollag_metric_json(a.p, b.p, grid_n, restricted, seed, &json.p); s != CHOLLAG_OK) {
    return report(s, "metric");
  }
  if (output.empty()) {
    std::fputs(json.c_str(), stdout);
    return 0;
  }
  std::ofstream f(output, std::ios::binary);
  if (!(f << json.c_str())) {
    std::fprintf(stderr, "chollag metric: cannot write %s\n", output.c_str());
    return 4;
  }
  return 0;
}

int cmd_validate(const std::string& suite, std::uint64_t seed) {
  LibString lines;
  int all_passed = 0;
  const chollag_status s = chollag_validate(suite.c_str(), seed, threads_from_env(), nullptr, &lines.p, &all_passed);
  if (s != CHOLLAG_OK) return report(s, "validate");
  std::fputs(lines.c_str(), stdout);
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservative Camassa-Holm solver in Lagrangian coordinates"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run scenario files and write snapshots plus a manifest");
  simulate->add_option("--config", sim.configs, "scenario JSON (repeatable)")->required();
  simulate->add_option("--out-dir", sim.out_dir, "output directory");
  simulate->add_option("--grid-n", sim.grid_n, "label grid size override")->check(CLI::Range(3, 1 << 26));
  simulate->add_option("--dt", sim.dt, "time step override")->check(CLI::PositiveNumber);
  simulate->add_option("--t-end", sim.t_end, "final time override")->check(CLI::NonNegativeNumber);

  bool to_lag = false, to_eul = false, roundtrip = false;
  std::string t_in, t_out;
  std::size_t t_grid = 0;
  auto* transform = app.add_subcommand("transform", "apply L, M or both to a file");
  auto* o1 = transform->add_flag("--to-lagrangian", to_lag, "Eulerian pair -> Lagrangian state");
  auto* o2 = transform->add_flag("--to-eulerian", to_eul, "Lagrangian state -> Eulerian pair");
  auto* o3 = transform->add_flag("--roundtrip", roundtrip, "pair -> M(L(pair)), reporting the discrepancy");
  o1->excludes(o2, o3);
  o2->excludes(o3);
  transform->add_option("input", t_in, "input JSON")->required();
  transform->add_option("output", t_out, "output JSON")->required();
  transform->add_option("--grid-n", t_grid, "label grid size for L (default 2048)");

  std::string ma, mb, m_out;
  double restricted = 0.0;
  std::uint64_t seed = 0;
  std::size_t m_grid = 0;
  auto* metric = app.add_subcommand("metric", "certified bracket for the distance between two pairs");
  metric->add_option("fileA", ma, "first pair (or snapshot) JSON")->required();
  metric->add_option("fileB", mb, "second pair (or snapshot) JSON")->required();
  metric->add_option("--restricted", restricted, "energy bound M for the restricted metric")->check(CLI::PositiveNumber);
  metric->add_option("--seed", seed, "optimizer seed");
  metric->add_option("--grid-n", m_grid, "common label grid size (default 2048)");
  metric->add_option("-o,--output", m_out, "write the bracket here instead of stdout");

  std::string suite;
  std::uint64_t v_seed = 0;
  auto* validate = app.add_subcommand("validate", "run an acceptance suite (or \"all\")");
  validate->add_option("suite", suite, "suite name")->required();
  validate->add_option("--seed", v_seed, "random seed for sampled states");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*simulate) return cmd_simulate(sim);
  if (*transform) {
    if (!to_lag && !to_eul && !roundtrip) {
      std::fprintf(stderr, "chollag transform: pick one of --to-lagrangian, --to-eulerian, --roundtrip\n");
      return 2;
    }
    const chollag_transform_mode mode = to_lag ? CHOLLAG_TO_LAGRANGIAN : to_eul ? CHOLLAG_TO_EULERIAN : CHOLLAG_ROUNDTRIP;
    return cmd_transform(mode, t_in, t_out, t_grid);
  }
  if (*metric) return cmd_metric(ma, mb, restricted, seed, m_grid, m_out);
  return cmd_validate(suite, v_seed);
}
