#include "chollag/chollag.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "chollag/error.hpp"
#include "chollag/io.hpp"
#include "chollag/scenario.hpp"
#include "chollag/validation.hpp"

struct chollag_pair {
  chollag::EulerianPair value;
};
struct chollag_state {
  chollag::LagrangianState value;
};

namespace {

thread_local std::string last_error;

constexpr std::size_t default_grid_n = 2048;

chollag_status set_error(chollag_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Runs `body`, mapping exceptions to status codes.
template <class F>
chollag_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return CHOLLAG_OK;
  } catch (const chollag::Error& e) {
    return set_error(static_cast<chollag_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CHOLLAG_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CHOLLAG_INTERNAL, e.what());
  } catch (...) {
    return set_error(CHOLLAG_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw chollag::Error(chollag::ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

chollag::MetricBracket bracket(const chollag_pair* a, const chollag_pair* b, size_t grid_n, double m, uint64_t seed) {
  require(a, "first pair");
  require(b, "second pair");
  if (m < 0.0) throw chollag::Error(chollag::ErrorCode::config, "restricted bound M must be positive");
  chollag::OptimizerConfig opt;
  opt.seed = seed;
  std::optional<double> bound;
  if (m > 0.0) bound = m;
  return chollag::d_eulerian(a->value, b->value, grid_n ? grid_n : default_grid_n, opt, bound);
}

}  // namespace

extern "C" {

const char* chollag_last_error(void) { return last_error.c_str(); }

void chollag_string_free(char* s) { std::free(s); }

const char* chollag_version(void) { return "0.1.0"; }

chollag_status chollag_pair_create(const double* x, const double* u, const double* density, size_t n,
                                   const double* atom_x, const double* atom_mass, size_t n_atoms, chollag_pair** out) {
  return guarded([&] {
    require(out, "output handle");
    require(x, "x");
    require(u, "u");
    require(density, "density");
    if (n_atoms) {
      require(atom_x, "atom_x");
      require(atom_mass, "atom_mass");
    }
    chollag::EnergyMeasure mu{std::vector<double>(density, density + n), {}};
    for (size_t k = 0; k < n_atoms; ++k) mu.atoms.push_back({atom_x[k], atom_mass[k]});
    auto* h = new chollag_pair{chollag::EulerianPair(std::vector<double>(x, x + n), std::vector<double>(u, u + n), mu)};
    *out = h;
  });
}

chollag_status chollag_pair_load(const char* path, chollag_pair** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output handle");
    *out = new chollag_pair{chollag::pair_from_json(chollag::read_json_file(path))};
  });
}

chollag_status chollag_pair_save(const chollag_pair* p, const char* path) {
  return guarded([&] {
    require(p, "pair");
    require(path, "path");
    chollag::write_json_file(path, chollag::to_json(p->value));
  });
}

chollag_status chollag_pair_size(const chollag_pair* p, size_t* n) {
  return guarded([&] {
    require(p, "pair");
    require(n, "output");
    *n = p->value.size();
  });
}

chollag_status chollag_pair_energy(const chollag_pair* p, double* out) {
  return guarded([&] {
    require(p, "pair");
    require(out, "output");
    *out = chollag::energy(p->value);
  });
}

void chollag_pair_free(chollag_pair* p) { delete p; }

chollag_status chollag_state_load(const char* path, chollag_state** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output handle");
    *out = new chollag_state{chollag::state_from_json(chollag::read_json_file(path))};
  });
}

chollag_status chollag_state_save(const chollag_state* s, const char* path) {
  return guarded([&] {
    require(s, "state");
    require(path, "path");
    chollag::write_json_file(path, chollag::to_json(s->value));
  });
}

chollag_status chollag_state_size(const chollag_state* s, size_t* n) {
  return guarded([&] {
    require(s, "state");
    require(n, "output");
    *n = s->value.size();
  });
}

chollag_status chollag_state_energy(const chollag_state* s, double* out) {
  return guarded([&] {
    require(s, "state");
    require(out, "output");
    *out = s->value.total_energy();
  });
}

void chollag_state_free(chollag_state* s) { delete s; }

chollag_status chollag_to_lagrangian(const chollag_pair* p, size_t grid_n, chollag_state** out) {
  return guarded([&] {
    require(p, "pair");
    require(out, "output handle");
    *out = new chollag_state{chollag::to_lagrangian(p->value, grid_n ? grid_n : default_grid_n)};
  });
}

chollag_status chollag_to_eulerian(const chollag_state* s, chollag_pair** out) {
  return guarded([&] {
    require(s, "state");
    require(out, "output handle");
    *out = new chollag_pair{chollag::to_eulerian(s->value)};
  });
}

chollag_status chollag_metric(const chollag_pair* a, const chollag_pair* b, size_t grid_n, double restricted_m,
                              uint64_t seed, double* lower, double* upper) {
  return guarded([&] {
    require(lower, "lower");
    require(upper, "upper");
    const chollag::MetricBracket r = bracket(a, b, grid_n, restricted_m, seed);
    *lower = r.lower;
    *upper = r.upper;
  });
}

chollag_status chollag_metric_json(const chollag_pair* a, const chollag_pair* b, size_t grid_n, double restricted_m,
                                   uint64_t seed, char** json) {
  return guarded([&] {
    require(json, "output string");
    chollag::Json out = chollag::to_json(bracket(a, b, grid_n, restricted_m, seed));
    const chollag::Json request = {{"a", chollag::to_json(a->value)},
                                   {"b", chollag::to_json(b->value)},
                                   {"grid_n", grid_n ? grid_n : default_grid_n},
                                   {"restricted", restricted_m},
                                   {"seed", seed}};
    out["config_hash"] = chollag::config_hash(request);
    *json = dup_string(chollag::dump_json(out));
  });
}

chollag_status chollag_transform(chollag_transform_mode mode, const char* input_path, const char* output_path,
                                 size_t grid_n, char** report_json) {
  return guarded([&] {
    require(input_path, "input path");
    require(output_path, "output path");
    const chollag::Json in = chollag::read_json_file(input_path);
    const std::size_t n = grid_n ? grid_n : default_grid_n;
    const chollag::Json request = {{"mode", static_cast<int>(mode)}, {"input", in}, {"grid_n", n}};
    chollag::Json out, report = {{"config_hash", chollag::config_hash(request)}};
    switch (mode) {
      case CHOLLAG_TO_LAGRANGIAN: {
        const chollag::LagrangianState x = chollag::to_lagrangian(chollag::pair_from_json(in), n);
        out = chollag::to_json(x);
        report["n"] = x.size();
        report["energy"] = x.total_energy();
        break;
      }
      case CHOLLAG_TO_EULERIAN: {
        const chollag::EulerianPair p = chollag::to_eulerian(chollag::state_from_json(in));
        out = chollag::to_json(p);
        report["n"] = p.size();
        report["energy"] = chollag::energy(p);
        report["atoms"] = p.mu.atoms.size();
        break;
      }
      case CHOLLAG_ROUNDTRIP: {
        const chollag::EulerianPair p = chollag::pair_from_json(in);
        const chollag::LagrangianState x = chollag::to_lagrangian(p, n);
        const chollag::EulerianPair back = chollag::to_eulerian(x);
        const auto u_back = chollag::resample_u(back, p.x);
        double du = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) du = std::max(du, std::abs(u_back[i] - p.u[i]));
        out = chollag::to_json(back);
        report["label_spacing"] = x.grid.spacing();
        report["linf_u"] = du;
        report["energy_in"] = chollag::energy(p);
        report["energy_out"] = chollag::energy(back);
        break;
      }
      default:
        throw chollag::Error(chollag::ErrorCode::config, "unknown transform mode");
    }
    out["config_hash"] = report["config_hash"];
    chollag::write_json_file(output_path, out);
    if (report_json) *report_json = dup_string(chollag::dump_json(report));
  });
}

chollag_status chollag_simulate(const char* config_path, const char* out_dir, size_t grid_n, double dt, double t_end,
                                char** summary_json) {
  return guarded([&] {
    require(config_path, "config path");
    require(out_dir, "output directory");
    chollag::ScenarioOverrides ov;
    if (grid_n) ov.grid_n = grid_n;
    if (dt > 0.0) ov.dt = dt;
    if (t_end >= 0.0) ov.t_end = t_end;
    const chollag::ScenarioConfig cfg = chollag::load_scenario(config_path, ov);
    const chollag::SimulationSummary s = chollag::run_scenario(cfg, out_dir);
    if (summary_json) {
      chollag::Json j = {{"config_hash", s.config_hash},
                         {"manifest", s.manifest.string()},
                         {"files", s.files.size()},
                         {"relative_energy_drift", s.relative_energy_drift},
                         {"max_constraint_residual", s.max_residual},
                         {"rejected_steps", s.rejected_steps}};
      *summary_json = dup_string(chollag::dump_json(j));
    }
  });
}

chollag_status chollag_validate(const char* suite, uint64_t seed, int threads, char** report_json, char** lines,
                                int* all_passed) {
  return guarded([&] {
    require(suite, "suite");
    const auto results = chollag::run_suite(suite, seed, threads);
    chollag::Json arr = chollag::Json::array();
    std::string text;
    bool ok = true;
    for (const auto& r : results) {
      arr.push_back({{"id", r.id}, {"suite", r.suite}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
      text += chollag::format_result(r) + "\n";
      ok = ok && r.passed;
    }
    if (report_json) *report_json = dup_string(chollag::dump_json(arr));
    if (lines) *lines = dup_string(text);
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

chollag_status chollag_suite_names(char** names) {
  return guarded([&] {
    require(names, "output string");
    std::string s;
    for (const auto& n : chollag::suite_names()) s += (s.empty() ? "" : " ") + n;
    *names = dup_string(s);
  });
}

}  // extern "C"
