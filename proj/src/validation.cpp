#include "chollag/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "chollag/error.hpp"
#include "chollag/metric.hpp"
#include "chollag/oracles.hpp"

namespace chollag {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
std::string g3(double v) { return fmt("%.3g", v); }

double sup_u(const LagrangianState& x) {
  double m = 0.0;
  for (double v : x.u) m = std::max(m, std::abs(v));
  return m;
}

// Sorted union of abscissae.
std::vector<double> merge_nodes(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

LagrangianState negate_u(LagrangianState x) {
  for (double& v : x.u) v = -v;
  return x;
}

SolverConfig solver(double dt, double t_end) {
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.monitor_every = std::numeric_limits<int>::max();
  return c;
}

// --- 1 -------------------------------------------------------------------
// Brute-force double loop for the cellwise trapezoid quadrature of P and Q.
PQ direct_pq(const LagrangianState& x) {
  const std::size_t n = x.size();
  std::vector<double> m(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m[k] = 0.5 * (x.u[k] * x.u[k] + x.u[k + 1] * x.u[k + 1]) * (x.y(k + 1) - x.y(k)) + (x.h[k + 1] - x.h[k]);
  }
  PQ out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = x.y(i);
    double p = 0.0, q = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double kern = 0.5 * (std::exp(-std::abs(yi - x.y(k))) + std::exp(-std::abs(yi - x.y(k + 1))));
      const double sign = k < i ? 1.0 : -1.0;  // cell left of node i, or right of it
      p += m[k] * kern;
      q += sign * m[k] * kern;
    }
    out.p[i] = 0.25 * p;
    out.q[i] = -0.25 * q;
  }
  return out;
}

CriterionResult convolution(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int s = 0; s < 50; ++s) {
    RandomPairOptions o;
    o.n = 801;
    const EulerianPair pair = random_smooth_pair(rng, o);
    LagrangianState x = to_lagrangian(pair, Grid(o.lo, o.hi + energy(pair), 1000));
    if (s % 2 == 1) x = relabel(x, random_relabeling(rng, x.grid, 1.0));
    const PQ fast = eval_pq(x);
    const PQ slow = direct_pq(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max({worst, std::abs(fast.p[i] - slow.p[i]), std::abs(fast.q[i] - slow.q[i])});
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CriterionResult r;
  r.passed = worst <= 1e-12 && secs < 5.0;
  r.detail = "50 states N=1000: max|sweep - direct| = " + g3(worst) + " (<= 1e-12), " + fmt("%.2f", secs) + " s (< 5 s)";
  return r;
}

// --- 2 -------------------------------------------------------------------
CriterionResult peakon(std::uint64_t) {
  const PeakonConfig c{{1.0}, {0.0}};
  const double lo = -20.0, hi = 20.0;
  auto error_at = [&](std::size_t n, double dt) {
    // Default label grid: the crest is not placed on a node.
    const Grid g(lo, hi + c.cumulative_energy(hi), n);
    const Trajectory tr = evolve(peakon_state(c, lo, hi, g), solver(dt, 1.0));
    const EulerianPair e = to_eulerian(tr.final_state());
    std::vector<double> xs = Grid(lo, hi, 400001).nodes();
    xs.push_back(1.0);
    xs = merge_nodes(std::move(xs), e.x);
    double err = 0.0;
    for (double x : xs) err = std::max(err, std::abs(interp_sorted(e.x, e.u, x, 0.0, 0.0) - std::exp(-std::abs(x - 1.0))));
    return err;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const double e1 = error_at(4096, 1e-3);
  const double e2 = error_at(8192, 5e-4);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ratio = e1 / e2;
  CriterionResult r;
  r.passed = e1 <= 0.02 && ratio >= 1.6 && ratio <= 2.4 && secs < 60.0;
  r.detail = "N=4096 dt=1e-3: L-inf error " + g3(e1) + " (<= 0.02); N=8192 dt=5e-4: " + g3(e2) + "; ratio " +
             fmt("%.3f", ratio) + " (2 +- 20%), " + fmt("%.1f", secs) + " s (< 60 s)";
  return r;
}

// --- 3 -------------------------------------------------------------------
CriterionResult conservation(std::uint64_t) {
  const Trajectory single = evolve(peakon_state(PeakonConfig{{1.0}, {0.0}}, -20.0, 20.0, 4096), solver(1e-3, 2.0));
  const CollisionScenario cs = collision_scenario();
  const Trajectory pair = evolve(peakon_state(cs.peakons, cs.lo, cs.hi, 4096), solver(1e-3, 2.0));
  const double d1 = single.relative_energy_drift(), d2 = pair.relative_energy_drift();
  CriterionResult r;
  r.passed = d1 <= 1e-6 && d2 <= 1e-6;
  r.detail = "relative drift of H(t, xi_max) on [0, 2]: peakon " + g3(d1) + ", antisymmetric pair " + g3(d2) + " (<= 1e-6)";
  return r;
}

// --- 4 -------------------------------------------------------------------
CriterionResult constraint(std::uint64_t) {
  const PeakonConfig c{{1.0}, {0.0}};
  std::vector<double> res0, res2;
  const std::size_t ns[] = {2048, 4096, 8192};
  for (std::size_t n : ns) {
    const Trajectory tr = evolve(peakon_state(c, -20.0, 20.0, n), solver(1e-3 * 4096.0 / n, 2.0));
    res0.push_back(tr.max_residual.front());
    res2.push_back(tr.max_residual.back());
  }
  const bool bounded = res2[1] <= 10.0 * res0[1] + 1e-4;
  const bool refining = res2[1] < res2[0] && res2[2] < res2[1];
  CriterionResult r;
  r.passed = bounded && refining;
  r.detail = "N=4096: residual(T=2) " + g3(res2[1]) + " <= 10*" + g3(res0[1]) + " + 1e-4; N=2048/4096/8192: " +
             g3(res2[0]) + " > " + g3(res2[1]) + " > " + g3(res2[2]);
  return r;
}

// --- 5 -------------------------------------------------------------------
struct CollisionRun {
  double t_star = 0.0;
  LagrangianState at_star;
  LagrangianState x0;
  double energy0 = 0.0;
};

CollisionRun run_collision(std::size_t n, double dt) {
  const CollisionScenario cs = collision_scenario();
  CollisionRun run;
  run.x0 = peakon_state(cs.peakons, cs.lo, cs.hi, n);
  run.energy0 = run.x0.total_energy();
  double best = std::numeric_limits<double>::infinity();
  // t* is the monitored time with the smallest sup |u|; the collision of this
  // pair happens well before t = 8.
  evolve(run.x0, solver(dt, 8.0), {}, [&](double t, const LagrangianState& s) {
    const double m = sup_u(s);
    if (m < best) {
      best = m;
      run.t_star = t;
      run.at_star = s;
    }
  });
  return run;
}

CriterionResult collision(std::uint64_t) {
  const CollisionRun run = run_collision(4096, 1e-3);
  const double u_star = sup_u(run.at_star);
  const EulerianPair e_star = to_eulerian(run.at_star);
  const bool one_atom = e_star.mu.atoms.size() == 1;
  const double ax = one_atom ? e_star.mu.atoms[0].x : std::numeric_limits<double>::quiet_NaN();
  const double am = one_atom ? e_star.mu.atoms[0].mass : std::numeric_limits<double>::quiet_NaN();
  const double mass_err = std::abs(am - run.energy0) / run.energy0;

  const Trajectory late = evolve(run.x0, solver(1e-3, 2.0 * run.t_star));
  const EulerianPair e2 = to_eulerian(late.final_state());
  const EulerianPair e0 = to_eulerian(run.x0);
  std::vector<double> mirrored(e0.x.rbegin(), e0.x.rend());
  for (double& v : mirrored) v = -v;
  const auto xs = merge_nodes(e2.x, mirrored);
  double stated = 0.0, reversed = 0.0;
  for (double x : xs) {
    const double u2 = interp_sorted(e2.x, e2.u, x, 0.0, 0.0);
    const double u0m = interp_sorted(e0.x, e0.u, -x, 0.0, 0.0);
    stated = std::max(stated, std::abs(u2 + u0m));
    reversed = std::max(reversed, std::abs(u2 - u0m));
  }
  CriterionResult r;
  const bool at_star_ok = u_star <= 0.05 && one_atom && std::abs(ax) <= 0.05 && mass_err <= 0.02;
  r.passed = at_star_ok && stated <= 0.05;
  std::ostringstream os;
  os << "t*=" << fmt("%.4f", run.t_star) << ": sup|u| " << g3(u_star) << " (<= 0.05), atoms " << e_star.mu.atoms.size()
     << " at x=" << g3(ax) << " (|x| <= 0.05) mass " << fmt("%.6g", am) << " vs energy " << fmt("%.6g", run.energy0)
     << " (rel " << g3(mass_err) << " <= 0.02); 2t*: sup|u(2t*,x) + u(0,-x)| = " << g3(stated)
     << " (<= 0.05) [time-reversal form sup|u(2t*,x) - u(0,-x)| = " << g3(reversed) << "]";
  r.detail = os.str();
  return r;
}

// --- 6 -------------------------------------------------------------------
CriterionResult equivariance(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 6);
  RandomPairOptions o;
  o.max_atoms = 0;
  const EulerianPair pair = random_smooth_pair(rng, o);
  const LagrangianState x = to_lagrangian(pair, Grid(o.lo, o.hi + energy(pair), 2048));
  const double dt = 1e-3, t_end = 1.0;
  const double bound = 5.0 * (x.grid.spacing() + std::pow(dt, 4)) * std::exp(t_end);
  const LagrangianState base = evolve(x, solver(dt, t_end)).final_state();
  double worst = 0.0, worst_kappa = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Relabeling f = random_relabeling(rng, x.grid, 2.0);
    worst_kappa = std::max(worst_kappa, kappa_of(f));
    const LagrangianState moved = evolve(relabel(x, f), solver(dt, t_end)).final_state();
    worst = std::max(worst, linf_dist(moved, relabel(base, f)));
  }
  CriterionResult r;
  r.passed = worst <= bound && worst_kappa <= 2.0;
  r.detail = "10 relabelings (max kappa " + g3(worst_kappa) + " <= 2): max L-inf " + g3(worst) + " <= 5(h+dt^4)e^T = " + g3(bound);
  return r;
}

// --- 7 -------------------------------------------------------------------
CriterionResult roundtrip(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 7);
  const std::size_t n = 2048;
  double worst_u = 0.0, worst_u_ratio = 0.0, worst_mass = 0.0, worst_e_ratio = 0.0, worst_e = 0.0;
  for (int s = 0; s < 20; ++s) {
    const EulerianPair p = random_smooth_pair(rng);
    const LagrangianState x = to_lagrangian(p, n);
    const EulerianPair back = to_eulerian(x);
    double ux = 0.0, du = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      du = std::max(du, std::abs(interp_sorted(back.x, back.u, p.x[i], 0.0, 0.0) - p.u[i]));
      if (i + 1 < p.size()) ux = std::max(ux, std::abs((p.u[i + 1] - p.u[i]) / (p.x[i + 1] - p.x[i])));
    }
    const double tol_u = 10.0 * x.grid.spacing() * (1.0 + ux);
    worst_u = std::max(worst_u, du);
    worst_u_ratio = std::max(worst_u_ratio, du / tol_u);
    worst_mass = std::max(worst_mass, std::abs(energy(back) - energy(p)));
  }
  for (int s = 0; s < 20; ++s) {
    const EulerianPair p = random_smooth_pair(rng);
    LagrangianState x = to_lagrangian(p, n);
    const LagrangianState again = to_lagrangian(to_eulerian(x), x.grid);
    const double d = e_distance(again, x);
    worst_e = std::max(worst_e, d);
    worst_e_ratio = std::max(worst_e_ratio, d / (10.0 * x.grid.spacing() * (1.0 + e_norm(x))));
  }
  CriterionResult r;
  r.passed = worst_u_ratio <= 1.0 && worst_mass <= 1e-10 && worst_e_ratio <= 1.0;
  r.detail = "M o L: max u error " + g3(worst_u) + " (" + g3(worst_u_ratio) + " of 10h(1+|u_x|)), mass " +
             g3(worst_mass) + " (<= 1e-10); L o M: max E-distance " + g3(worst_e) + " (" + g3(worst_e_ratio) +
             " of 10h(1+|X|))";
  return r;
}

// --- 8 -------------------------------------------------------------------
CriterionResult sandwich(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 8);
  const double m_bound = 12.0;
  RandomPairOptions o;
  o.n = 801;
  const Grid g(o.lo, o.hi + m_bound, 1024);
  OptimizerConfig opt;
  opt.seed = seed;
  int failures = 0, pairs = 0;
  double min_gap_low = std::numeric_limits<double>::infinity(), min_gap_high = min_gap_low;
  while (pairs < 50) {
    const EulerianPair pa = random_smooth_pair(rng, o), pb = random_smooth_pair(rng, o);
    if (energy(pa) > m_bound || energy(pb) > m_bound) continue;
    const LagrangianState xa = to_lagrangian(pa, g), xb = to_lagrangian(pb, g);
    const MetricBracket b = d_bracket(xa, xb, opt, m_bound);
    const double half_linf = 0.5 * linf_dist(xa, xb), two_e = 2.0 * e_distance(xa, xb);
    const bool ok = half_linf <= b.upper && b.upper <= two_e && b.lower <= b.upper;
    failures += ok ? 0 : 1;
    min_gap_low = std::min(min_gap_low, b.upper - half_linf);
    min_gap_high = std::min(min_gap_high, two_e - b.upper);
    ++pairs;
  }
  CriterionResult r;
  r.passed = failures == 0;
  r.detail = "50 pairs with energy <= 12: violations " + std::to_string(failures) + "; min(upper - linf/2) = " +
             g3(min_gap_low) + ", min(2|dX|_E - upper) = " + g3(min_gap_high);
  return r;
}

// --- 9 -------------------------------------------------------------------
CriterionResult equivalence(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 9);
  RandomPairOptions o;
  o.n = 801;
  OptimizerConfig opt;
  opt.seed = seed;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const EulerianPair p = random_smooth_pair(rng, o);
    const LagrangianState x = to_lagrangian(p, Grid(o.lo, o.hi + energy(p), 1024));
    const LagrangianState y = project_pi(relabel(x, random_relabeling(rng, x.grid, 2.0)));
    const MetricBracket b = d_bracket(x, y, opt);
    worst = std::max(worst, b.upper / e_norm(x));
  }
  CriterionResult r;
  r.passed = worst <= 0.05;
  r.detail = "10 pairs (X, Pi(X o f)): max upper / |X|_E = " + g3(worst) + " (<= 0.05)";
  return r;
}

// --- 10 ------------------------------------------------------------------
CriterionResult discontinuity(std::uint64_t seed) {
  const std::size_t n = 4096;
  const double dt = 1e-3;
  const CollisionRun run = run_collision(n, dt);
  const double t_star = run.t_star, eps = 0.1 * t_star;
  // u^eps(t) = u(t - eps); by time reversal u(-eps) = -S_eps(-u0).
  const LagrangianState xe0 = negate_u(evolve(negate_u(run.x0), solver(dt, eps)).final_state());
  const LagrangianState xe_star = evolve(xe0, solver(dt, t_star)).final_state();

  const EulerianPair u0 = to_eulerian(run.x0), ue0 = to_eulerian(xe0);
  const EulerianPair us = to_eulerian(project_pi(run.at_star)), ues = to_eulerian(project_pi(xe_star));

  // H^1 distance at t* on the union of both x-grids (exact for piecewise-linear u).
  const auto xs = merge_nodes(us.x, ues.x);
  auto on = [&](const EulerianPair& p) {
    return EulerianPair(xs, resample_u(p, xs), EnergyMeasure{std::vector<double>(xs.size(), 0.0), {}});
  };
  const double h1 = classical_norms(on(us), on(ues)).h1;
  const double h1_u0 = std::sqrt(collision_scenario().peakons.energy());

  OptimizerConfig opt;
  opt.seed = seed;
  const MetricBracket b0 = d_eulerian(u0, ue0, 2048, opt);
  const MetricBracket bs = d_eulerian(us, ues, 2048, opt);
  CriterionResult r;
  r.passed = h1 >= 0.8 * h1_u0 && bs.upper <= 20.0 * b0.upper;
  r.detail = "t*=" + fmt("%.4f", t_star) + ", eps=" + fmt("%.4f", eps) + ": |u(t*) - u^eps(t*)|_H1 = " + g3(h1) +
             " (>= 0.8*" + g3(h1_u0) + "); d_D upper at t* " + g3(bs.upper) + " <= 20 * " + g3(b0.upper) +
             " (ratio " + fmt("%.2f", bs.upper / b0.upper) + ")";
  return r;
}

// --- 11 ------------------------------------------------------------------
CriterionResult weak(std::uint64_t) {
  const PeakonConfig c{{1.0}, {0.0}};
  const BumpTestFunction tf{1.0, 0.5, 3.0};
  const std::pair<std::size_t, double> levels[] = {{1024, 4e-3}, {2048, 2e-3}, {4096, 1e-3}};
  std::vector<WeakResidual> w;
  for (auto [n, dt] : levels) w.push_back(weak_residual_of_run(peakon_state(c, -20.0, 20.0, n), dt, 1.0, tf));
  bool ok = true;
  std::ostringstream os;
  os << "|r1|:";
  for (std::size_t k = 0; k < 3; ++k) os << " " << g3(std::abs(w[k].r1));
  os << " |r2|:";
  for (std::size_t k = 0; k < 3; ++k) os << " " << g3(std::abs(w[k].r2));
  os << "; ratios";
  for (std::size_t k = 0; k + 1 < 3; ++k) {
    const double a = std::abs(w[k].r1) / std::abs(w[k + 1].r1), b = std::abs(w[k].r2) / std::abs(w[k + 1].r2);
    ok = ok && a >= 1.6 && b >= 1.6;
    os << " " << fmt("%.2f", a) << "/" << fmt("%.2f", b);
  }
  os << " (>= 1.6)";
  CriterionResult r;
  r.passed = ok;
  r.detail = os.str();
  return r;
}

// --- 12 ------------------------------------------------------------------
CriterionResult hyperelastic(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 12);
  const HyperelasticCoeffs ch = HyperelasticCoeffs::camassa_holm(0.0);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    RandomPairOptions o;
    o.n = 801;
    const EulerianPair p = random_smooth_pair(rng, o);
    LagrangianState x = to_lagrangian(p, Grid(o.lo, o.hi + energy(p), 1000));
    if (s % 2 == 1) x = relabel(x, random_relabeling(rng, x.grid, 1.0));
    const Tangent a = rhs(x), b = rhs_hyperelastic(x, ch);
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max({worst, std::abs(a.d_zeta[i] - b.d_zeta[i]), std::abs(a.d_u[i] - b.d_u[i]),
                        std::abs(a.d_h[i] - b.d_h[i])});
    }
  }
  CriterionResult r;
  r.passed = worst <= 1e-12;
  r.detail = "20 states: max|rhs_hyperelastic - rhs| = " + g3(worst) + " (<= 1e-12)";
  return r;
}

using SuiteFn = CriterionResult (*)(std::uint64_t);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"convolution", convolution},   {"peakon", peakon},           {"conservation", conservation},
      {"constraint", constraint},     {"collision", collision},     {"equivariance", equivariance},
      {"roundtrip", roundtrip},       {"sandwich", sandwich},       {"equivalence", equivalence},
      {"discontinuity", discontinuity}, {"weak", weak},             {"hyperelastic", hyperelastic}};
  return r;
}

CriterionResult run_one(std::size_t index, std::uint64_t seed) {
  const auto& [name, fn] = registry()[index];
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn(seed);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = static_cast<int>(index) + 1;
  r.suite = name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : registry()) v.push_back(e.first);
    v.push_back("all");
    return v;
  }();
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<CriterionResult> run_suite(const std::string& name, std::uint64_t seed, int threads) {
  if (!is_suite(name)) throw Error(ErrorCode::config, "unknown validation suite \"" + name + "\"");
  const auto& reg = registry();
  if (name != "all") {
    for (std::size_t i = 0; i < reg.size(); ++i) {
      if (reg[i].first == name) return {run_one(i, seed)};
    }
  }
  std::vector<CriterionResult> out(reg.size());
  const std::size_t workers = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(reg.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < reg.size(); ++i) out[i] = run_one(i, seed);
    return out;
  }
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex mu;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= reg.size()) return;
          i = next++;
        }
        out[i] = run_one(i, seed);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.suite << ": " << r.detail << " (" << fmt("%.1f", r.seconds)
     << " s)";
  return os.str();
}

}  // namespace chollag
