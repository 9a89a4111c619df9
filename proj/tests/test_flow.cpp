#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "chollag/coords.hpp"
#include "chollag/error.hpp"
#include "chollag/flow.hpp"
#include "chollag/metric.hpp"
#include "chollag/oracles.hpp"
#include "support.hpp"

using namespace chollag;

namespace {

LagrangianState smooth_state(std::uint64_t seed, std::size_t n = 512, int atoms = 0) {
  std::mt19937_64 rng(seed);
  RandomPairOptions o;
  o.n = 601;
  o.max_atoms = atoms;
  const EulerianPair p = random_smooth_pair(rng, o);
  return to_lagrangian(p, Grid(o.lo, o.hi + energy(p), n));
}

SolverConfig quiet(double dt, double t_end) {
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.monitor_every = std::numeric_limits<int>::max();
  return c;
}

}  // namespace

TEST_CASE("relabelings compose and invert") {
  std::mt19937_64 rng(4);
  const Grid g(-5.0, 5.0, 401);
  const Relabeling f = random_relabeling(rng, g, 1.0), h = random_relabeling(rng, g, 1.0);
  CHECK(kappa_of(f) <= 1.0 + 1e-12);
  CHECK(kappa_of(Relabeling::identity(g)) < 1e-12);

  const Relabeling fi = compose(f, invert(f));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(fi.value(i) - g.node(i)));
  CHECK(worst < 1e-3);  // inverse is piecewise linear, so only O(h^2)

  const Relabeling fh = compose(f, h);
  for (double s : {-4.0, -0.3, 2.2}) CHECK(fh(s) == doctest::Approx(f(h(s))).epsilon(1e-12));
  CHECK_THROWS_AS(Relabeling(g, std::vector<double>(g.size(), 1.0)), Error);
}

TEST_CASE("identity relabeling leaves a state untouched") {
  const LagrangianState x = smooth_state(2);
  const LagrangianState y = relabel(x, Relabeling::identity(x.grid));
  CHECK(linf_dist(x, y) == 0.0);
}

TEST_CASE("projection forgets the labeling") {
  std::mt19937_64 rng(8);
  const LagrangianState x = smooth_state(8, 1024);
  const LagrangianState px = project_pi(x);
  CHECK(linf_dist(project_pi(px), px) < 1e-12);

  // y + H = id after projection
  double worst = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) worst = std::max(worst, std::abs(px.y(i) + px.h[i] - px.grid.node(i)));
  CHECK(worst < 1e-9);

  const LagrangianState moved = project_pi(relabel(x, random_relabeling(rng, x.grid, 1.0)));
  CHECK(linf_dist(moved, px) < 5e-3);
}

TEST_CASE("energy at the right end is conserved") {
  const LagrangianState x = smooth_state(13, 1024, 2);
  const Trajectory tr = evolve(x, quiet(2e-3, 1.0));
  CHECK(tr.relative_energy_drift() < 1e-12);
  CHECK(tr.rejected_steps == 0);
  CHECK(tr.times.back() == doctest::Approx(1.0));
}

TEST_CASE("odd data stays odd along the collision run") {
  const CollisionScenario cs = collision_scenario();
  const LagrangianState x0 = peakon_state(cs.peakons, cs.lo, cs.hi, 1024);
  SolverConfig cfg = quiet(4e-3, 5.0);
  cfg.monitor_every = 250;
  const Trajectory tr = evolve(x0, cfg);
  REQUIRE(tr.snapshots.size() >= 5);
  for (const Snapshot& s : tr.snapshots) {
    const EulerianPair e = to_eulerian(s.state);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      worst = std::max(worst, std::abs(e.u[i] + interp_sorted(e.x, e.u, -e.x[i], 0.0, 0.0)));
      scale = std::max(scale, std::abs(e.u[i]));
    }
    CHECK(worst < 1e-2 * std::max(scale, 1e-3));
  }
}

TEST_CASE("lone peakon travels at its height") {
  const LagrangianState x0 = peakon_state(PeakonConfig{{1.0}, {0.0}}, -20.0, 20.0, 2048);
  const EulerianPair e = to_eulerian(evolve(x0, quiet(2e-3, 1.0)).final_state());
  std::size_t top = 0;
  for (std::size_t i = 0; i < e.size(); ++i) top = e.u[i] > e.u[top] ? i : top;
  CHECK(e.x[top] == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(e.u[top] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("flow commutes with relabeling") {
  std::mt19937_64 rng(17);
  const LagrangianState x = smooth_state(17, 512);
  const Relabeling f = random_relabeling(rng, x.grid, 1.5);
  const LagrangianState a = evolve(relabel(x, f), quiet(2e-3, 0.5)).final_state();
  const LagrangianState b = relabel(evolve(x, quiet(2e-3, 0.5)).final_state(), f);
  CHECK(linf_dist(a, b) < 1e-3);
}

TEST_CASE("steps that break y_xi + H_xi > 0 are rejected") {
  LagrangianState x = smooth_state(6, 256);
  const StepResult ok = try_step(x, 1e-3);
  CHECK(ok.accepted);
  for (std::size_t i = 100; i < 110; ++i) {
    x.zeta[i] = x.zeta[99] - (x.grid.node(i) - x.grid.node(99));
    x.h[i] = x.h[99];
  }
  x.u[104] = 50.0;
  const StepResult bad = try_step(x, 0.05);
  CHECK_FALSE(bad.accepted);
  CHECK_FALSE(bad.reason.empty());
}

TEST_CASE("non-finite input aborts the solver") {
  LagrangianState x = smooth_state(6, 128);
  x.u[40] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(evolve(x, quiet(1e-2, 0.1)), Error);
}

TEST_CASE("time step bound follows the sup of U") {
  LagrangianState x(Grid(0.0, 1.0, 5));
  CHECK(dt_max(x) == 0.5);
  x.u[2] = -4.0;
  CHECK(dt_max(x) == 0.125);
}
