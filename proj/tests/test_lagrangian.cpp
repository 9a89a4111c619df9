#include <doctest.h>

#include <cmath>
#include <random>

#include "chollag/error.hpp"
#include "chollag/coords.hpp"
#include "chollag/lagrangian.hpp"
#include "chollag/oracles.hpp"
#include "support.hpp"

using namespace chollag;

namespace {

LagrangianState random_state(std::uint64_t seed, std::size_t n = 600) {
  std::mt19937_64 rng(seed);
  RandomPairOptions o;
  o.n = 601;
  const EulerianPair p = random_smooth_pair(rng, o);
  return to_lagrangian(p, Grid(o.lo, o.hi + energy(p), n));
}

}  // namespace

TEST_CASE("sweeps agree with the brute-force double sum") {
  for (std::uint64_t s = 1; s <= 8; ++s) {
    const LagrangianState x = random_state(s);
    const PQ fast = eval_pq(x);
    const PQ slow = ref::direct_pq(x);
    CHECK(ref::max_abs_diff(fast.p, slow.p) < 1e-12);
    CHECK(ref::max_abs_diff(fast.q, slow.q) < 1e-12);
  }
}

TEST_CASE("P and Q of the unit peakon converge to the closed form") {
  const PeakonConfig c{{1.0}, {0.0}};
  double prev = 0.0;
  for (std::size_t n : {1024, 2048, 4096}) {
    const LagrangianState x = peakon_state(c, -25.0, 25.0, n);
    const PQ pq = eval_pq(x);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      err = std::max({err, std::abs(pq.p[i] - ref::peakon_p(x.y(i))), std::abs(pq.q[i] - ref::peakon_q(x.y(i)))});
    }
    CHECK(err < 1e-3);
    if (prev > 0.0) CHECK(prev / err > 3.0);  // second order
    prev = err;
  }
}

TEST_CASE("zero state has no sources") {
  const LagrangianState x(Grid(-3.0, 3.0, 50));
  const PQ pq = eval_pq(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(pq.p[i] == 0.0);
    CHECK(pq.q[i] == 0.0);
  }
  CHECK(e_norm(x) == 0.0);
  CHECK(max_compatibility_residual(x) == 0.0);
}

TEST_CASE("P and Q are unchanged by a rigid shift of y") {
  LagrangianState x = random_state(21);
  const PQ a = eval_pq(x);
  for (double& z : x.zeta) z += 3.25;
  const PQ b = eval_pq(x);
  CHECK(ref::max_abs_diff(a.p, b.p) < 1e-12);
  CHECK(ref::max_abs_diff(a.q, b.q) < 1e-12);
}

TEST_CASE("reflection maps P to P and Q to -Q") {
  // X(xi) -> (-y(-xi), U(-xi), E - H(-xi)) reflects the line.
  const LagrangianState x = random_state(5);
  const std::size_t n = x.size();
  LagrangianState r(Grid(-x.grid.xi_max(), -x.grid.xi_min(), n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    r.zeta[i] = -x.y(j) - r.grid.node(i);
    r.u[i] = x.u[j];
    r.h[i] = x.total_energy() - x.h[j];
  }
  const PQ a = eval_pq(x), b = eval_pq(r);
  double dp = 0.0, dq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dp = std::max(dp, std::abs(a.p[n - 1 - i] - b.p[i]));
    dq = std::max(dq, std::abs(a.q[n - 1 - i] + b.q[i]));
  }
  CHECK(dp < 1e-12);
  CHECK(dq < 1e-12);
}

TEST_CASE("peakon state carries the analytic energy and satisfies the constraint") {
  const PeakonConfig one{{1.0}, {0.0}};
  CHECK(one.energy() == doctest::Approx(2.0));
  const LagrangianState x = peakon_state(one, -30.0, 30.0, 2048);
  CHECK(x.total_energy() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(max_compatibility_residual(x) < 1e-9);
  CHECK(check_membership(x).ok());

  const PeakonConfig two{{1.0, -1.0}, {-5.0, 5.0}};
  CHECK(two.energy() == doctest::Approx(4.0 - 4.0 * std::exp(-10.0)));
}

TEST_CASE("membership flags broken states") {
  LagrangianState x = random_state(3);
  CHECK(check_membership(x).ok());
  x.h[10] = x.h[9] - 1.0;
  const MembershipReport r = check_membership(x);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.h_monotone);
}

TEST_CASE("camassa-holm coefficients reproduce the plain right-hand side") {
  const LagrangianState x = random_state(9);
  const Tangent a = rhs(x);
  const Tangent b = rhs_hyperelastic(x, HyperelasticCoeffs::camassa_holm(0.0));
  CHECK(ref::max_abs_diff(a.d_zeta, b.d_zeta) < 1e-12);
  CHECK(ref::max_abs_diff(a.d_u, b.d_u) < 1e-12);
  CHECK(ref::max_abs_diff(a.d_h, b.d_h) < 1e-12);
}

TEST_CASE("closed-form G matches its quadrature") {
  HyperelasticCoeffs c = HyperelasticCoeffs::rod(0.7);
  for (double v : {-2.0, -0.3, 0.0, 0.5, 1.7}) {
    // G(v) = int_0^v 2g + f'' z^2 = int_0^v (3 - gamma) z^2 + gamma z^2 = v^3
    CHECK(hyperelastic_big_g(c, v) == doctest::Approx(v * v * v).epsilon(1e-10));
  }
}

TEST_CASE("E-distance is a norm of the difference") {
  std::mt19937_64 rng(11);
  const EulerianPair pa = random_smooth_pair(rng), pb = random_smooth_pair(rng);
  const Grid g(-15.0, 15.0 + std::max(energy(pa), energy(pb)), 700);
  const LagrangianState a = to_lagrangian(pa, g), b = to_lagrangian(pb, g);
  CHECK(e_distance(a, a) == 0.0);
  CHECK(e_distance(a, b) == doctest::Approx(e_distance(b, a)));
  CHECK(e_distance(a, b) <= e_norm(a) + e_norm(b) + 1e-12);
}
