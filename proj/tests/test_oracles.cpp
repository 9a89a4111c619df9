#include <doctest.h>

#include <cmath>
#include <random>

#include "chollag/error.hpp"
#include "chollag/oracles.hpp"

using namespace chollag;

TEST_CASE("peakon profile and cumulative energy") {
  const PeakonConfig c{{1.0, -0.5}, {-2.0, 3.0}};
  CHECK(c.u(-2.0) == doctest::Approx(1.0 - 0.5 * std::exp(-5.0)));
  // u_x jumps by -2 p_i at each crest
  CHECK(c.u_x(-2.0 + 1e-9) - c.u_x(-2.0 - 1e-9) == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(c.cumulative_energy(-1e3) == doctest::Approx(0.0));
  CHECK(c.cumulative_energy(1e3) == doctest::Approx(c.energy()).epsilon(1e-12));

  // cumulative energy against a fine midpoint quadrature of u^2 + u_x^2
  double e = 0.0;
  const double h = 1e-4;
  for (double x = -40.0 + 0.5 * h; x < 1.0; x += h) e += (c.u(x) * c.u(x) + c.u_x(x) * c.u_x(x)) * h;
  CHECK(c.cumulative_energy(1.0) == doctest::Approx(e).epsilon(1e-6));
}

TEST_CASE("invalid peakon lists are refused") {
  CHECK_THROWS_AS((PeakonConfig{{1.0}, {0.0, 1.0}}.validate()), Error);
  CHECK_THROWS_AS((PeakonConfig{{1.0, 1.0}, {1.0, 0.0}}.validate()), Error);
  // no peakons is the zero solution
  CHECK_NOTHROW((PeakonConfig{{}, {}}.validate()));
  CHECK((PeakonConfig{{}, {}}.energy()) == 0.0);
}

TEST_CASE("sampled peakon pair integrates to the analytic energy") {
  const PeakonConfig c{{1.0, -1.0}, {-5.0, 5.0}};
  const EulerianPair p = multipeakon_pair(c, -30.0, 30.0, 3001);
  CHECK(energy(p) == doctest::Approx(c.energy()).epsilon(1e-9));
}

TEST_CASE("random relabelings respect their kappa") {
  std::mt19937_64 rng(9);
  const Grid g(-10.0, 10.0, 801);
  for (double kappa : {0.1, 0.5, 2.0, 5.0}) {
    for (int k = 0; k < 5; ++k) CHECK(kappa_of(random_relabeling(rng, g, kappa)) <= kappa + 1e-12);
  }
}

TEST_CASE("random pairs have consistent densities") {
  std::mt19937_64 rng(10);
  const EulerianPair p = random_smooth_pair(rng);
  CHECK_NOTHROW(p.validate());
  CHECK(density_deficit(p) < 1e-3);
}

TEST_CASE("bump derivatives match finite differences") {
  const BumpTestFunction tf{1.5, 0.3, 2.0};
  const double e = 1e-6;
  for (double t : {0.0, 0.4, 1.1}) {
    for (double x : {-1.2, 0.0, 0.9, 2.0}) {
      CHECK(tf.phi_t(t, x) == doctest::Approx((tf.phi(t + e, x) - tf.phi(t - e, x)) / (2 * e)).epsilon(1e-5));
      CHECK(tf.phi_x(t, x) == doctest::Approx((tf.phi(t, x + e) - tf.phi(t, x - e)) / (2 * e)).epsilon(1e-5));
    }
  }
  CHECK(tf.phi(1.5, 0.3) == 0.0);
  CHECK(tf.phi(0.5, 2.4) == 0.0);
  CHECK(tf.phi(0.0, 0.3) > 0.0);
}

TEST_CASE("eulerian P of the unit peakon") {
  const EulerianPair p = multipeakon_pair(PeakonConfig{{1.0}, {0.0}}, -25.0, 25.0, 10001);
  const EulerianP e = eulerian_p(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = std::abs(p.x[i]);
    worst = std::max(worst, std::abs(e.p[i] - (std::exp(-a) - 0.5 * std::exp(-2 * a))));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("weak residual of the zero solution vanishes") {
  const LagrangianState x0(Grid(-10.0, 10.0, 256));
  const WeakResidual r = weak_residual_of_run(x0, 1e-2, 1.0, BumpTestFunction{0.9, 0.0, 3.0});
  CHECK(std::abs(r.r1) < 1e-14);
  CHECK(std::abs(r.r2) < 1e-14);
}

TEST_CASE("weak residual refuses a test function outliving the run") {
  const LagrangianState x0(Grid(-10.0, 10.0, 64));
  CHECK_THROWS_AS(weak_residual_of_run(x0, 1e-2, 0.5, BumpTestFunction{1.0, 0.0, 3.0}), Error);
}

TEST_CASE("collision scenario description") {
  const CollisionScenario cs = collision_scenario();
  CHECK(cs.peakons.p.size() == 2);
  CHECK(cs.expected.atom_mass == doctest::Approx(cs.peakons.energy()));
  CHECK(cs.expected.atom_x == 0.0);
}
