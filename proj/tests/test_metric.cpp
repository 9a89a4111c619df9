#include <doctest.h>

#include <cmath>
#include <random>

#include "chollag/error.hpp"
#include "chollag/metric.hpp"
#include "chollag/oracles.hpp"

using namespace chollag;

namespace {

LagrangianState sample(std::mt19937_64& rng, const Grid& g) {
  RandomPairOptions o;
  o.n = 601;
  return to_lagrangian(random_smooth_pair(rng, o), g);
}

}  // namespace

TEST_CASE("sup distance of hand-made states") {
  const Grid g(0.0, 1.0, 3);
  LagrangianState a(g), b(g);
  b.zeta = {0.0, 0.25, 0.0};
  b.u = {0.0, -0.5, 0.1};
  b.h = {0.0, 0.0, 0.75};
  CHECK(linf_dist(a, b) == 0.75);
  b.h[2] = 0.1;
  CHECK(linf_dist(a, b) == 0.5);
}

TEST_CASE("bracket of a state with itself is zero") {
  std::mt19937_64 rng(1);
  const LagrangianState x = sample(rng, Grid(-15.0, 30.0, 512));
  const MetricBracket b = d_bracket(x, x);
  CHECK(b.lower == 0.0);
  CHECK(b.upper == 0.0);
}

TEST_CASE("bracket is ordered, symmetric and sandwiched") {
  std::mt19937_64 rng(2);
  const Grid g(-15.0, 30.0, 512);
  for (int k = 0; k < 5; ++k) {
    const LagrangianState a = sample(rng, g), c = sample(rng, g);
    const MetricBracket ab = d_bracket(a, c), ba = d_bracket(c, a);
    CHECK(ab.lower <= ab.upper);
    CHECK(ab.upper == doctest::Approx(ba.upper).epsilon(1e-12));
    CHECK(0.5 * linf_dist(a, c) <= ab.upper);
    CHECK(ab.upper <= 2.0 * e_distance(a, c));
  }
}

TEST_CASE("relabeled copies are close in the metric") {
  std::mt19937_64 rng(3);
  const LagrangianState x = sample(rng, Grid(-15.0, 30.0, 1024));
  const LagrangianState y = project_pi(relabel(x, random_relabeling(rng, x.grid, 2.0)));
  const double plain = e_distance(x, y);
  const MetricBracket b = d_bracket(x, y);
  CHECK(b.upper < 0.05 * e_norm(x));
  CHECK(b.upper < 2.0 * plain);
  CHECK(b.witness_f1.size() == x.size());
}

TEST_CASE("restricted bound rejects energetic states") {
  std::mt19937_64 rng(4);
  const LagrangianState a = sample(rng, Grid(-15.0, 30.0, 256)), b = sample(rng, Grid(-15.0, 30.0, 256));
  const double m = std::max(a.total_energy(), b.total_energy());
  CHECK_NOTHROW(d_bracket(a, b, {}, m));
  try {
    d_bracket(a, b, {}, 0.5 * m);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
  }
}

TEST_CASE("H1 distance of a peakon from zero") {
  // |c exp(-|x - q|)|_{H1}^2 = 2 c^2
  const double c = 0.7;
  const EulerianPair p = multipeakon_pair(PeakonConfig{{c}, {0.0}}, -25.0, 25.0, 20001);
  const EulerianPair zero(p.x, std::vector<double>(p.size(), 0.0), EnergyMeasure{std::vector<double>(p.size(), 0.0), {}});
  const ClassicalNorms n = classical_norms(p, zero);
  CHECK(n.h1 * n.h1 == doctest::Approx(2.0 * c * c).epsilon(1e-5));
  CHECK(n.linf == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("eulerian bracket uses a common grid") {
  const EulerianPair a = multipeakon_pair(PeakonConfig{{1.0}, {0.0}}, -20.0, 20.0, 1001);
  const EulerianPair b = multipeakon_pair(PeakonConfig{{1.0}, {0.5}}, -20.0, 20.0, 1001);
  const Grid g = common_lagrangian_grid(a, b, 700);
  CHECK(g.size() == 700);
  CHECK(g.xi_max() >= 20.0 + energy(a) - 1e-9);
  const MetricBracket ab = d_eulerian(a, b, 700);
  const MetricBracket aa = d_eulerian(a, a, 700);
  CHECK(aa.upper == 0.0);
  CHECK(ab.upper > 0.0);
  CHECK(jtilde_upper(to_lagrangian(a, g), to_lagrangian(b, g)) >= 0.0);
}
