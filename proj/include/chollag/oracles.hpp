#pragma once

#include <random>
#include <vector>

#include "chollag/coords.hpp"
#include "chollag/flow.hpp"

namespace chollag {

/// u(x) = sum_i p_i exp(-|x - q_i|) with strictly increasing q.
struct PeakonConfig {
  std::vector<double> p;
  std::vector<double> q;

  void validate() const;
  double u(double x) const;
  /// One-sided derivative from the right at crests.
  double u_x(double x) const;
  /// Exact H^1 energy: 2 sum_ij p_i p_j exp(-|q_i - q_j|).
  double energy() const;
  /// int_{-inf}^x (u^2 + u_x^2) in closed form.
  double cumulative_energy(double x) const;
};

/// Sorted uniform x-grid on [lo, hi] with n nodes plus the crests q_i
/// (nodes closer than a tenth of the spacing to a crest are replaced by it).
std::vector<double> peakon_x_grid(const PeakonConfig& cfg, double lo, double hi, std::size_t n);

/// Sampled multipeakon pair; the density on each cell is the exact cell
/// average of u^2 + u_x^2, so the ac mass equals the energy on [lo, hi].
EulerianPair multipeakon_pair(const PeakonConfig& cfg, double lo, double hi, std::size_t n);
EulerianPair multipeakon_pair(const PeakonConfig& cfg, std::span<const double> x);

/// Lagrangian image of a multipeakon on a label grid whose nodes contain the
/// crest labels of the first and last crest. Built from the closed-form
/// cumulative energy: y solves y + E(y) = xi, H = xi - y, U = u(y), with u
/// cut off outside [lo, hi].
LagrangianState peakon_state(const PeakonConfig& cfg, double lo, double hi, std::size_t n);
/// Same construction on a given label grid.
LagrangianState peakon_state(const PeakonConfig& cfg, double lo, double hi, const Grid& g);
/// Label window [lo, hi + E] with crest labels on nodes.
Grid peakon_grid(const PeakonConfig& cfg, double lo, double hi, std::size_t n);

/// Random smooth data u = sum a_k exp(-(x - c_k)^2 / (2 s_k^2)) sampled on a
/// uniform x-grid; density = cell average of u^2 + u_x^2 (5-point Gauss), plus
/// up to `max_atoms` atoms at random nodes.
struct RandomPairOptions {
  double lo = -15.0;
  double hi = 15.0;
  std::size_t n = 1501;
  int bumps = 3;
  double amplitude = 1.0;
  int max_atoms = 2;
  double atom_mass = 1.0;  // masses drawn from (0.1, atom_mass)
};
EulerianPair random_smooth_pair(std::mt19937_64& rng, const RandomPairOptions& opt = {});

/// Random relabeling f = id + A b((xi - c) / w) with slopes in
/// [1/(1+kappa), 1+kappa] and |f - id| <= kappa (kappa_of(f) <= kappa).
Relabeling random_relabeling(std::mt19937_64& rng, const Grid& g, double kappa);

/// Expected behaviour of the antisymmetric collision: u vanishes at t*, the
/// whole energy sits in one atom at the origin, and afterwards the solution
/// is the time reversal u(2 t* - t, x) = -u(t, x) = u(t, -x).
struct CollisionSignature {
  double atom_x = 0.0;
  double atom_mass = 0.0;
  double u_linf_at_collision = 0.0;
};

struct CollisionScenario {
  PeakonConfig peakons;
  double lo = -30.0;
  double hi = 30.0;
  CollisionSignature expected;
};

/// p = (1, -1), q = (-5, 5) on [-30, 30].
CollisionScenario collision_scenario();

/// Separable test function b(t / tau) b((x - c) / a) with
/// b(s) = exp(1 / (s^2 - 1)) on |s| < 1. Supported in t < tau, x in (c - a, c + a).
struct BumpTestFunction {
  double tau = 1.0;
  double x_center = 0.0;
  double x_half = 1.0;

  double phi(double t, double x) const;
  double phi_t(double t, double x) const;
  double phi_x(double t, double x) const;
};

/// P = (1/4) exp(-|x|) * (u^2 dx + mu) and its derivative at the nodes of an
/// Eulerian pair (second order: cell masses at cell midpoints plus atoms).
struct EulerianP {
  std::vector<double> p;
  std::vector<double> p_x;
};
EulerianP eulerian_p(const EulerianPair& s);

struct WeakResidual {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Accumulates the weak-form residuals over a sequence of Eulerian snapshots
/// (time trapezoid between consecutive snapshots). The first snapshot must be
/// at t = 0; the test function must vanish beyond the last time and inside
/// each snapshot's x-range.
class WeakResidualAccumulator {
 public:
  explicit WeakResidualAccumulator(BumpTestFunction tf);
  void add(double t, const EulerianPair& s);
  /// Throws if the test function's time support reaches past the last snapshot.
  WeakResidual result() const;

 private:
  BumpTestFunction tf_;
  bool started_ = false;
  double t_prev_ = 0.0;
  double i1_prev_ = 0.0;
  double i2_prev_ = 0.0;
  double initial_ = 0.0;
  double r1_ = 0.0;
  double r2_ = 0.0;
};

WeakResidual weak_residual(const std::vector<std::pair<double, EulerianPair>>& snapshots, const BumpTestFunction& tf);

/// Runs the Camassa-Holm flow from x0 to t_end with step dt and returns the
/// residuals of the Eulerian images of every accepted step.
WeakResidual weak_residual_of_run(const LagrangianState& x0, double dt, double t_end, const BumpTestFunction& tf);

}  // namespace chollag
