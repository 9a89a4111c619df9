#pragma once

#include <optional>
#include <vector>

#include "chollag/flow.hpp"
#include "chollag/lagrangian.hpp"

namespace chollag {

struct Atom {
  double x;
  double mass;
};

/// Energy measure: piecewise-constant absolutely continuous part plus atoms.
///
/// `density[i]` is the density on [x_i, x_{i+1}); the last entry belongs to
/// no cell and must be zero. Atoms lie in [x_0, x_last] at distinct points.
struct EnergyMeasure {
  std::vector<double> density;
  std::vector<Atom> atoms;

  double ac_mass(std::span<const double> x) const;
  double atom_mass() const;
};

/// Eulerian pair (u, mu) on a strictly increasing x-grid.
struct EulerianPair {
  std::vector<double> x;
  std::vector<double> u;
  EnergyMeasure mu;

  EulerianPair() = default;
  EulerianPair(std::vector<double> x, std::vector<double> u, EnergyMeasure mu);
  std::size_t size() const { return x.size(); }
  /// Throws on malformed data (lengths, ordering, negative mass).
  void validate() const;
};

/// Total energy mu(R).
double energy(const EulerianPair& p);

/// Largest shortfall of the ac density below the cellwise estimate of
/// u^2 + u_x^2 (positive means the density is too small).
double density_deficit(const EulerianPair& p);

/// Label of the point x: x + mu((-inf, x)).
double lagrangian_label(const EulerianPair& p, double x);

/// Label window covering the pair: [x_0, x_last + mu(R)].
Grid default_lagrangian_grid(const EulerianPair& p, std::size_t n);

/// The map L: y(xi) = sup{y | mu((-inf, y)) + y < xi}, H = xi - y, U = u o y.
LagrangianState to_lagrangian(const EulerianPair& p, const Grid& g);
LagrangianState to_lagrangian(const EulerianPair& p, std::size_t n);

struct EulerianOptions {
  /// Cells with y_xi below this are singular; default sqrt(h).
  std::optional<double> singular_threshold;
};

/// The map M: u = U o y^{-1}, mu = y_#(H_xi dxi). Maximal runs of singular
/// cells become one atom at the mean y of the run.
EulerianPair to_eulerian(const LagrangianState& x, const EulerianOptions& opt = {});

/// T_t = M o Sbar_t o L on the given label grid.
EulerianPair t_t(const EulerianPair& p, const Grid& g, const SolverConfig& cfg, const Dynamics& dyn = {});

/// u resampled (linearly) on another x-grid; zero outside the data range.
std::vector<double> resample_u(const EulerianPair& p, std::span<const double> x);

}  // namespace chollag
