#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chollag/grid.hpp"

namespace chollag {

/// Grid-sampled Lagrangian state X = (zeta, U, H) with y = xi + zeta.
///
/// Outside the grid window zeta and H are taken constant (their end values)
/// and U is zero.
struct LagrangianState {
  Grid grid;
  std::vector<double> zeta;
  std::vector<double> u;
  std::vector<double> h;

  LagrangianState() = default;
  explicit LagrangianState(Grid g);
  LagrangianState(Grid g, std::vector<double> zeta, std::vector<double> u, std::vector<double> h);

  std::size_t size() const { return grid.size(); }
  double y(std::size_t i) const { return grid.node(i) + zeta[i]; }
  std::vector<double> y_values() const;
  /// H at the right end of the window: the total energy carried by the state.
  double total_energy() const { return h.back(); }
};

/// Time derivative of a state.
struct Tangent {
  std::vector<double> d_zeta;
  std::vector<double> d_u;
  std::vector<double> d_h;
};

/// Hyperelastic-rod coefficients. `f2` must keep one sign on the range of U.
/// `big_g`, when given, is the closed form of G(v) = int_0^v (2 g(z) + f''(z) z^2) dz.
struct HyperelasticCoeffs {
  std::function<double(double)> f1;  // f'
  std::function<double(double)> f2;  // f''
  std::function<double(double)> g;
  std::function<double(double)> big_g;

  /// f = u^2/2, g = kappa u + u^2.
  static HyperelasticCoeffs camassa_holm(double kappa = 0.0);
  /// f = gamma u^2/2, g = (3 - gamma) u^2 / 2.
  static HyperelasticCoeffs rod(double gamma);
};

/// Per-constraint outcome of a membership check.
struct MembershipReport {
  bool y_monotone = true;      // y_xi >= 0 in every cell
  bool h_monotone = true;      // H_xi >= 0 in every cell
  bool positive_sum = true;    // y_xi + H_xi > 0 in every cell
  bool h_starts_at_zero = true;
  bool compatibility = true;   // |y_xi H_xi - y_xi^2 U^2 - U_xi^2| <= tol
  double tol = 0.0;
  double min_y_xi = 0.0;
  double min_h_xi = 0.0;
  double min_sum = 0.0;
  double h_left = 0.0;
  double max_residual = 0.0;
  std::size_t worst_cell = 0;

  bool ok() const { return y_monotone && h_monotone && positive_sum && h_starts_at_zero && compatibility; }
  std::string summary() const;
};

/// Nonlocal terms evaluated on the grid.
struct PQ {
  std::vector<double> p;
  std::vector<double> q;
};

/// Discrete E-norm: ||zeta||_V + ||U||_{H^1} + ||H||_V, with the sup taken
/// over nodes and L^2 pieces by trapezoid (values) or exactly on the
/// piecewise-constant forward differences (derivatives).
double e_norm(const LagrangianState& x);
/// E-norm of the componentwise difference xa - xb (same grid required).
double e_distance(const LagrangianState& xa, const LagrangianState& xb);
double e_norm(std::span<const double> zeta, std::span<const double> u, std::span<const double> h, double spacing);

/// Cellwise residual of y_xi H_xi - y_xi^2 U^2 - U_xi^2 using forward
/// differences and the cell-midpoint average of U.
std::vector<double> compatibility_residual(const LagrangianState& x);
double max_compatibility_residual(const LagrangianState& x);
/// Default membership tolerance 10 h (1 + ||X||).
double default_membership_tol(const LagrangianState& x);
MembershipReport check_membership(const LagrangianState& x, std::optional<double> tol = std::nullopt);

/// Cell masses m_k of the integrand U^2 y_xi + H_xi on [xi_k, xi_{k+1}]:
/// trapezoid average of U^2 times the forward differences (n - 1 entries).
std::vector<double> ch_source_weights(const LagrangianState& x);

/// Linear-time exponential convolution of cell masses. Each cell's kernel is
/// the trapezoid average over its two end nodes, and a node's own cells count
/// with the one-sided sign:
///   left_i  = sum_{k < i}  m_k (e^{-(pos_i - pos_k)} + e^{-(pos_i - pos_{k+1})}) / 2,
///   right_i = sum_{k >= i} m_k (e^{-(pos_k - pos_i)} + e^{-(pos_{k+1} - pos_i)}) / 2.
/// The kernel is ordered by label, so it equals exp(-|pos_i - pos|) whenever
/// pos is nondecreasing; ties contribute e^0 = 1.
struct ExpSweeps {
  std::vector<double> left;
  std::vector<double> right;
};
ExpSweeps exp_sweeps(std::span<const double> pos, std::span<const double> mass);

/// P = (left + right) / 4 and Q = -(left - right) / 4 for the Camassa-Holm
/// system. Throws if y is decreasing anywhere.
PQ eval_pq(const LagrangianState& x);
std::vector<double> eval_p(const LagrangianState& x);
std::vector<double> eval_q(const LagrangianState& x);

/// Right-hand side zeta_t = U, U_t = -Q, H_t = U^3 - 2 P U.
Tangent rhs(const LagrangianState& x);
/// Right-hand side of the generalized hyperelastic-rod system.
Tangent rhs_hyperelastic(const LagrangianState& x, const HyperelasticCoeffs& c);

namespace detail {
// Unchecked variants used inside Runge-Kutta stages, where intermediate
// states are not required to be admissible.
PQ eval_pq_unchecked(const LagrangianState& x);
Tangent rhs_unchecked(const LagrangianState& x);
Tangent rhs_hyperelastic_unchecked(const LagrangianState& x, const HyperelasticCoeffs& c);
}  // namespace detail

/// G(v) = int_0^v (2 g(z) + f''(z) z^2) dz by 16-point Gauss-Legendre.
double hyperelastic_big_g(const HyperelasticCoeffs& c, double v);

}  // namespace chollag
