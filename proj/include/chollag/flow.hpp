#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "chollag/lagrangian.hpp"

namespace chollag {

/// Monotone relabeling sampled on a grid. Stored as offsets f - id so that
/// the identity is represented exactly; outside the window f is extended by
/// the end offsets (a pure shift).
class Relabeling {
 public:
  Relabeling() = default;
  /// From sampled values f(xi_i). Throws unless strictly increasing.
  Relabeling(Grid g, std::vector<double> values);
  static Relabeling identity(Grid g);
  static Relabeling from_offsets(Grid g, std::vector<double> offsets);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  double value(std::size_t i) const { return grid_.node(i) + offset_[i]; }
  std::vector<double> values() const;
  const std::vector<double>& offsets() const { return offset_; }
  /// f(s) for arbitrary s.
  double operator()(double s) const;

 private:
  Grid grid_;
  std::vector<double> offset_;
};

/// Least kappa such that every cell slope lies in [1/(1+kappa), 1+kappa] and
/// sup |f - id| <= kappa.
double kappa_of(const Relabeling& f);

/// (f o g)(xi) = f(g(xi)) sampled on g's grid.
Relabeling compose(const Relabeling& f, const Relabeling& g);
/// Piecewise-linear inverse sampled on the same grid.
Relabeling invert(const Relabeling& f);

struct RelabelResult {
  LagrangianState state;
  bool clamped = false;  // some f(xi_i) fell outside the window
};

/// X o f: each component evaluated at f(xi_i); zeta picks up f - id.
RelabelResult relabel_checked(const LagrangianState& x, const Relabeling& f);
LagrangianState relabel(const LagrangianState& x, const Relabeling& f);

/// Pi(X) = X o (y + H)^{-1}. Throws if y + H is not strictly increasing.
LagrangianState project_pi(const LagrangianState& x);
/// The relabeling y + H of a state.
Relabeling energy_label(const LagrangianState& x);

/// Equation selector: Camassa-Holm or the generalized hyperelastic rod.
struct Dynamics {
  std::optional<HyperelasticCoeffs> rod;
  Tangent operator()(const LagrangianState& x) const;
};

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  int monitor_every = 100;  // steps between stored snapshots
  double dt_min = 0.0;      // 0: dt / 1024
};

/// 0.5 / max(1, ||U||_inf).
double dt_max(const LagrangianState& x);

struct StepResult {
  bool accepted = false;
  LagrangianState state;
  std::string reason;
};

/// One classical RK4 step. The step is rejected (not thrown) when some cell
/// ends with y_xi + H_xi <= 0 or with non-finite values.
StepResult try_step(const LagrangianState& x, double dt, const Dynamics& dyn = {});
/// Step with halving on rejection; throws Error(solver) below dt_min.
LagrangianState step(const LagrangianState& x, double dt, const Dynamics& dyn = {});

struct Snapshot {
  double t;
  LagrangianState state;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<double> times;             // every accepted step (t = 0 included)
  std::vector<double> energy;            // H(t, xi_max) per accepted step
  std::vector<double> max_residual;      // compatibility residual per accepted step
  int rejected_steps = 0;
  double relative_energy_drift() const;
  const LagrangianState& final_state() const { return snapshots.back().state; }
};

/// Called after every accepted step (and once at t = 0).
using StepObserver = std::function<void(double t, const LagrangianState&)>;

Trajectory evolve(const LagrangianState& x0, const SolverConfig& cfg, const Dynamics& dyn = {},
                  const StepObserver& observer = {});

/// Pi applied to the endpoint of evolve.
LagrangianState sbar_t(const LagrangianState& x0, const SolverConfig& cfg, const Dynamics& dyn = {});

}  // namespace chollag
