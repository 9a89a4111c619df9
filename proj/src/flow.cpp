#include "chollag/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chollag/error.hpp"

namespace chollag {

Relabeling::Relabeling(Grid g, std::vector<double> values) : grid_(g), offset_(g.size()) {
  if (values.size() != g.size()) fail("relabeling samples must match the grid size");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) fail("relabeling samples must be finite");
    if (i > 0 && !(values[i] > values[i - 1])) {
      std::ostringstream os;
      os << "relabeling is not strictly increasing at node " << i;
      fail(os.str());
    }
    offset_[i] = values[i] - g.node(i);
  }
}

Relabeling Relabeling::identity(Grid g) { return from_offsets(g, std::vector<double>(g.size(), 0.0)); }

Relabeling Relabeling::from_offsets(Grid g, std::vector<double> offsets) {
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) values[i] = g.node(i) + offsets.at(i);
  Relabeling f(g, std::move(values));
  f.offset_ = std::move(offsets);
  return f;
}

std::vector<double> Relabeling::values() const {
  std::vector<double> v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = value(i);
  return v;
}

double Relabeling::operator()(double s) const {
  return s + interp(grid_, offset_, s, offset_.front(), offset_.back());
}

double kappa_of(const Relabeling& f) {
  const double sp = f.grid().spacing();
  double kappa = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const double slope = (f.value(k + 1) - f.value(k)) / sp;
    if (!(slope > 0.0)) fail("kappa_of: relabeling has a non-increasing cell");
    kappa = std::max({kappa, slope - 1.0, 1.0 / slope - 1.0});
  }
  for (double d : f.offsets()) kappa = std::max(kappa, std::abs(d));
  return kappa;
}

Relabeling compose(const Relabeling& f, const Relabeling& g) {
  std::vector<double> offsets(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double gi = g.value(i);
    offsets[i] = f(gi) - g.grid().node(i);
  }
  return Relabeling::from_offsets(g.grid(), std::move(offsets));
}

Relabeling invert(const Relabeling& f) {
  const Grid& g = f.grid();
  const std::size_t n = g.size();
  const auto vals = f.values();
  std::vector<double> offsets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double target = g.node(i);
    double s;
    if (target <= vals.front()) {
      s = target - f.offsets().front();
      if (target == vals.front()) s = g.node(0);
    } else if (target >= vals.back()) {
      s = target - f.offsets().back();
      if (target == vals.back()) s = g.node(n - 1);
    } else {
      const auto it = std::upper_bound(vals.begin(), vals.end(), target);
      const auto j = static_cast<std::size_t>(it - vals.begin()) - 1;
      if (vals[j] == target) {
        s = g.node(j);
      } else {
        const double t = (target - vals[j]) / (vals[j + 1] - vals[j]);
        s = g.node(j) + t * (g.node(j + 1) - g.node(j));
      }
    }
    offsets[i] = s - target;
  }
  return Relabeling::from_offsets(g, std::move(offsets));
}

RelabelResult relabel_checked(const LagrangianState& x, const Relabeling& f) {
  if (!(x.grid == f.grid())) fail("relabel: grid mismatch");
  const Grid& g = x.grid;
  RelabelResult r{LagrangianState(g), false};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = f.value(i);
    if (s < g.xi_min() || s > g.xi_max()) r.clamped = true;
    r.state.zeta[i] = interp(g, x.zeta, s, x.zeta.front(), x.zeta.back()) + f.offsets()[i];
    r.state.u[i] = interp(g, x.u, s, 0.0, 0.0);
    r.state.h[i] = interp(g, x.h, s, x.h.front(), x.h.back());
  }
  return r;
}

LagrangianState relabel(const LagrangianState& x, const Relabeling& f) { return relabel_checked(x, f).state; }

Relabeling energy_label(const LagrangianState& x) {
  std::vector<double> offsets(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) offsets[i] = x.zeta[i] + x.h[i];
  return Relabeling::from_offsets(x.grid, std::move(offsets));
}

LagrangianState project_pi(const LagrangianState& x) { return relabel(x, invert(energy_label(x))); }

Tangent Dynamics::operator()(const LagrangianState& x) const {
  return rod ? detail::rhs_hyperelastic_unchecked(x, *rod) : detail::rhs_unchecked(x);
}

double dt_max(const LagrangianState& x) {
  double m = 0.0;
  for (double v : x.u) m = std::max(m, std::abs(v));
  return 0.5 / std::max(1.0, m);
}

namespace {

LagrangianState advance(const LagrangianState& x, const Tangent& k, double a) {
  LagrangianState out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.zeta[i] += a * k.d_zeta[i];
    out.u[i] += a * k.d_u[i];
    out.h[i] += a * k.d_h[i];
  }
  return out;
}

}  // namespace

StepResult try_step(const LagrangianState& x, double dt, const Dynamics& dyn) {
  const Tangent k1 = dyn(x);
  const Tangent k2 = dyn(advance(x, k1, 0.5 * dt));
  const Tangent k3 = dyn(advance(x, k2, 0.5 * dt));
  const Tangent k4 = dyn(advance(x, k3, dt));
  StepResult r{true, x, {}};
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.state.zeta[i] += c * (k1.d_zeta[i] + 2.0 * k2.d_zeta[i] + 2.0 * k3.d_zeta[i] + k4.d_zeta[i]);
    r.state.u[i] += c * (k1.d_u[i] + 2.0 * k2.d_u[i] + 2.0 * k3.d_u[i] + k4.d_u[i]);
    r.state.h[i] += c * (k1.d_h[i] + 2.0 * k2.d_h[i] + 2.0 * k3.d_h[i] + k4.d_h[i]);
  }
  const double sp = x.grid.spacing();
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double dy = r.state.y(k + 1) - r.state.y(k);
    const double dh = r.state.h[k + 1] - r.state.h[k];
    if (!std::isfinite(dy) || !std::isfinite(dh) || !std::isfinite(r.state.u[k])) {
      r.accepted = false;
      r.reason = "non-finite values";
      return r;
    }
    if ((dy + dh) / sp <= 0.0) {
      std::ostringstream os;
      os << "constraint collapse y_xi + H_xi <= 0 at cell " << k;
      r.accepted = false;
      r.reason = os.str();
      return r;
    }
  }
  return r;
}

LagrangianState step(const LagrangianState& x, double dt, const Dynamics& dyn) {
  if (!(dt > 0.0)) fail("step: dt must be positive");
  const double floor = dt / 1024.0;
  double remaining = dt;
  LagrangianState cur = x;
  double sub = dt;
  while (remaining > 0.0) {
    sub = std::min(sub, remaining);
    StepResult r = try_step(cur, sub, dyn);
    if (!r.accepted) {
      sub *= 0.5;
      if (sub < floor) throw Error(ErrorCode::solver, "step rejected below dt_min: " + r.reason);
      continue;
    }
    cur = std::move(r.state);
    remaining = (remaining - sub <= 1e-12 * dt) ? 0.0 : remaining - sub;
  }
  return cur;
}

double Trajectory::relative_energy_drift() const {
  if (energy.empty()) return 0.0;
  const double e0 = energy.front();
  double drift = 0.0;
  for (double e : energy) drift = std::max(drift, std::abs(e - e0));
  return e0 != 0.0 ? drift / std::abs(e0) : drift;
}

Trajectory evolve(const LagrangianState& x0, const SolverConfig& cfg, const Dynamics& dyn, const StepObserver& observer) {
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::config, "solver dt must be positive");
  if (!(cfg.t_end >= 0.0)) throw Error(ErrorCode::config, "solver t_end must be nonnegative");
  const MembershipReport rep = check_membership(x0);
  if (!rep.positive_sum || !rep.h_monotone || !rep.y_monotone) {
    throw Error(ErrorCode::invalid_argument, "initial state violates the positivity constraints: " + rep.summary());
  }
  const double dt_floor = cfg.dt_min > 0.0 ? cfg.dt_min : cfg.dt / 1024.0;
  const int monitor = std::max(1, cfg.monitor_every);

  Trajectory tr;
  LagrangianState cur = x0;
  double t = 0.0;
  auto record = [&](double time, const LagrangianState& s) {
    tr.times.push_back(time);
    tr.energy.push_back(s.total_energy());
    tr.max_residual.push_back(max_compatibility_residual(s));
    if (observer) observer(time, s);
  };
  tr.snapshots.push_back({0.0, cur});
  record(0.0, cur);

  long accepted = 0;
  double dt = cfg.dt;
  while (t < cfg.t_end) {
    const double remaining = cfg.t_end - t;
    double h = std::min({dt, dt_max(cur), remaining});
    StepResult r = try_step(cur, h, dyn);
    if (!r.accepted) {
      ++tr.rejected_steps;
      dt = 0.5 * h;
      if (dt < dt_floor) {
        std::ostringstream os;
        os << "solver abort at t=" << t << ": " << r.reason << " persists below dt_min=" << dt_floor;
        throw Error(ErrorCode::solver, os.str());
      }
      continue;
    }
    cur = std::move(r.state);
    t = (remaining - h <= 1e-9 * cfg.dt) ? cfg.t_end : t + h;
    dt = cfg.dt;
    ++accepted;
    record(t, cur);
    if (accepted % monitor == 0 || t >= cfg.t_end) tr.snapshots.push_back({t, cur});
  }
  return tr;
}

LagrangianState sbar_t(const LagrangianState& x0, const SolverConfig& cfg, const Dynamics& dyn) {
  SolverConfig c = cfg;
  c.monitor_every = std::numeric_limits<int>::max();
  return project_pi(evolve(x0, c, dyn).final_state());
}

}  // namespace chollag
