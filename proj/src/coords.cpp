#include "chollag/coords.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "chollag/error.hpp"

namespace chollag {

double EnergyMeasure::ac_mass(std::span<const double> x) const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) m += density[i] * (x[i + 1] - x[i]);
  return m;
}

double EnergyMeasure::atom_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.mass;
  return m;
}

EulerianPair::EulerianPair(std::vector<double> xx, std::vector<double> uu, EnergyMeasure m)
    : x(std::move(xx)), u(std::move(uu)), mu(std::move(m)) {
  std::sort(mu.atoms.begin(), mu.atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  validate();
}

void EulerianPair::validate() const {
  const std::size_t n = x.size();
  if (n < 2) fail("Eulerian pair needs at least two x nodes");
  if (u.size() != n || mu.density.size() != n) fail("Eulerian pair: x, u and density must have equal lengths");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(u[i]) || !std::isfinite(mu.density[i])) fail("Eulerian pair: non-finite sample");
    if (i > 0 && !(x[i] > x[i - 1])) fail("Eulerian pair: x must be strictly increasing");
    if (mu.density[i] < 0.0) fail("Eulerian pair: negative density");
  }
  for (std::size_t k = 0; k < mu.atoms.size(); ++k) {
    const Atom& a = mu.atoms[k];
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) fail("Eulerian pair: atom masses must be positive");
    if (a.x < x.front() || a.x > x.back()) fail("Eulerian pair: atom outside the x range");
    if (k > 0 && !(a.x > mu.atoms[k - 1].x)) fail("Eulerian pair: atom locations must be distinct");
  }
}

double energy(const EulerianPair& p) { return p.mu.ac_mass(p.x) + p.mu.atom_mass(); }

double density_deficit(const EulerianPair& p) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double a = p.u[i], b = p.u[i + 1];
    const double ux = (b - a) / (p.x[i + 1] - p.x[i]);
    const double estimate = (a * a + a * b + b * b) / 3.0 + ux * ux;
    worst = std::max(worst, estimate - p.mu.density[i]);
  }
  return worst;
}

double lagrangian_label(const EulerianPair& p, double x) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < p.size() && p.x[i] < x; ++i) {
    m += p.mu.density[i] * (std::min(x, p.x[i + 1]) - p.x[i]);
  }
  for (const Atom& a : p.mu.atoms) {
    if (a.x < x) m += a.mass;
  }
  return x + m;
}

Grid default_lagrangian_grid(const EulerianPair& p, std::size_t n) {
  return Grid(p.x.front(), p.x.back() + energy(p), n);
}

namespace {

// Knots of the piecewise-linear map xi -> y(xi), strictly increasing in xi.
struct Knots {
  std::vector<double> xi;
  std::vector<double> y;
  void push(double a, double b) {
    xi.push_back(a);
    y.push_back(b);
  }
};

Knots label_knots(const EulerianPair& p) {
  Knots k;
  double xi = p.x.front();
  double cur = p.x.front();
  k.push(xi, cur);
  std::size_t ai = 0;
  const auto& atoms = p.mu.atoms;
  auto take_atom = [&]() {
    xi += atoms[ai].mass;
    k.push(xi, cur);
    ++ai;
  };
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double d = p.mu.density[i];
    while (ai < atoms.size() && atoms[ai].x < p.x[i + 1]) {
      if (atoms[ai].x > cur) {
        xi += (1.0 + d) * (atoms[ai].x - cur);
        cur = atoms[ai].x;
        k.push(xi, cur);
      }
      take_atom();
    }
    xi += (1.0 + d) * (p.x[i + 1] - cur);
    cur = p.x[i + 1];
    k.push(xi, cur);
  }
  while (ai < atoms.size()) take_atom();
  return k;
}

}  // namespace

LagrangianState to_lagrangian(const EulerianPair& p, const Grid& g) {
  p.validate();
  const Knots k = label_knots(p);
  LagrangianState out(g);
  const std::size_t nk = k.xi.size();
  std::size_t j = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.node(i);
    double y;
    if (xi <= k.xi.front()) {
      y = xi - k.xi.front() + k.y.front();
    } else if (xi >= k.xi.back()) {
      y = k.y.back() + (xi - k.xi.back());
    } else {
      while (j + 1 < nk && k.xi[j + 1] < xi) ++j;
      const double t = (xi - k.xi[j]) / (k.xi[j + 1] - k.xi[j]);
      y = k.y[j] + t * (k.y[j + 1] - k.y[j]);
      // flat (atom) segments keep y exactly
      if (k.y[j + 1] == k.y[j]) y = k.y[j];
    }
    out.zeta[i] = y - xi;
    out.h[i] = -out.zeta[i];
    out.u[i] = interp_sorted(p.x, p.u, y, 0.0, 0.0);
  }
  return out;
}

LagrangianState to_lagrangian(const EulerianPair& p, std::size_t n) { return to_lagrangian(p, default_lagrangian_grid(p, n)); }

EulerianPair to_eulerian(const LagrangianState& x, const EulerianOptions& opt) {
  const std::size_t n = x.size();
  const double sp = x.grid.spacing();
  const double threshold = opt.singular_threshold.value_or(std::sqrt(sp));
  const auto y = x.y_values();

  std::vector<double> ox, ou, od;
  std::vector<Atom> atoms;
  ox.reserve(n);
  ou.reserve(n);
  od.reserve(n);
  ox.push_back(y[0]);
  ou.push_back(x.u[0]);
  od.push_back(0.0);

  double run_mass = 0.0;
  double run_ysum = 0.0;
  std::size_t run_nodes = 0;
  auto close_run = [&]() {
    if (run_nodes == 0) return;
    const double loc = run_ysum / static_cast<double>(run_nodes);
    if (run_mass > 0.0) atoms.push_back({std::clamp(loc, ox.front(), ox.back()), run_mass});
    run_mass = run_ysum = 0.0;
    run_nodes = 0;
  };

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dy = y[k + 1] - y[k];
    const double dh = x.h[k + 1] - x.h[k];
    const bool singular = dy / sp < threshold;
    if (singular) {
      if (run_nodes == 0) {
        run_ysum = y[k];
        run_nodes = 1;
      }
      run_ysum += y[k + 1];
      ++run_nodes;
      run_mass += dh;
    } else {
      close_run();
    }
    if (y[k + 1] > ox.back()) {
      // H_xi can round a few ulps below zero where u = u_x = 0
      od.back() = singular ? 0.0 : std::max(0.0, dh / (y[k + 1] - ox.back()));
      ox.push_back(y[k + 1]);
      ou.push_back(x.u[k + 1]);
      od.push_back(0.0);
    } else if (!singular) {
      // unreachable: non-singular cells have dy > 0
      throw Error(ErrorCode::invalid_argument, "to_eulerian: non-monotone y outside a singular run");
    }
  }
  close_run();

  EulerianPair out;
  out.x = std::move(ox);
  out.u = std::move(ou);
  out.mu.density = std::move(od);
  // Merge atoms that landed on the same point.
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().x >= a.x) {
      merged.back().mass += a.mass;
    } else {
      merged.push_back(a);
    }
  }
  out.mu.atoms = std::move(merged);
  return out;
}

EulerianPair t_t(const EulerianPair& p, const Grid& g, const SolverConfig& cfg, const Dynamics& dyn) {
  return to_eulerian(sbar_t(to_lagrangian(p, g), cfg, dyn));
}

std::vector<double> resample_u(const EulerianPair& p, std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = interp_sorted(p.x, p.u, x[i], 0.0, 0.0);
  return out;
}

}  // namespace chollag
