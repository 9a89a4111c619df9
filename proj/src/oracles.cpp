#include "chollag/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chollag/error.hpp"

namespace chollag {

void PeakonConfig::validate() const {
  if (p.size() != q.size()) fail("peakon config: amplitudes and positions differ in length");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!std::isfinite(p[i]) || !std::isfinite(q[i])) fail("peakon config: non-finite entry");
    if (i > 0 && !(q[i] > q[i - 1])) fail("peakon config: positions must be strictly increasing");
  }
}

double PeakonConfig::u(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::exp(-std::abs(x - q[i]));
  return s;
}

double PeakonConfig::u_x(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (x >= q[i] ? -1.0 : 1.0) * p[i] * std::exp(-std::abs(x - q[i]));
  return s;
}

double PeakonConfig::energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) e += 2.0 * p[i] * p[j] * std::exp(-std::abs(q[i] - q[j]));
  }
  return e;
}

double PeakonConfig::cumulative_energy(double x) const {
  // Between crests u = a + b with a = sum_{q > s} p e^{s - q}, b = sum_{q < s} p e^{q - s};
  // u^2 + u_x^2 = 2 a^2 + 2 b^2, so int 2 a^2 = a^2 and int 2 b^2 = -b^2.
  auto parts = [&](double s, double inside, double& a, double& b) {
    a = b = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (q[k] > inside) {
        a += p[k] * std::exp(s - q[k]);
      } else {
        b += p[k] * std::exp(q[k] - s);
      }
    }
  };
  double e = 0.0;
  double left = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= q.size(); ++k) {
    const double right = k < q.size() ? std::min(q[k], x) : x;
    if (right > left) {
      const double inside = std::isfinite(left) ? 0.5 * (left + right) : right - 1.0;
      double a1, b1, a0 = 0.0, b0 = 0.0;
      parts(right, inside, a1, b1);
      if (std::isfinite(left)) parts(left, inside, a0, b0);
      e += (a1 * a1 - a0 * a0) + (b0 * b0 - b1 * b1);
    }
    if (k == q.size() || q[k] >= x) break;
    left = q[k];
  }
  return e;
}

std::vector<double> peakon_x_grid(const PeakonConfig& cfg, double lo, double hi, std::size_t n) {
  cfg.validate();
  const Grid g(lo, hi, n);
  const double tol = 0.1 * g.spacing();
  std::vector<double> x;
  x.reserve(n + cfg.q.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double v = g.node(i);
    const bool near_crest = std::any_of(cfg.q.begin(), cfg.q.end(), [&](double q) { return std::abs(v - q) < tol; });
    if (!near_crest || i == 0 || i + 1 == n) x.push_back(v);
  }
  for (double q : cfg.q) {
    if (q > lo + tol && q < hi - tol) x.push_back(q);
  }
  std::sort(x.begin(), x.end());
  return x;
}

EulerianPair multipeakon_pair(const PeakonConfig& cfg, double lo, double hi, std::size_t n) {
  const auto x = peakon_x_grid(cfg, lo, hi, n);
  return multipeakon_pair(cfg, x);
}

EulerianPair multipeakon_pair(const PeakonConfig& cfg, std::span<const double> x) {
  cfg.validate();
  const std::size_t n = x.size();
  std::vector<double> u(n), density(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) u[i] = cfg.u(x[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double x0 = x[i], x1 = x[i + 1], mid = 0.5 * (x0 + x1);
    // On a crest-free cell u = a + b with a = sum_right p e^{x-q}, b = sum_left p e^{q-x};
    // u^2 + u_x^2 = 2a^2 + 2b^2 and int 2a^2 = a^2 |_{x0}^{x1}.
    double mass = 0.0;
    for (std::size_t k = 0; k < cfg.p.size(); ++k) {
      for (std::size_t l = 0; l < cfg.p.size(); ++l) {
        const bool kr = cfg.q[k] > mid, lr = cfg.q[l] > mid;
        if (kr != lr) continue;
        const double pp = cfg.p[k] * cfg.p[l];
        if (kr) {
          // 2 e^{2x - qk - ql}: integral e^{-qk-ql} (e^{2 x1} - e^{2 x0})
          mass += pp * std::exp(2.0 * x1 - cfg.q[k] - cfg.q[l]) * -std::expm1(-2.0 * (x1 - x0));
        } else {
          mass += pp * std::exp(cfg.q[k] + cfg.q[l] - 2.0 * x0) * -std::expm1(-2.0 * (x1 - x0));
        }
      }
    }
    density[i] = std::max(0.0, mass / (x1 - x0));
  }
  return EulerianPair(std::vector<double>(x.begin(), x.end()), std::move(u), EnergyMeasure{std::move(density), {}});
}

Grid peakon_grid(const PeakonConfig& cfg, double lo, double hi, std::size_t n) {
  cfg.validate();
  std::vector<double> anchors;
  if (!cfg.q.empty()) {
    anchors.push_back(cfg.q.front() + cfg.cumulative_energy(cfg.q.front()));
    if (cfg.q.size() > 1) anchors.push_back(cfg.q.back() + cfg.cumulative_energy(cfg.q.back()));
  }
  const double label_hi = hi + cfg.cumulative_energy(hi);
  return anchors.empty() ? Grid(lo, label_hi, n) : aligned_grid(lo, label_hi, n, anchors);
}

LagrangianState peakon_state(const PeakonConfig& cfg, double lo, double hi, std::size_t n) {
  return peakon_state(cfg, lo, hi, peakon_grid(cfg, lo, hi, n));
}

LagrangianState peakon_state(const PeakonConfig& cfg, double lo, double hi, const Grid& g) {
  cfg.validate();
  if (!(lo < hi)) fail("peakon window must have lo < hi");
  const double label_hi = hi + cfg.cumulative_energy(hi);
  LagrangianState x(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.node(i);
    double y;
    if (xi >= label_hi) {
      y = hi + (xi - label_hi);
    } else {
      // xi -> y is the inverse of the increasing map y + E(y); bisection.
      double a = xi - (label_hi - hi) - 1.0, b = std::min(xi, hi);
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        (m + cfg.cumulative_energy(m) < xi ? a : b) = m;
      }
      y = 0.5 * (a + b);
      for (double q : cfg.q) {
        if (std::abs(q + cfg.cumulative_energy(q) - xi) <= 1e-9 * g.spacing()) y = q;
      }
    }
    x.zeta[i] = y - xi;
    x.h[i] = xi - y;
    x.u[i] = (y >= lo && y <= hi) ? cfg.u(y) : 0.0;
  }
  return x;
}

EulerianPair random_smooth_pair(std::mt19937_64& rng, const RandomPairOptions& opt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = std::max(1, opt.bumps);
  std::vector<double> a(m), c(m), w(m);
  const double span = opt.hi - opt.lo;
  for (int k = 0; k < m; ++k) {
    a[k] = opt.amplitude * (2.0 * unit(rng) - 1.0);
    c[k] = opt.lo + span * (0.3 + 0.4 * unit(rng));
    w[k] = 0.5 + 1.5 * unit(rng);
  }
  auto u = [&](double x) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += a[k] * std::exp(-0.5 * (x - c[k]) * (x - c[k]) / (w[k] * w[k]));
    return s;
  };
  auto ux = [&](double x) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      const double d = x - c[k];
      s += -a[k] * d / (w[k] * w[k]) * std::exp(-0.5 * d * d / (w[k] * w[k]));
    }
    return s;
  };
  static constexpr double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static constexpr double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                   0.2369268850561891};
  const Grid g(opt.lo, opt.hi, opt.n);
  std::vector<double> x = g.nodes(), uu(opt.n), dens(opt.n, 0.0);
  for (std::size_t i = 0; i < opt.n; ++i) uu[i] = u(x[i]);
  for (std::size_t i = 0; i + 1 < opt.n; ++i) {
    const double mid = 0.5 * (x[i] + x[i + 1]), half = 0.5 * (x[i + 1] - x[i]);
    double s = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double xx = mid + half * gx[q];
      s += gw[q] * (u(xx) * u(xx) + ux(xx) * ux(xx));
    }
    dens[i] = 0.5 * s;
  }
  EnergyMeasure mu{std::move(dens), {}};
  if (opt.max_atoms > 0) {
    std::uniform_int_distribution<int> count(0, opt.max_atoms);
    const int na = count(rng);
    std::uniform_int_distribution<std::size_t> node(opt.n / 4, 3 * opt.n / 4);
    for (int k = 0; k < na; ++k) {
      const double xa = x[node(rng)];
      bool dup = false;
      for (const Atom& at : mu.atoms) dup = dup || at.x == xa;
      if (!dup) mu.atoms.push_back({xa, 0.1 + (opt.atom_mass - 0.1) * unit(rng)});
    }
  }
  return EulerianPair(std::move(x), std::move(uu), std::move(mu));
}

Relabeling random_relabeling(std::mt19937_64& rng, const Grid& g, double kappa) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span = g.xi_max() - g.xi_min();
  const double c = g.xi_min() + span * (0.3 + 0.4 * unit(rng));
  const double w = span * (0.05 + 0.15 * unit(rng));
  // max |b'| on (-1, 1) is about 0.80; keep A |b'| / w within the slope window
  // and |A| b(0) = |A| / e within kappa.
  const double slope_room = std::min(kappa, 1.0 - 1.0 / (1.0 + kappa));
  const double amp_max = std::min(0.9 * slope_room * w / 0.80, 0.9 * kappa * std::exp(1.0));
  const double amp = amp_max * (2.0 * unit(rng) - 1.0);
  std::vector<double> off(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = (g.node(i) - c) / w;
    off[i] = std::abs(s) < 1.0 ? amp * std::exp(1.0 / (s * s - 1.0)) : 0.0;
  }
  return Relabeling::from_offsets(g, std::move(off));
}

CollisionScenario collision_scenario() {
  CollisionScenario s;
  s.peakons.p = {1.0, -1.0};
  s.peakons.q = {-5.0, 5.0};
  s.expected.atom_x = 0.0;
  s.expected.atom_mass = s.peakons.energy();
  s.expected.u_linf_at_collision = 0.0;
  return s;
}

namespace {

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 / (s * s - 1.0));
}

double bump_d(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double d = s * s - 1.0;
  return bump(s) * (-2.0 * s / (d * d));
}

}  // namespace

double BumpTestFunction::phi(double t, double x) const { return bump(t / tau) * bump((x - x_center) / x_half); }
double BumpTestFunction::phi_t(double t, double x) const {
  return bump_d(t / tau) / tau * bump((x - x_center) / x_half);
}
double BumpTestFunction::phi_x(double t, double x) const {
  return bump(t / tau) * bump_d((x - x_center) / x_half) / x_half;
}

EulerianP eulerian_p(const EulerianPair& s) {
  const std::size_t n = s.size();
  // Point sources: cell masses of u^2 + mu_ac at midpoints, and atoms.
  std::vector<std::pair<double, double>> src;
  src.reserve(n + s.mu.atoms.size());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = s.u[i], b = s.u[i + 1], dx = s.x[i + 1] - s.x[i];
    const double m = dx * ((a * a + a * b + b * b) / 3.0 + s.mu.density[i]);
    src.emplace_back(0.5 * (s.x[i] + s.x[i + 1]), m);
  }
  for (const Atom& at : s.mu.atoms) src.emplace_back(at.x, at.mass);
  std::sort(src.begin(), src.end());

  EulerianP out{std::vector<double>(n), std::vector<double>(n)};
  // left_i = sum_{c < x_i} m e^{-(x_i - c)}, right_i = sum_{c > x_i} m e^{-(c - x_i)}.
  std::vector<double> left(n), right(n), here(n, 0.0);
  {
    double acc = 0.0, pos = -std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (k < src.size() && src[k].first < s.x[i]) {
        acc = (std::isfinite(pos) ? acc * std::exp(-(src[k].first - pos)) : 0.0) + src[k].second;
        pos = src[k].first;
        ++k;
      }
      left[i] = std::isfinite(pos) ? acc * std::exp(-(s.x[i] - pos)) : 0.0;
      while (k < src.size() && src[k].first == s.x[i]) {
        here[i] += src[k].second;
        acc = (std::isfinite(pos) ? acc * std::exp(-(src[k].first - pos)) : 0.0) + src[k].second;
        pos = src[k].first;
        ++k;
      }
    }
  }
  {
    double acc = 0.0, pos = std::numeric_limits<double>::infinity();
    std::size_t k = src.size();
    for (std::size_t ii = n; ii-- > 0;) {
      while (k > 0 && src[k - 1].first > s.x[ii]) {
        --k;
        acc = (std::isfinite(pos) ? acc * std::exp(-(pos - src[k].first)) : 0.0) + src[k].second;
        pos = src[k].first;
      }
      right[ii] = std::isfinite(pos) ? acc * std::exp(-(pos - s.x[ii])) : 0.0;
      while (k > 0 && src[k - 1].first == s.x[ii]) {
        --k;
        acc = (std::isfinite(pos) ? acc * std::exp(-(pos - src[k].first)) : 0.0) + src[k].second;
        pos = src[k].first;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.p[i] = 0.25 * (left[i] + right[i] + here[i]);
    out.p_x[i] = 0.25 * (right[i] - left[i]);
  }
  return out;
}

WeakResidualAccumulator::WeakResidualAccumulator(BumpTestFunction tf) : tf_(tf) {
  if (!(tf_.tau > 0.0) || !(tf_.x_half > 0.0)) fail("test function widths must be positive");
}

void WeakResidualAccumulator::add(double t, const EulerianPair& s) {
  if (!started_ && t != 0.0) fail("weak residual: first snapshot must be at t = 0");
  if (started_ && !(t > t_prev_)) fail("weak residual: snapshot times must increase");
  if (t < tf_.tau && (tf_.x_center - tf_.x_half < s.x.front() || tf_.x_center + tf_.x_half > s.x.back())) {
    fail("weak residual: test function support exceeds the snapshot window");
  }
  const EulerianP pp = eulerian_p(s);
  // Two-point Gauss in x on each cell; u, P, P_x linear, u_x constant per cell.
  static const double g = 0.5 / std::sqrt(3.0);
  double i1 = 0.0, i2 = 0.0, init = 0.0;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double x0 = s.x[k], x1 = s.x[k + 1], dx = x1 - x0;
    if (x1 <= tf_.x_center - tf_.x_half || x0 >= tf_.x_center + tf_.x_half) continue;
    const double ux = (s.u[k + 1] - s.u[k]) / dx;
    // mu_ac carries u^2 + u_x^2; the weak form uses u_x^2 from the snapshot.
    for (double th : {0.5 - g, 0.5 + g}) {
      const double x = x0 + th * dx;
      const double u = s.u[k] + th * (s.u[k + 1] - s.u[k]);
      const double p = pp.p[k] + th * (pp.p[k + 1] - pp.p[k]);
      const double px = pp.p_x[k] + th * (pp.p_x[k + 1] - pp.p_x[k]);
      const double w = 0.5 * dx;
      i1 += w * (-u * tf_.phi_t(t, x) + (u * ux + px) * tf_.phi(t, x));
      i2 += w * ((p - u * u - 0.5 * ux * ux) * tf_.phi(t, x) + px * tf_.phi_x(t, x));
      if (!started_) init += w * u * tf_.phi(0.0, x);
    }
  }
  if (!started_) {
    initial_ = init;
    started_ = true;
  } else {
    const double dt = t - t_prev_;
    r1_ += 0.5 * dt * (i1_prev_ + i1);
    r2_ += 0.5 * dt * (i2_prev_ + i2);
  }
  t_prev_ = t;
  i1_prev_ = i1;
  i2_prev_ = i2;
}

WeakResidual WeakResidualAccumulator::result() const {
  if (!started_) fail("weak residual: no snapshots");
  if (t_prev_ < tf_.tau) fail("weak residual: test function support extends past the last snapshot");
  return {r1_ - initial_, r2_};
}

WeakResidual weak_residual(const std::vector<std::pair<double, EulerianPair>>& snapshots, const BumpTestFunction& tf) {
  WeakResidualAccumulator acc(tf);
  for (const auto& [t, s] : snapshots) acc.add(t, s);
  return acc.result();
}

WeakResidual weak_residual_of_run(const LagrangianState& x0, double dt, double t_end, const BumpTestFunction& tf) {
  WeakResidualAccumulator acc(tf);
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.monitor_every = std::numeric_limits<int>::max();
  evolve(x0, cfg, {}, [&](double t, const LagrangianState& s) { acc.add(t, to_eulerian(s)); });
  return acc.result();
}

}  // namespace chollag
