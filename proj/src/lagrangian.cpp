#include "chollag/lagrangian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "chollag/error.hpp"

namespace chollag {

LagrangianState::LagrangianState(Grid g)
    : grid(g), zeta(g.size(), 0.0), u(g.size(), 0.0), h(g.size(), 0.0) {}

LagrangianState::LagrangianState(Grid g, std::vector<double> z, std::vector<double> uu, std::vector<double> hh)
    : grid(g), zeta(std::move(z)), u(std::move(uu)), h(std::move(hh)) {
  const std::size_t n = grid.size();
  if (zeta.size() != n || u.size() != n || h.size() != n) fail("state components must match the grid size");
}

std::vector<double> LagrangianState::y_values() const {
  std::vector<double> y(size());
  for (std::size_t i = 0; i < size(); ++i) y[i] = this->y(i);
  return y;
}

HyperelasticCoeffs HyperelasticCoeffs::camassa_holm(double kappa) {
  HyperelasticCoeffs c;
  c.f1 = [](double v) { return v; };
  c.f2 = [](double) { return 1.0; };
  c.g = [kappa](double v) { return kappa * v + v * v; };
  return c;
}

HyperelasticCoeffs HyperelasticCoeffs::rod(double gamma) {
  HyperelasticCoeffs c;
  c.f1 = [gamma](double v) { return gamma * v; };
  c.f2 = [gamma](double) { return gamma; };
  c.g = [gamma](double v) { return 0.5 * (3.0 - gamma) * v * v; };
  return c;
}

std::string MembershipReport::summary() const {
  std::ostringstream os;
  os << (ok() ? "pass" : "fail");
  if (!y_monotone) os << "; y_xi < 0 (min " << min_y_xi << ")";
  if (!h_monotone) os << "; H_xi < 0 (min " << min_h_xi << ")";
  if (!positive_sum) os << "; y_xi + H_xi <= 0 (min " << min_sum << ")";
  if (!h_starts_at_zero) os << "; H(xi_min) = " << h_left;
  if (!compatibility) os << "; compatibility residual " << max_residual << " > " << tol << " at cell " << worst_cell;
  return os.str();
}

namespace {

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ||f_xi||_{L^2}^2 for piecewise-linear f: exact on constant forward differences.
double derivative_sq(std::span<const double> v, double spacing) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double d = (v[k + 1] - v[k]) / spacing;
    s += d * d;
  }
  return s * spacing;
}

double trapezoid_sq(std::span<const double> v, double spacing) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
    s += w * v[i] * v[i];
  }
  return s * spacing;
}

// Flat stretches of y (atoms) may come out a few ulps decreasing after
// relabeling; that is harmless for the sweeps and is tolerated.
void require_monotone_y(const LagrangianState& x) {
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x.y(k)));
    if (x.y(k + 1) < x.y(k) - slack) {
      std::ostringstream os;
      os << "y is decreasing on cell " << k << "; the exponential kernel splitting requires nondecreasing y";
      throw Error(ErrorCode::invalid_argument, os.str());
    }
  }
}

}  // namespace

double e_norm(std::span<const double> zeta, std::span<const double> u, std::span<const double> h, double spacing) {
  const double zeta_v = sup_abs(zeta) + std::sqrt(derivative_sq(zeta, spacing));
  const double u_h1 = std::sqrt(trapezoid_sq(u, spacing) + derivative_sq(u, spacing));
  const double h_v = sup_abs(h) + std::sqrt(derivative_sq(h, spacing));
  return zeta_v + u_h1 + h_v;
}

double e_norm(const LagrangianState& x) { return e_norm(x.zeta, x.u, x.h, x.grid.spacing()); }

double e_distance(const LagrangianState& xa, const LagrangianState& xb) {
  if (!(xa.grid == xb.grid)) fail("e_distance: grid mismatch");
  const std::size_t n = xa.size();
  std::vector<double> dz(n), du(n), dh(n);
  for (std::size_t i = 0; i < n; ++i) {
    dz[i] = xa.zeta[i] - xb.zeta[i];
    du[i] = xa.u[i] - xb.u[i];
    dh[i] = xa.h[i] - xb.h[i];
  }
  return e_norm(dz, du, dh, xa.grid.spacing());
}

std::vector<double> compatibility_residual(const LagrangianState& x) {
  const double sp = x.grid.spacing();
  std::vector<double> r(x.size() - 1);
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double y_xi = (x.y(k + 1) - x.y(k)) / sp;
    const double h_xi = (x.h[k + 1] - x.h[k]) / sp;
    const double u_xi = (x.u[k + 1] - x.u[k]) / sp;
    const double u_mid = 0.5 * (x.u[k] + x.u[k + 1]);
    r[k] = y_xi * h_xi - y_xi * y_xi * u_mid * u_mid - u_xi * u_xi;
  }
  return r;
}

double max_compatibility_residual(const LagrangianState& x) {
  const auto r = compatibility_residual(x);
  return sup_abs(r);
}

double default_membership_tol(const LagrangianState& x) { return 10.0 * x.grid.spacing() * (1.0 + e_norm(x)); }

MembershipReport check_membership(const LagrangianState& x, std::optional<double> tol) {
  MembershipReport rep;
  rep.tol = tol.value_or(default_membership_tol(x));
  const double sp = x.grid.spacing();
  constexpr double roundoff = 1e-10;
  rep.min_y_xi = rep.min_h_xi = rep.min_sum = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double y_xi = (x.y(k + 1) - x.y(k)) / sp;
    const double h_xi = (x.h[k + 1] - x.h[k]) / sp;
    rep.min_y_xi = std::min(rep.min_y_xi, y_xi);
    rep.min_h_xi = std::min(rep.min_h_xi, h_xi);
    rep.min_sum = std::min(rep.min_sum, y_xi + h_xi);
  }
  rep.y_monotone = rep.min_y_xi >= -roundoff;
  rep.h_monotone = rep.min_h_xi >= -roundoff;
  rep.positive_sum = rep.min_sum > 0.0;
  rep.h_left = x.h.front();
  rep.h_starts_at_zero = std::abs(rep.h_left) <= rep.tol;
  const auto r = compatibility_residual(x);
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (std::abs(r[k]) > rep.max_residual) {
      rep.max_residual = std::abs(r[k]);
      rep.worst_cell = k;
    }
  }
  rep.compatibility = rep.max_residual <= rep.tol;
  return rep;
}

std::vector<double> ch_source_weights(const LagrangianState& x) {
  const std::size_t n = x.size();
  std::vector<double> m(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dy = x.y(k + 1) - x.y(k);
    const double u2 = 0.5 * (x.u[k] * x.u[k] + x.u[k + 1] * x.u[k + 1]);
    m[k] = u2 * dy + (x.h[k + 1] - x.h[k]);
  }
  return m;
}

ExpSweeps exp_sweeps(std::span<const double> pos, std::span<const double> mass) {
  const std::size_t n = pos.size();
  ExpSweeps s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (n < 2) return s;
  if (mass.size() + 1 != n) fail("exp_sweeps: need one mass per cell");
  std::vector<double> decay(n - 1), c(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    decay[k] = std::exp(-(pos[k + 1] - pos[k]));
    c[k] = 0.5 * mass[k] * (1.0 + decay[k]);
  }
  for (std::size_t i = 1; i < n; ++i) s.left[i] = c[i - 1] + decay[i - 1] * s.left[i - 1];
  for (std::size_t i = n - 1; i-- > 0;) s.right[i] = c[i] + decay[i] * s.right[i + 1];
  return s;
}

namespace detail {

PQ eval_pq_unchecked(const LagrangianState& x) {
  const auto w = ch_source_weights(x);
  const auto y = x.y_values();
  const auto s = exp_sweeps(y, w);
  PQ out{std::vector<double>(x.size()), std::vector<double>(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.p[i] = 0.25 * (s.left[i] + s.right[i]);
    out.q[i] = -0.25 * (s.left[i] - s.right[i]);
  }
  return out;
}

Tangent rhs_unchecked(const LagrangianState& x) {
  const PQ pq = eval_pq_unchecked(x);
  const std::size_t n = x.size();
  Tangent t{x.u, std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x.u[i];
    t.d_u[i] = -pq.q[i];
    t.d_h[i] = u * u * u - 2.0 * pq.p[i] * u;
  }
  return t;
}

Tangent rhs_hyperelastic_unchecked(const LagrangianState& x, const HyperelasticCoeffs& c) {
  const std::size_t n = x.size();
  const auto y = x.y_values();
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x.u[i];
    const double f2 = c.f2(u);
    a[i] = c.g(u) - 0.5 * f2 * u * u;
    b[i] = 0.5 * f2;
  }
  // Trapezoid cell masses of (g - f'' U^2 / 2) y_xi + f'' H_xi / 2.
  std::vector<double> w(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    w[k] = 0.5 * (a[k] + a[k + 1]) * (y[k + 1] - y[k]) + 0.5 * (b[k] + b[k + 1]) * (x.h[k + 1] - x.h[k]);
  }
  const auto s = exp_sweeps(y, w);

  std::unordered_map<double, double> g_cache;
  auto big_g = [&](double v) {
    if (c.big_g) return c.big_g(v);
    auto [it, fresh] = g_cache.try_emplace(v, 0.0);
    if (fresh) it->second = hyperelastic_big_g(c, v);
    return it->second;
  };

  Tangent t{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double p = 0.5 * (s.left[i] + s.right[i]);
    const double q = -0.5 * (s.left[i] - s.right[i]);
    const double u = x.u[i];
    t.d_zeta[i] = c.f1(u);
    t.d_u[i] = -q;
    t.d_h[i] = big_g(u) - 2.0 * p * u;
  }
  return t;
}

}  // namespace detail

PQ eval_pq(const LagrangianState& x) {
  require_monotone_y(x);
  return detail::eval_pq_unchecked(x);
}

std::vector<double> eval_p(const LagrangianState& x) { return eval_pq(x).p; }
std::vector<double> eval_q(const LagrangianState& x) { return eval_pq(x).q; }

Tangent rhs(const LagrangianState& x) {
  require_monotone_y(x);
  return detail::rhs_unchecked(x);
}

double hyperelastic_big_g(const HyperelasticCoeffs& c, double v) {
  // 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
  static constexpr std::array<double, 8> nodes = {
      0.0950125098376374401853193, 0.2816035507792589132304605, 0.4580167776572273863424194,
      0.6178762444026437484466718, 0.7554044083550030338951012, 0.8656312023878317438804679,
      0.9445750230732325760779884, 0.9894009349916499325961542};
  static constexpr std::array<double, 8> weights = {
      0.1894506104550684962853967, 0.1826034150449235888667637, 0.1691565193950025381893121,
      0.1495959888165767320815017, 0.1246289712555338720524763, 0.0951585116824927848099251,
      0.0622535239386478928628438, 0.0271524594117540948517806};
  if (v == 0.0) return 0.0;
  const double half = 0.5 * v;
  auto integrand = [&](double z) { return 2.0 * c.g(z) + c.f2(z) * z * z; };
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    s += weights[k] * (integrand(half * (1.0 - nodes[k])) + integrand(half * (1.0 + nodes[k])));
  }
  return s * half;
}

Tangent rhs_hyperelastic(const LagrangianState& x, const HyperelasticCoeffs& c) {
  require_monotone_y(x);
  if (!c.f1 || !c.f2 || !c.g) fail("hyperelastic coefficients need f', f'' and g");
  const auto [lo, hi] = std::minmax_element(x.u.begin(), x.u.end());
  // f'' must keep one strict sign on [min U, max U].
  constexpr int samples = 64;
  int sign = 0;
  for (int k = 0; k <= samples; ++k) {
    const double v = *lo + (*hi - *lo) * k / samples;
    const double f2 = c.f2(v);
    const int s = f2 > 0.0 ? 1 : (f2 < 0.0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) fail("hyperelastic coefficients: f'' changes sign or vanishes on the range of U");
    sign = s;
    if (*hi == *lo) break;
  }
  return detail::rhs_hyperelastic_unchecked(x, c);
}

}  // namespace chollag
