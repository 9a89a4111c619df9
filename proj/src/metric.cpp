#include "chollag/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>

#include "chollag/error.hpp"

namespace chollag {

double linf_dist(const LagrangianState& xa, const LagrangianState& xb) {
  if (!(xa.grid == xb.grid)) fail("linf_dist: grid mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    m = std::max({m, std::abs(xa.zeta[i] - xb.zeta[i]), std::abs(xa.u[i] - xb.u[i]), std::abs(xa.h[i] - xb.h[i])});
  }
  return m;
}

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

// Relabeled source evaluated at label s, compared against target node i:
// (y_a(s) - xi_i, U_a(s), H_a(s)) - (zeta_b, U_b, H_b)_i. Within one cell of
// the source grid (or beyond the window) this is affine in s; `affine`
// returns the pair (value at s = 0, slope).
struct Aligner {
  const LagrangianState& a;
  const LagrangianState& b;
  double sp;
  double smin, smax, kappa;

  Aligner(const LagrangianState& xa, const LagrangianState& xb, double kmax)
      : a(xa), b(xb), sp(xa.grid.spacing()), smin(1.0 / (1.0 + kmax)), smax(1.0 + kmax), kappa(kmax) {}

  Vec3 diff(std::size_t i, double s) const {
    const Grid& g = a.grid;
    const double ya = s + interp(g, a.zeta, s, a.zeta.front(), a.zeta.back());
    return {ya - b.y(i), interp(g, a.u, s, 0.0, 0.0) - b.u[i], interp(g, a.h, s, a.h.front(), a.h.back()) - b.h[i]};
  }

  double weight(std::size_t i) const { return (i == 0 || i + 1 == a.size()) ? 0.5 * sp : sp; }

  // Squared surrogate: sum trap |D|^2 + sum h |D'|^2 over all three components.
  double surrogate(const std::vector<double>& f) const {
    const std::size_t n = f.size();
    std::vector<Vec3> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = diff(i, f[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += weight(i) * dot(d[i], d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Vec3 e = sub(d[i + 1], d[i]);
      s += dot(e, e) / sp;
    }
    return s;
  }

  // Exact minimizer of the local surrogate in f_i over [lo, hi]; the local
  // cost is piecewise quadratic in f_i with breaks at source nodes.
  double best_knot(std::size_t i, double lo, double hi, const Vec3* left, const Vec3* right, double current) const {
    const double w = weight(i);
    double a2 = w;
    Vec3 pull{0.0, 0.0, 0.0};
    if (left) {
      a2 += 1.0 / sp;
      for (int c = 0; c < 3; ++c) pull[c] += (*left)[c] / sp;
    }
    if (right) {
      a2 += 1.0 / sp;
      for (int c = 0; c < 3; ++c) pull[c] += (*right)[c] / sp;
    }
    auto cost = [&](double s) {
      const Vec3 d = diff(i, s);
      return a2 * dot(d, d) - 2.0 * dot(d, pull);
    };
    double best_s = current;
    double best_c = cost(current);
    auto consider = [&](double s) {
      s = std::clamp(s, lo, hi);
      const double c = cost(s);
      if (c < best_c) {
        best_c = c;
        best_s = s;
      }
    };
    const Grid& g = a.grid;
    // Breakpoints of the piecewise-affine difference inside [lo, hi].
    std::vector<double> brk{lo};
    if (lo < g.xi_max() && hi > g.xi_min()) {
      const double first = std::max(lo, g.xi_min());
      const CellPos p = locate(g, first);
      std::size_t k = p.cell + 1;
      if (first > lo) brk.push_back(first);
      while (k < g.size() && g.node(k) < hi) {
        brk.push_back(g.node(k));
        ++k;
      }
    }
    brk.push_back(hi);
    for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
      const double s0 = brk[k], s1 = brk[k + 1];
      consider(s0);
      if (!(s1 > s0)) continue;
      const Vec3 d0 = diff(i, s0), d1 = diff(i, s1);
      const Vec3 slope{(d1[0] - d0[0]) / (s1 - s0), (d1[1] - d0[1]) / (s1 - s0), (d1[2] - d0[2]) / (s1 - s0)};
      const double bb = dot(slope, slope);
      if (bb > 0.0) {
        // minimize a2 |d0 + slope t|^2 - 2 (d0 + slope t).pull over t
        const double t = (dot(slope, pull) / a2 - dot(d0, slope)) / bb;
        consider(s0 + std::clamp(t, 0.0, s1 - s0));
      }
    }
    consider(hi);
    return best_s;
  }

  // Feasible interval for knot i given its neighbours.
  std::pair<double, double> bounds(const std::vector<double>& f, std::size_t i) const {
    const double xi = a.grid.node(i);
    double lo = xi - kappa, hi = xi + kappa;
    if (i > 0) {
      lo = std::max(lo, f[i - 1] + smin * sp);
      hi = std::min(hi, f[i - 1] + smax * sp);
    }
    if (i + 1 < f.size()) {
      lo = std::max(lo, f[i + 1] - smax * sp);
      hi = std::min(hi, f[i + 1] - smin * sp);
    }
    return {lo, hi};
  }
};

// Projects knot values onto the slope and offset constraints (forward pass).
void project(std::vector<double>& f, const Grid& g, double smin, double smax, double kappa) {
  const double sp = g.spacing();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double xi = g.node(i);
    double lo = xi - kappa, hi = xi + kappa;
    if (i > 0) {
      lo = std::max(lo, f[i - 1] + smin * sp);
      hi = std::min(hi, f[i - 1] + smax * sp);
    }
    f[i] = lo > hi ? lo : std::clamp(f[i], lo, hi);
  }
}

bool strictly_increasing(const std::vector<double>& f) {
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (!(f[i] > f[i - 1]) || !std::isfinite(f[i])) return false;
  }
  return true;
}

double objective(const LagrangianState& xa, const LagrangianState& xb, const Relabeling& f) {
  return e_distance(relabel(xa, f), xb);
}

std::size_t band_of(const OptimizerConfig& opt, std::size_t n) {
  const std::size_t b = opt.band > 0 ? opt.band : std::max<std::size_t>(16, n / 8);
  return std::min(b, n - 1);
}

}  // namespace

Relabeling monotone_alignment(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt) {
  if (!(xa.grid == xb.grid)) fail("monotone_alignment: grid mismatch");
  const Grid& g = xa.grid;
  const std::size_t n = g.size();
  const std::size_t band = band_of(opt, n);
  const std::size_t width = 2 * band + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Row i of the target, columns j of the source with |i - j| <= band.
  auto col = [&](std::size_t i, std::size_t j) { return j + band - i; };
  auto cost = [&](std::size_t i, std::size_t j) {
    const double dy = xa.y(j) - xb.y(i), du = xa.u[j] - xb.u[i], dh = xa.h[j] - xb.h[i];
    return dy * dy + du * du + dh * dh;
  };
  std::vector<double> prev(width, inf), cur(width, inf);
  std::vector<std::uint8_t> from(n * width, 0);  // 0 diag, 1 up (i-1), 2 left (j-1)
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), inf);
    const std::size_t jlo = i > band ? i - band : 0;
    const std::size_t jhi = std::min(n - 1, i + band);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const std::size_t c = col(i, j);
      double best = inf;
      std::uint8_t dir = 0;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        if (i > 0 && j > 0 && j - 1 + band >= i - 1 && j - 1 <= i - 1 + band) {
          best = prev[col(i - 1, j - 1)];
        }
        if (i > 0 && j + band >= i - 1 && j <= i - 1 + band) {
          const double v = prev[col(i - 1, j)];
          if (v < best) {
            best = v;
            dir = 1;
          }
        }
        if (j > jlo) {
          const double v = cur[c - 1];
          if (v < best) {
            best = v;
            dir = 2;
          }
        }
      }
      cur[c] = best + cost(i, j);
      from[i * width + c] = dir;
    }
    std::swap(prev, cur);
  }
  // Backtrack from (n-1, n-1); f(xi_i) is the mean matched source label.
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  std::size_t i = n - 1, j = n - 1;
  while (true) {
    sum[i] += g.node(j);
    ++count[i];
    if (i == 0 && j == 0) break;
    const std::uint8_t dir = from[i * width + col(i, j)];
    if (dir == 0) {
      --i;
      --j;
    } else if (dir == 1) {
      --i;
    } else {
      --j;
    }
  }
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = sum[k] / count[k];
  project(f, g, 1.0 / (1.0 + opt.kappa_max), 1.0 + opt.kappa_max, opt.kappa_max);
  if (!strictly_increasing(f)) return Relabeling::identity(g);
  return Relabeling(g, std::move(f));
}

AlignResult best_relabeling(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt) {
  if (!(xa.grid == xb.grid)) fail("metric: states must share a grid");
  const Grid& g = xa.grid;
  AlignResult best{Relabeling::identity(g), e_distance(xa, xb), 0};
  if (best.value == 0.0) return best;
  try {
    Aligner al(xa, xb, opt.kappa_max);
    // Start from the better of identity and the monotone alignment.
    std::vector<double> f = g.nodes();
    double start = best.value;
    {
      const Relabeling dtw = monotone_alignment(xa, xb, opt);
      const double v = objective(xa, xb, dtw);
      if (v < best.value) best = {dtw, v, 0};
      if (v < start) {
        f = dtw.values();
        start = v;
      }
    }
    const std::size_t n = g.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(opt.seed);
    std::vector<Vec3> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = al.diff(i, f[i]);
    double s_prev = al.surrogate(f);
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i : order) {
        auto [lo, hi] = al.bounds(f, i);
        if (!(lo <= hi)) continue;
        const Vec3* left = i > 0 ? &d[i - 1] : nullptr;
        const Vec3* right = i + 1 < n ? &d[i + 1] : nullptr;
        f[i] = al.best_knot(i, lo, hi, left, right, std::clamp(f[i], lo, hi));
        d[i] = al.diff(i, f[i]);
      }
      const double s = al.surrogate(f);
      const double improvement = s_prev - s;
      s_prev = s;
      if (!(improvement > opt.rel_tol * std::max(s, std::numeric_limits<double>::min()))) {
        ++it;
        break;
      }
    }
    if (strictly_increasing(f)) {
      Relabeling refined(g, std::move(f));
      const double v = objective(xa, xb, refined);
      if (v < best.value) best = {std::move(refined), v, it};
    }
    best.iterations = it;
  } catch (const std::exception&) {
    // keep the identity or alignment witness
  }
  return best;
}

MetricBracket j_upper(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt) {
  if (!(xa.grid == xb.grid)) fail("metric: states must share a grid");
  MetricBracket br;
  br.lower = 0.5 * linf_dist(xa, xb);
  const AlignResult t1 = best_relabeling(xa, xb, opt);
  const AlignResult t2 = best_relabeling(xb, xa, opt);
  br.upper = t1.value + t2.value;
  br.iterations = t1.iterations + t2.iterations;
  br.witness_f1 = t1.f;
  br.witness_f2 = t2.f;
  return br;
}

MetricBracket d_bracket(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt,
                        std::optional<double> energy_bound) {
  if (energy_bound) {
    const double m = *energy_bound;
    if (xa.total_energy() > m || xb.total_energy() > m) {
      throw Error(ErrorCode::config, "state energy exceeds the restriction bound M");
    }
  }
  return j_upper(xa, xb, opt);
}

Grid common_lagrangian_grid(const EulerianPair& pa, const EulerianPair& pb, std::size_t n) {
  const double lo = std::min(pa.x.front(), pb.x.front());
  const double hi = std::max(pa.x.back() + energy(pa), pb.x.back() + energy(pb));
  return Grid(lo, hi, n);
}

MetricBracket d_eulerian(const EulerianPair& pa, const EulerianPair& pb, std::size_t n, const OptimizerConfig& opt,
                         std::optional<double> energy_bound) {
  if (energy_bound && (energy(pa) > *energy_bound || energy(pb) > *energy_bound)) {
    throw Error(ErrorCode::config, "pair energy exceeds the restriction bound M");
  }
  const Grid g = common_lagrangian_grid(pa, pb, n);
  return d_bracket(to_lagrangian(pa, g), to_lagrangian(pb, g), opt);
}

double jtilde_upper(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt) {
  return std::min(best_relabeling(xa, xb, opt).value, best_relabeling(xb, xa, opt).value);
}

ClassicalNorms classical_norms(const EulerianPair& pa, const EulerianPair& pb) {
  if (pa.x != pb.x) fail("classical_norms: pairs must share an x-grid");
  ClassicalNorms r;
  double l2 = 0.0, d2 = 0.0;
  const std::size_t n = pa.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pa.u[i] - pb.u[i];
    r.linf = std::max(r.linf, std::abs(d));
    if (i + 1 < n) {
      const double dx = pa.x[i + 1] - pa.x[i];
      const double dn = pa.u[i + 1] - pb.u[i + 1];
      l2 += 0.5 * dx * (d * d + dn * dn);
      const double slope = (dn - d) / dx;
      d2 += dx * slope * slope;
    }
  }
  r.h1 = std::sqrt(l2 + d2);
  return r;
}

}  // namespace chollag
