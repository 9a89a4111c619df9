#include "chollag/grid.hpp"

#include <algorithm>
#include <cmath>

#include "chollag/error.hpp"

namespace chollag {

Grid::Grid(double xi_min, double xi_max, std::size_t n) : xi_min_(xi_min), xi_max_(xi_max), n_(n) {
  if (n < 3) fail("grid needs at least 3 nodes");
  if (!(xi_min < xi_max) || !std::isfinite(xi_min) || !std::isfinite(xi_max)) fail("grid bounds must satisfy xi_min < xi_max");
  h_ = (xi_max - xi_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = node(i);
  return out;
}

CellPos locate(const Grid& g, double s) {
  const std::size_t n = g.size();
  if (s <= g.xi_min()) return {0, 0.0, s == g.xi_min()};
  if (s >= g.xi_max()) return {n - 2, 1.0, s == g.xi_max()};
  auto k = static_cast<std::size_t>(std::floor((s - g.xi_min()) / g.spacing()));
  k = std::min(k, n - 2);
  // Rounding in the division can land one cell off.
  while (k > 0 && s < g.node(k)) --k;
  while (k + 2 < n && s >= g.node(k + 1)) ++k;
  const double a = g.node(k);
  const double b = g.node(k + 1);
  if (s == a) return {k, 0.0, true};
  if (s == b) return {k, 1.0, true};
  return {k, (s - a) / (b - a), true};
}

double interp(const Grid& g, std::span<const double> v, double s, double left, double right) {
  if (s < g.xi_min()) return left;
  if (s > g.xi_max()) return right;
  const CellPos p = locate(g, s);
  if (p.t == 0.0) return v[p.cell];
  if (p.t == 1.0) return v[p.cell + 1];
  return v[p.cell] + p.t * (v[p.cell + 1] - v[p.cell]);
}

double interp_sorted(std::span<const double> x, std::span<const double> v, double s, double left, double right) {
  if (x.empty()) return left;
  if (s < x.front()) return left;
  if (s > x.back()) return right;
  auto it = std::upper_bound(x.begin(), x.end(), s);
  if (it == x.end()) return v.back();
  const auto j = static_cast<std::size_t>(it - x.begin());
  if (j == 0) return v.front();
  const double x0 = x[j - 1];
  if (s == x0) return v[j - 1];
  const double t = (s - x0) / (x[j] - x0);
  return v[j - 1] + t * (v[j] - v[j - 1]);
}

Grid aligned_grid(double lo, double hi, std::size_t n, std::span<const double> anchors) {
  if (anchors.size() > 2) fail("aligned_grid supports at most two anchors");
  Grid nominal(lo, hi, n);
  if (anchors.empty()) return nominal;
  double h = nominal.spacing();
  const double a0 = std::min(anchors.front(), anchors.back());
  if (anchors.size() == 2) {
    const double sep = std::abs(anchors[1] - anchors[0]);
    if (sep > 0.0) {
      const double k = std::max(1.0, std::floor(sep / h));
      h = sep / k;
    }
  }
  const double m = std::ceil((a0 - lo) / h);
  const double xi_min = a0 - m * h;
  return Grid(xi_min, xi_min + static_cast<double>(n - 1) * h, n);
}

}  // namespace chollag
