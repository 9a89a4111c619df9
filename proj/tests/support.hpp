#pragma once

// Independent reference computations shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "chollag/lagrangian.hpp"

namespace ref {

// P and Q by brute force: every cell's trapezoid contribution to every node,
// the kernel sign taken from which side of the node the cell lies on.
inline chollag::PQ direct_pq(const chollag::LagrangianState& x) {
  const std::size_t n = x.size();
  chollag::PQ out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double p = 0.0, q = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double dy = x.y(k + 1) - x.y(k);
      const double mass = 0.5 * (x.u[k] * x.u[k] + x.u[k + 1] * x.u[k + 1]) * dy + (x.h[k + 1] - x.h[k]);
      const double a = std::exp(-std::abs(x.y(i) - x.y(k)));
      const double b = std::exp(-std::abs(x.y(i) - x.y(k + 1)));
      p += 0.5 * (a + b) * mass;
      q += (k < i ? -0.5 : 0.5) * (a + b) * mass;
    }
    out.p[i] = 0.25 * p;
    out.q[i] = 0.25 * q;
  }
  return out;
}

// For the unit peakon u = exp(-|x|): P = exp(-|x|) - exp(-2|x|)/2 and
// Q = P_x = sign(x) (exp(-2|x|) - exp(-|x|)).
inline double peakon_p(double x) {
  const double a = std::abs(x);
  return std::exp(-a) - 0.5 * std::exp(-2.0 * a);
}
inline double peakon_q(double x) {
  const double a = std::abs(x);
  return (x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0) * (std::exp(-2.0 * a) - std::exp(-a));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace ref
