#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace chollag {

/// Uniform grid on the label line [xi_min, xi_max] with n nodes.
class Grid {
 public:
  Grid() = default;
  Grid(double xi_min, double xi_max, std::size_t n);

  double xi_min() const { return xi_min_; }
  double xi_max() const { return xi_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }

  /// Node i. Every routine that needs node positions goes through here so that
  /// node coordinates are bit-identical across modules.
  double node(std::size_t i) const { return i + 1 == n_ ? xi_max_ : xi_min_ + static_cast<double>(i) * h_; }
  std::vector<double> nodes() const;

  bool operator==(const Grid& o) const { return xi_min_ == o.xi_min_ && xi_max_ == o.xi_max_ && n_ == o.n_; }

 private:
  double xi_min_ = 0.0;
  double xi_max_ = 1.0;
  std::size_t n_ = 0;
  double h_ = 0.0;
};

/// Cell containing s and the local coordinate t in [0, 1]. Returns t == 0
/// exactly when s coincides with a node, so node lookups are exact.
struct CellPos {
  std::size_t cell;
  double t;
  bool inside;  // s within [xi_min, xi_max]
};
CellPos locate(const Grid& g, double s);

/// Piecewise-linear evaluation of nodal samples at s. Outside the window the
/// value is extended by the constant `left` / `right`.
double interp(const Grid& g, std::span<const double> v, double s, double left, double right);
inline double interp_clamped(const Grid& g, std::span<const double> v, double s) {
  return interp(g, v, s, v.front(), v.back());
}

/// Piecewise-linear interpolation on a strictly increasing, nonuniform abscissa.
double interp_sorted(std::span<const double> x, std::span<const double> v, double s, double left, double right);

/// Grid with the same node count whose nodes include the given anchors (at
/// most two). The spacing is the smallest h not below the nominal one for
/// which the anchor separation is a whole number of cells.
Grid aligned_grid(double lo, double hi, std::size_t n, std::span<const double> anchors);

}  // namespace chollag
