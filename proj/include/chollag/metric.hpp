#pragma once

#include <cstdint>
#include <optional>

#include "chollag/coords.hpp"
#include "chollag/flow.hpp"

namespace chollag {

/// Settings for the relabeling search behind the upper bounds.
struct OptimizerConfig {
  int max_iterations = 200;       // coordinate-descent sweeps per direction
  double rel_tol = 1e-6;          // stop when a sweep improves less than this
  double kappa_max = 10.0;        // witness slopes kept in [1/(1+k), 1+k]
  std::size_t band = 0;           // alignment band in cells; 0 picks n/8 (at least 16)
  std::uint64_t seed = 0;         // knot visiting order
};

/// Enclosure lower <= J (resp. d) <= upper with the relabelings realizing
/// the upper bound: upper = ||Xa o f1 - Xb|| + ||Xa - Xb o f2||.
struct MetricBracket {
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
  Relabeling witness_f1;
  Relabeling witness_f2;
};

/// max over components and nodes of |Xa - Xb| (zeta, U, H).
double linf_dist(const LagrangianState& xa, const LagrangianState& xb);

/// Best found f and its value of ||Xa o f - Xb||.
struct AlignResult {
  Relabeling f;
  double value = 0.0;
  int iterations = 0;
};
AlignResult best_relabeling(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt = {});

/// Monotone dynamic-programming alignment of Xa against Xb (the initializer).
Relabeling monotone_alignment(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt = {});

/// Certified bracket for the pseudosemimetric J.
MetricBracket j_upper(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt = {});

/// Bracket for the metric d (and d^M when `energy_bound` is given: both
/// states must then carry energy <= M).
MetricBracket d_bracket(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt = {},
                        std::optional<double> energy_bound = std::nullopt);

/// d_D on Eulerian pairs through L on a shared label grid of n nodes.
MetricBracket d_eulerian(const EulerianPair& pa, const EulerianPair& pb, std::size_t n, const OptimizerConfig& opt = {},
                         std::optional<double> energy_bound = std::nullopt);
/// Shared label grid covering both pairs.
Grid common_lagrangian_grid(const EulerianPair& pa, const EulerianPair& pb, std::size_t n);

/// Diagnostic upper bound for inf_{f,g} ||Xa o f - Xb o g|| (not a metric bound).
double jtilde_upper(const LagrangianState& xa, const LagrangianState& xb, const OptimizerConfig& opt = {});

struct ClassicalNorms {
  double h1 = 0.0;
  double linf = 0.0;
};
/// H^1 and L^inf distance of the u-components on a common x-grid.
ClassicalNorms classical_norms(const EulerianPair& pa, const EulerianPair& pb);

}  // namespace chollag
