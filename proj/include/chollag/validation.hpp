#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chollag {

/// Outcome of one acceptance criterion.
struct CriterionResult {
  int id = 0;
  std::string suite;
  bool passed = false;
  std::string detail;  // measured values against their thresholds
  double seconds = 0.0;
};

/// Suite names in criterion order: convolution, peakon, conservation,
/// constraint, collision, equivariance, roundtrip, sandwich, equivalence,
/// discontinuity, weak, hyperelastic. "all" runs every suite.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

/// Runs one suite (or "all"); unknown names throw Error(config).
/// `threads` caps how many suites of "all" run at once.
std::vector<CriterionResult> run_suite(const std::string& name, std::uint64_t seed = 0, int threads = 1);

/// "[PASS] 3 conservation: ..." style line.
std::string format_result(const CriterionResult& r);

}  // namespace chollag
