// The acceptance suite: one check per structural claim about the Melvin
// spacetime, the Melvin-type family and its 3-dimensional base.
//
// Shared by `curvkit verify-paper` and the acceptance test binary.
#ifndef CURVKIT_CLAIMS_HPP
#define CURVKIT_CLAIMS_HPP

#include <functional>
#include <string>
#include <vector>

#include "curvkit/chart.hpp"

namespace curvkit {

/// disputed: the claim holds once a documented misprint is corrected.
enum class ClaimStatus { pass, fail, disputed };

std::string to_string(ClaimStatus s);

struct ClaimResult {
  int id = 0;
  std::string title;
  ClaimStatus status = ClaimStatus::pass;
  std::vector<std::string> details;
};

struct PropertyOutcome {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// An extra property suite for criterion 13 (the independent oracles live
/// outside the library and are plugged in here).
using PropertyCheck = std::function<std::vector<PropertyOutcome>()>;

struct ClaimOptions {
  /// Detector tolerance. Coefficient comparisons keep their own fixed bounds.
  Tolerance tol;
  std::vector<PropertyCheck> extra_properties;
  /// Test fixture: perturbs the printed base-metric R_1212 entry.
  bool tamper_golden = false;
};

inline constexpr int kCriterionCount = 14;

/// Throws std::out_of_range for ids outside 1..kCriterionCount.
ClaimResult run_criterion(int id, const ClaimOptions& options = {});
std::vector<ClaimResult> run_all(const ClaimOptions& options = {});

/// "criterion  3  PASS  <title>"
std::string summary_line(const ClaimResult& r);

}  // namespace curvkit

#endif  // CURVKIT_CLAIMS_HPP
