#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bcregion/analytic.hpp"
#include "bcregion/model.hpp"

namespace bcregion {

enum class VerifyProfile { Fast, Full };

struct CheckResult {
  std::string name;
  bool passed = false;
  double margin = 0.0;     // worst observed residual (or violation count)
  double tolerance = 0.0;  // the bound the margin is held to
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

enum class InstanceFilter { Any, HybridWindowOnly };

/// Seeded random problem instances for property checks. HybridWindowOnly
/// resamples until P clears the regime threshold with a small margin, so the
/// window endpoints stay well separated.
std::vector<ProblemInstance> random_instances(std::uint64_t seed, int count,
                                              InstanceFilter filter = InstanceFilter::Any);

struct VerifyOptions {
  VerifyProfile profile = VerifyProfile::Full;
  std::uint64_t seed = 1;
  /// Number of random instances to draw; 0 verifies only the given instance.
  int randomized_instances = 0;
  /// Test hook: replaces the frontier used by the composition check.
  /// Defaults to d2_star; a corrupted frontier must make verification fail.
  std::function<double(const ProblemInstance&, double)> frontier_override;
};

/// Runs the closed-form consistency suite: frontier composition, branch
/// continuity at the window endpoints, the threshold equivalence, the genie
/// elimination identity, the optimal-parameter matching, power and rate
/// tightness, and closed-form-vs-MMSE agreement.
VerifyReport run_verification(const std::optional<ProblemInstance>& inst,
                              const VerifyOptions& options);

}  // namespace bcregion
