#pragma once

// Invariant checks over an experiment grid, and the numbered acceptance
// criteria. Both report named PASS/FAIL lines.

#include <iosfwd>
#include <string>
#include <vector>

#include "grem/experiment.hpp"

namespace grem {

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool allPassed() const;
};

/// "PASS name: detail" / "FAIL name: detail", one per line.
void print_report(const VerifyReport& report, std::ostream& out);

namespace tol {
inline constexpr double kMatrix = 1e-12;
inline constexpr double kFreeEnergyForms = 1e-10;
inline constexpr double kContinuity = 1e-9;
inline constexpr double kSlope = 1e-3;
inline constexpr double kSlopeStep = 1e-5;
inline constexpr double kProjection = 1e-6;
inline constexpr double kVariational = 1e-9;
inline constexpr double kLinearMax = 1e-6;
inline constexpr double kLinearBound = 1e-9;
inline constexpr double kQG = 1e-9;
inline constexpr double kPsi = 1e-8;
inline constexpr double kPsiEquality = 1e-5;
inline constexpr double kGapInfiniteTemp = 1e-10;
inline constexpr double kPowerIteration = 1e-8;
inline constexpr double kPoincareRel = 1e-9;
inline constexpr double kLogPoincare = 1e-9;
inline constexpr double kGibbsNorm = 1e-12;
}  // namespace tol

/// Per-instance invariant suite over every (N, beta, seed) grid point.
/// Each invariant appears once in the report, aggregated over the grid.
VerifyReport verify_instances(const ExperimentConfig& config);

inline constexpr int kAcceptanceCriteria = 10;

/// Runs acceptance criterion `id` (1..10). Criteria 1 and 2 share one set
/// of instances, built on first use.
CheckResult acceptance_criterion(int id);

}  // namespace grem
