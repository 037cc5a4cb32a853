#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cqed/scenario.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  // worst observed value
  double limit = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
  /// One line per check followed by a summary line.
  std::string text() const;
};

enum class ValidationLevel { kQuick, kFull };

/// Cross-backend comparisons and invariant suites. Quick runs stage-1 checks at
/// three times plus short five-stage runs; full covers the whole parameter grid.
ValidationReport validate(ValidationLevel level, std::size_t jobs = 1);

/// Truncation whose coherent tail is below 1e-20, never below the default rule.
/// Backend comparisons run at this size so truncation error stays out of the way.
std::size_t certification_truncation(cd amplitude);

/// Largest trace distance between matching snapshots. Exact eigen-solve up to
/// dimension 600, the upper bound of trace_distance_bounds above that.
double max_trace_distance(const Trajectory& a, const Trajectory& b);

}  // namespace cqed
