#pragma once

#include <string>
#include <vector>

#include "pmfrank/types.h"

namespace pmfrank {

struct Violation {
  // Id of the offending item, session or feature record.
  std::string subject;
  // Short machine-readable rule name, e.g. "clicked-subset-displayed".
  std::string rule;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

// Tolerance on |sum(bins) - 1| for a histogram to count as L1-normalized.
inline constexpr double kHistogramMassTolerance = 1e-9;

// Checks every structural invariant of the data model. Violations are data,
// not errors: the dataset is never modified and nothing is thrown.
ValidationReport validate(const Dataset& dataset);

}  // namespace pmfrank
