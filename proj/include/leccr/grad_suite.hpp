#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leccr/grad_check.hpp"

namespace leccr {

struct GradSuiteResult {
  std::string name;
  GradCheckReport report;
};

// Finite-difference coverage of every loss plus the composed objective
// through slot generation and both interaction modes, at small dims.
// The guidance check holds the teacher rows fixed, matching the
// stop-gradient contract of the softened targets.
// composed_entries_per_block bounds the seeded per-block subsample used
// for the two end-to-end objective checks (0 checks every entry).
std::vector<GradSuiteResult> run_gradient_suite(std::uint64_t seed, double h = 1e-5,
                                                double tolerance = 1e-4,
                                                std::size_t composed_entries_per_block = 0);

}  // namespace leccr
