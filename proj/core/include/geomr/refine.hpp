#pragma once

#include <cstdint>

#include "geomr/plan.hpp"
#include "geomr/platform.hpp"

namespace geomr {

struct RefineOptions {
  int iterations = 400;  // sweeps
  double initial_step = 0.125;
  double min_step = 1e-7;  // the step halves after every sweep without gain
  std::uint64_t seed = 1;
};

// Pattern search on the exact makespan. A sweep tries moving mass between
// every pair of entries of each x row and of y, then a few random zero-sum
// perturbations of all rows at once projected back onto the simplex. Only
// strict improvements are kept, so the result is never worse than `start`.
// Deterministic for a given seed.
ExecutionPlan refine_plan(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                          const ExecutionPlan& start, const RefineOptions& options = {});

}  // namespace geomr
