#pragma once

#include "geomr/plan.hpp"
#include "geomr/platform.hpp"

namespace geomr {

enum class OracleObjective { Makespan, PushTime };

struct OracleResult {
  ExecutionPlan plan;
  double value = 0.0;  // makespan or push time, seconds
  long evaluated = 0;
};

// Exhaustive search over every plan whose fractions are multiples of
// grid_step. Ties go to the lexicographically smallest plan. With
// OracleObjective::PushTime only x is searched and y stays uniform.
// Throws InstanceTooLargeError beyond 3 nodes per role at steps >= 0.05 or
// 2 nodes per role at steps >= 0.01, and Error when 1/grid_step is not an
// integer.
OracleResult brute_force_oracle(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                                double grid_step, OracleObjective objective = OracleObjective::Makespan);

}  // namespace geomr
