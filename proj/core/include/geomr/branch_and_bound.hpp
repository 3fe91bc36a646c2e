#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "geomr/lp.hpp"
#include "geomr/simplex.hpp"

namespace geomr::lp {

struct BranchAndBoundOptions {
  double relative_gap = 1e-4;
  double time_limit = 300.0;  // seconds
  long node_limit = -1;       // negative: unlimited
  SimplexOptions simplex;
};

// A feasible solution. `values` is an encoding chosen by whoever produced it
// (the LP variable vector by default, or a heuristic's own encoding); it is
// also the key for lexicographic tie-breaking.
struct Incumbent {
  double objective = 0.0;
  std::vector<double> values;
};

enum class MipStatus { Optimal, TimeLimit, NodeLimit, Infeasible };

const char* to_string(MipStatus s);

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  std::optional<Incumbent> incumbent;
  double best_bound = 0.0;
  double gap = 0.0;  // (incumbent - bound) / |incumbent|
  long nodes = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
};

// Called with the LP relaxation at every node; may return a feasible
// solution whose objective is an upper bound for the program.
using Heuristic = std::function<std::optional<Incumbent>(std::span<const double> relaxation)>;

// Best-bound branch and bound over the exactly-one groups of `mip`. A node
// restricts every group to a contiguous range of its selectors; the most
// fractional group is split in two at the selectors' weighted mean.
// Every binary must belong to some group.
MipResult solve_branch_and_bound(const MixedIntegerProgram& mip, const BranchAndBoundOptions& options,
                                 const Heuristic& heuristic = {},
                                 std::vector<Incumbent> warm_start = {});

}  // namespace geomr::lp
