#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geomr/lp.hpp"
#include "geomr/matrix.hpp"
#include "geomr/piecewise.hpp"
#include "geomr/plan.hpp"
#include "geomr/platform.hpp"

namespace geomr {

enum class MipObjective { Makespan, PushTime, ShuffleTimeGivenPush };

std::string_view to_string(MipObjective o);

// Parts of the plan pinned before optimization. A pinned part makes every
// product m_j * y_k linear, so no selector binaries are created.
struct FixedAssignment {
  std::optional<Matrix> push_fraction;
  std::optional<std::vector<double>> reducer_fraction;
};

// The mixed integer program together with the indices needed to read a plan
// back out of a solution vector. Time variables are in units of
// `time_scale` seconds (the uniform plan's makespan) to keep the
// coefficients near 1.
struct PlanMip {
  lp::MixedIntegerProgram mip;
  PlatformGraph platform;
  Workload workload;
  BarrierConfig barriers;
  MipObjective objective = MipObjective::Makespan;
  PiecewiseSpec spec;
  FixedAssignment fixed;
  double time_scale = 1.0;
  std::vector<int> x_var;  // |S| x |M| row-major; -1 when pinned
  std::vector<int> y_var;  // |R|; -1 when pinned or absent
  int objective_var = -1;

  // Plan encoded by a solution vector; rows are projected onto the simplex
  // to remove round-off.
  ExecutionPlan extract_plan(std::span<const double> values) const;
};

PlanMip build_mip(const PlatformGraph& p, const Workload& w, const BarrierConfig& b, MipObjective objective,
                  const PiecewiseSpec& spec = {}, const FixedAssignment& fixed = {});

struct SolveOptions {
  double tolerance = 1e-4;    // relative gap
  double time_limit = 300.0;  // seconds
  long node_limit = -1;       // negative: unlimited
  std::uint64_t seed = 1;     // refiner
};

struct SolveReport {
  ExecutionPlan plan;
  double predicted_makespan = 0.0;  // evaluate() of `plan`
  double mip_objective = 0.0;       // linearized objective of the incumbent, seconds
  double best_bound = 0.0;          // seconds
  double gap = 0.0;
  long node_count = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
  std::string status;  // optimal, time-limit, node-limit
  // The plan read directly off the MIP before any polishing, its exact
  // makespan, and the certified bound on |mip_objective - that makespan|
  // (absolute, and relative to the makespan). Both are 0 when the program
  // had no products to approximate.
  ExecutionPlan mip_plan;
  double mip_plan_makespan = 0.0;
  double linearization_bound = 0.0;
  double epsilon_lin = 0.0;
  // Per-stage objectives for multi-stage strategies (seconds).
  std::vector<double> stage_objectives;
};

// Branch and bound on the program. The incumbent is seeded with the uniform
// and affinity plans (with pinned parts substituted). Throws SolverError
// when the time limit passes with no incumbent.
SolveReport solve_mip(const PlanMip& mip, const SolveOptions& options = {});

// Makespan of `plan` under the piecewise model: every product m_j * y_k is
// replaced by the value the program can reach with the best segment.
double linearized_makespan(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan,
                           const BarrierConfig& b, const PiecewiseSpec& spec);

// Worst-case |linearized - exact| over every valid plan of the instance.
double linearization_error_bound(const PlatformGraph& p, const Workload& w, const PiecewiseSpec& spec);

// Same bound restricted to one plan; never exceeds the instance bound.
double linearization_error_bound(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan,
                                 const PiecewiseSpec& spec);

// Solves the makespan program, then polishes the incumbent with exact
// alternating linear programs (x given y, y given x) and the refiner.
SolveReport optimize_end_to_end(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                                const PiecewiseSpec& spec = {}, const SolveOptions& options = {});

// Push time first, then the shuffle given that push.
SolveReport optimize_myopic(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                            const PiecewiseSpec& spec = {}, const SolveOptions& options = {});

enum class Phase { Push, Shuffle };

// Optimizes one communication phase for end-to-end makespan with the other
// held uniform.
SolveReport optimize_single_phase(const PlatformGraph& p, const Workload& w, const BarrierConfig& b, Phase phase,
                                  const PiecewiseSpec& spec = {}, const SolveOptions& options = {});

}  // namespace geomr
