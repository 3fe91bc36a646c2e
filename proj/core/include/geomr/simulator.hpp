#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "geomr/makespan.hpp"
#include "geomr/matrix.hpp"
#include "geomr/plan.hpp"
#include "geomr/platform.hpp"
#include "geomr/units.hpp"

namespace geomr {

struct SimConfig {
  // Bytes per piece moved or processed at once; 0 selects fluid mode, where
  // every link and node works at a continuous rate.
  double chunk_size = 64 * kMB;
  BarrierConfig barriers;
};

enum class SimEventKind { TransferEnd, ComputeEnd, ComputeStart, TransferStart, BarrierRelease };

std::string_view to_string(SimEventKind k);

struct SimEvent {
  double time = 0.0;
  std::string entity;  // "m3", "s0->m3", "m3->r1", ...
  SimEventKind kind = SimEventKind::TransferStart;
  double bytes = 0.0;
};

struct SimTrace {
  std::vector<SimEvent> events;  // time-ordered
  PhaseTimeline measured_timeline;
  Matrix push_bytes;                  // delivered per push link
  Matrix shuffle_bytes;               // delivered per shuffle link
  std::vector<double> mapper_input;   // bytes received per mapper
  std::vector<double> reducer_input;  // bytes received per reducer
  std::vector<std::string> warnings;
};

// Runs the plan. Every link is dedicated and moves data at its bandwidth;
// every node processes what has arrived at its capacity, in arrival order.
// A global barrier releases a stage when every node of the previous stage
// is done, a local barrier when the node's own inputs are done, and
// pipelining lets a node work as soon as data arrives. Throws
// InvalidPlanError, or Error for a negative chunk size.
SimTrace simulate(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan, const SimConfig& cfg);

// Checks the delivered byte totals of a trace against the plan: mapper j
// receives sum_i D_i x_ij and reducer k receives alpha * sum_i D_i * y_k,
// up to floating-point round-off (`relative_tolerance`).
ValidationResult check_conservation(const SimTrace& trace, const PlatformGraph& p, const Workload& w,
                                    const ExecutionPlan& plan, double relative_tolerance = 1e-9);

// CSV with columns time,entity,event,bytes.
void write_trace_csv(const SimTrace& trace, std::ostream& out);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct PredictedMeasured {
  double predicted = 0.0;
  double measured = 0.0;
};

// Least-squares fit of measured on predicted. Throws Error with fewer than
// two pairs or when every predicted value is the same.
LinearFit correlate(const std::vector<PredictedMeasured>& pairs);

}  // namespace geomr
