#pragma once

#include <iosfwd>
#include <vector>

#include "geomr/plan.hpp"
#include "geomr/platform.hpp"

namespace geomr {

// Critical-path attribution of the makespan to the four phases. The
// components are nonnegative and add up to the makespan.
struct PhaseBreakdown {
  double push = 0.0;
  double map = 0.0;
  double shuffle = 0.0;
  double reduce = 0.0;

  double total() const noexcept { return push + map + shuffle + reduce; }
};

// Per-node phase times in seconds. Under a global barrier the start vector
// holds the same scalar for every node.
struct PhaseTimeline {
  BarrierConfig barriers;
  std::vector<double> push_end;          // per mapper
  std::vector<double> map_start;         // per mapper
  std::vector<double> map_end;           // per mapper
  std::vector<double> shuffle_start;     // per mapper
  std::vector<double> shuffle_send_end;  // per mapper: last outgoing shuffle link done
  std::vector<double> shuffle_end;       // per reducer
  std::vector<double> reduce_start;      // per reducer
  std::vector<double> reduce_end;        // per reducer
  std::vector<std::size_t> shuffle_critical_mapper;  // per reducer: mapper that ends its shuffle
  double makespan = 0.0;
  PhaseBreakdown breakdown;
};

// Evaluates the analytic model of a valid plan. Links carrying no data
// contribute zero time. Throws DimensionError / InvalidPlanError.
PhaseTimeline evaluate(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan,
                       const BarrierConfig& b);

PhaseBreakdown phase_breakdown(const PhaseTimeline& t);

// Reusable evaluator for hot loops (oracle, refiner). Skips validation.
class MakespanEvaluator {
 public:
  MakespanEvaluator(const PlatformGraph& p, const Workload& w, const BarrierConfig& b);

  double makespan(const ExecutionPlan& plan);
  const PhaseTimeline& timeline(const ExecutionPlan& plan);

  // Evaluates with the intermediate byte volume of every shuffle link
  // supplied by the caller (|M| x |R|) instead of alpha * load_j * y_k.
  const PhaseTimeline& timeline_with_shuffle_volume(const ExecutionPlan& plan, const Matrix& volume);

  const PlatformGraph& platform() const noexcept { return *platform_; }
  const Workload& workload() const noexcept { return *workload_; }
  const BarrierConfig& barriers() const noexcept { return barriers_; }

 private:
  void run(const ExecutionPlan& plan, const Matrix* volume);

  const PlatformGraph* platform_;
  const Workload* workload_;
  BarrierConfig barriers_;
  std::vector<double> load_;
  PhaseTimeline t_;
};

// CSV with columns entity,role,phase,start,end and a final makespan row.
void write_timeline_csv(const PhaseTimeline& t, const PlatformGraph& p, std::ostream& out);

}  // namespace geomr
