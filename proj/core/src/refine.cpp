#include "geomr/refine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "geomr/makespan.hpp"

namespace geomr {

namespace {

// One block of the plan: an x row or y.
std::span<double> block(ExecutionPlan& plan, std::size_t b) {
  if (b < plan.push_fraction.rows()) return plan.push_fraction.row(b);
  return plan.reducer_fraction;
}

}  // namespace

ExecutionPlan refine_plan(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                          const ExecutionPlan& start, const RefineOptions& options) {
  require_valid(start, p);
  MakespanEvaluator eval(p, w, b);
  ExecutionPlan best = start;
  double best_value = eval.makespan(best);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const std::size_t blocks = p.num_sources() + 1;
  double step = options.initial_step;
  ExecutionPlan cand = best;

  auto try_candidate = [&]() {
    const double v = eval.makespan(cand);
    if (v < best_value * (1.0 - 1e-12)) {
      best = cand;
      best_value = v;
      return true;
    }
    cand = best;
    return false;
  };

  for (int sweep = 0; sweep < options.iterations && step >= options.min_step; ++sweep) {
    bool improved = false;
    for (std::size_t bl = 0; bl < blocks; ++bl) {
      const std::size_t n = block(best, bl).size();
      for (std::size_t from = 0; from < n; ++from) {
        for (std::size_t to = 0; to < n; ++to) {
          if (from == to) continue;
          auto row = block(cand, bl);
          const double moved = std::min(step, row[from]);
          if (moved <= 0.0) continue;
          row[from] -= moved;
          row[to] += moved;
          improved |= try_candidate();
        }
      }
    }
    for (std::size_t trial = 0; trial < 2 * blocks; ++trial) {
      for (std::size_t bl = 0; bl < blocks; ++bl) {
        auto row = block(cand, bl);
        double mean = 0.0;
        std::vector<double> delta(row.size());
        for (double& d : delta) {
          d = step * unit(rng);
          mean += d;
        }
        mean /= static_cast<double>(row.size());
        double widest = 0.0;
        for (double& d : delta) {
          d -= mean;
          widest = std::max(widest, std::abs(d));
        }
        // Full-length steps: the improving directions out of a kink are
        // often corners of the box.
        const double scale = widest > 0.0 ? step / widest : 0.0;
        for (std::size_t e = 0; e < row.size(); ++e) row[e] += scale * delta[e];
        project_to_simplex(row);
      }
      improved |= try_candidate();
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace geomr
