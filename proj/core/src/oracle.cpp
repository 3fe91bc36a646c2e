#include "geomr/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "geomr/error.hpp"
#include "geomr/makespan.hpp"

namespace geomr {

namespace {

// All ways to split `total` units over `parts` slots, lexicographically
// ascending.
std::vector<std::vector<int>> compositions(int total, std::size_t parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(parts, 0);
  auto rec = [&](auto&& self, std::size_t slot, int left) -> void {
    if (slot + 1 == parts) {
      cur[slot] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[slot] = v;
      self(self, slot + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

}  // namespace

OracleResult brute_force_oracle(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                                double grid_step, OracleObjective objective) {
  require_valid(p, w);
  if (!(grid_step > 0.0) || grid_step > 1.0) throw Error("grid step must lie in (0, 1]");
  const double units = 1.0 / grid_step;
  const int n = static_cast<int>(std::lround(units));
  if (std::abs(units - n) > 1e-9 * units) throw Error("grid step must divide 1 evenly");
  const std::size_t largest = std::max({p.num_sources(), p.num_mappers(), p.num_reducers()});
  const std::size_t limit = grid_step >= 0.05 - 1e-12 ? 3 : grid_step >= 0.01 - 1e-12 ? 2 : 0;
  if (largest > limit) {
    throw InstanceTooLargeError("brute-force oracle supports at most 3 nodes per role at grid step >= 0.05 "
                                "and 2 at grid step >= 0.01");
  }

  const auto rows_x = compositions(n, p.num_mappers());
  const auto rows_y = objective == OracleObjective::PushTime ? std::vector<std::vector<int>>{}
                                                             : compositions(n, p.num_reducers());
  const std::size_t num_s = p.num_sources();
  const bool search_y = objective == OracleObjective::Makespan;
  // Odometer over (row choice for every source, y choice); the last digit
  // moves fastest, so plans are visited in lexicographic order.
  std::vector<std::size_t> digit(num_s + (search_y ? 1 : 0), 0);
  std::vector<std::size_t> radix(digit.size(), rows_x.size());
  if (search_y) radix.back() = rows_y.size();

  ExecutionPlan plan = uniform_plan(p);
  MakespanEvaluator eval(p, w, b);
  OracleResult best;
  best.value = INFINITY;
  const double dn = static_cast<double>(n);
  for (;;) {
    for (std::size_t i = 0; i < num_s; ++i) {
      const auto& r = rows_x[digit[i]];
      for (std::size_t j = 0; j < r.size(); ++j) plan.push_fraction(i, j) = r[j] / dn;
    }
    if (search_y) {
      const auto& r = rows_y[digit.back()];
      for (std::size_t k = 0; k < r.size(); ++k) plan.reducer_fraction[k] = r[k] / dn;
    }
    const auto& t = eval.timeline(plan);
    const double v = objective == OracleObjective::PushTime ? *std::max_element(t.push_end.begin(), t.push_end.end())
                                                            : t.makespan;
    ++best.evaluated;
    if (v < best.value) {
      best.value = v;
      best.plan = plan;
    }
    std::size_t d = digit.size();
    while (d > 0) {
      --d;
      if (++digit[d] < radix[d]) break;
      digit[d] = 0;
      if (d == 0) return best;
    }
    if (digit.empty()) return best;
  }
}

}  // namespace geomr
