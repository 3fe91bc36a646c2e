#include "geomr/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "geomr/error.hpp"

namespace geomr::lp {

const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::TimeLimit: return "time-limit";
    case MipStatus::NodeLimit: return "node-limit";
    case MipStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

struct Node {
  long id = 0;
  long parent = -1;
  double bound = -kInfinity;
  std::vector<std::pair<int, int>> range;  // selector range kept open, per group
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

constexpr double kIntegrality = 1e-6;

}  // namespace

MipResult solve_branch_and_bound(const MixedIntegerProgram& mip, const BranchAndBoundOptions& options,
                                 const Heuristic& heuristic, std::vector<Incumbent> warm_start) {
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(options.time_limit));
  MipResult result;

  const auto valid = mip.validate();
  if (!valid.ok()) throw SolverError("malformed mixed integer program:\n" + valid.describe());
  {
    std::vector<char> grouped(mip.lp.num_variables(), 0);
    for (const auto& g : mip.sos_groups)
      for (int v : g.selectors) grouped[static_cast<std::size_t>(v)] = 1;
    for (int v : mip.binaries)
      if (!grouped[static_cast<std::size_t>(v)])
        throw SolverError("binary " + mip.lp.variables[static_cast<std::size_t>(v)].name +
                          " is not in an exactly-one group");
  }

  SimplexOptions simplex = options.simplex;
  simplex.deadline = deadline;
  SimplexSolver solver(mip.lp, simplex);

  std::optional<Incumbent>& best = result.incumbent;
  auto consider = [&](Incumbent cand) {
    if (!std::isfinite(cand.objective)) return;
    if (!best) {
      best = std::move(cand);
      return;
    }
    const double tie = 1e-12 * std::max(1.0, std::abs(best->objective));
    if (cand.objective < best->objective - tie ||
        (cand.objective <= best->objective + tie &&
         std::lexicographical_compare(cand.values.begin(), cand.values.end(), best->values.begin(),
                                      best->values.end()))) {
      best = std::move(cand);
    }
  };
  for (auto& w : warm_start) consider(std::move(w));
  auto prune_threshold = [&]() {
    return best ? best->objective - options.relative_gap * std::abs(best->objective) : kInfinity;
  };

  const std::size_t groups = mip.sos_groups.size();
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  {
    Node root;
    root.range.resize(groups);
    for (std::size_t g = 0; g < groups; ++g)
      root.range[g] = {0, static_cast<int>(mip.sos_groups[g].selectors.size()) - 1};
    open.push(std::move(root));
  }
  long next_id = 1;
  long last_solved = -1;
  double pruned_bound = kInfinity;
  bool interrupted = false;
  result.status = MipStatus::Optimal;

  while (!open.empty()) {
    if (Clock::now() >= deadline) {
      result.status = MipStatus::TimeLimit;
      interrupted = true;
      break;
    }
    if (options.node_limit >= 0 && result.nodes >= options.node_limit) {
      result.status = MipStatus::NodeLimit;
      interrupted = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= prune_threshold()) {
      pruned_bound = std::min(pruned_bound, node.bound);
      continue;
    }

    for (std::size_t g = 0; g < groups; ++g) {
      const auto& sel = mip.sos_groups[g].selectors;
      for (int s = 0; s < static_cast<int>(sel.size()); ++s) {
        const bool allowed = s >= node.range[g].first && s <= node.range[g].second;
        solver.set_bounds(sel[static_cast<std::size_t>(s)], 0.0, allowed ? 1.0 : 0.0);
      }
    }
    if (node.basis && node.parent != last_solved) solver.set_basis(*node.basis);
    const LpResult lp = solver.solve();
    ++result.nodes;
    result.lp_iterations += lp.iterations;
    last_solved = node.id;

    if (lp.status == LpStatus::TimeLimit || lp.status == LpStatus::IterationLimit) {
      result.status = MipStatus::TimeLimit;
      open.push(std::move(node));
      interrupted = true;
      break;
    }
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) throw SolverError("linear relaxation is unbounded");

    const double bound = std::max(lp.objective, node.bound);
    const auto values = solver.values();
    if (heuristic) {
      if (auto cand = heuristic(values)) consider(std::move(*cand));
    }

    // Most fractional group.
    std::size_t branch = groups;
    double most = kIntegrality;
    for (std::size_t g = 0; g < groups; ++g) {
      double top = 0.0;
      for (int v : mip.sos_groups[g].selectors) top = std::max(top, values[static_cast<std::size_t>(v)]);
      const double frac = 1.0 - top;
      if (frac > most) {
        most = frac;
        branch = g;
      }
    }
    if (branch == groups) {
      if (!heuristic) consider({lp.objective, std::vector<double>(values.begin(), values.end())});
      continue;
    }
    if (bound >= prune_threshold()) {
      pruned_bound = std::min(pruned_bound, bound);
      continue;
    }

    const auto& sel = mip.sos_groups[branch].selectors;
    const auto [lo, hi] = node.range[branch];
    double mean = 0.0;
    double mass = 0.0;
    for (int s = lo; s <= hi; ++s) {
      const double z = values[static_cast<std::size_t>(sel[static_cast<std::size_t>(s)])];
      mean += s * z;
      mass += z;
    }
    if (mass > 0.0) mean /= mass;
    const int split = std::clamp(static_cast<int>(std::floor(mean)), lo, hi - 1);

    auto basis = std::make_shared<const Basis>(solver.basis());
    for (int side = 0; side < 2; ++side) {
      Node child;
      child.id = next_id++;
      child.parent = node.id;
      child.bound = bound;
      child.range = node.range;
      child.range[branch] = side == 0 ? std::pair{lo, split} : std::pair{split + 1, hi};
      child.basis = basis;
      open.push(std::move(child));
    }
  }

  double bound = pruned_bound;
  if (interrupted) {
    while (!open.empty()) {
      bound = std::min(bound, open.top().bound);
      open.pop();
    }
  }
  if (best) {
    bound = std::min(bound, best->objective);
    result.best_bound = bound;
    result.gap = std::max(0.0, (best->objective - bound) / std::max(std::abs(best->objective), 1e-300));
  } else {
    result.best_bound = bound;
    result.gap = kInfinity;
    if (!interrupted) result.status = MipStatus::Infeasible;
  }
  result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace geomr::lp
