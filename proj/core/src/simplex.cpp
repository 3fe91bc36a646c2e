#include "geomr/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "geomr/error.hpp"

namespace geomr::lp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::TimeLimit: return "time-limit";
  }
  return "unknown";
}

SimplexSolver::SimplexSolver(const LinearProgram& lp, SimplexOptions options)
    : options_(options), n_(lp.num_variables()), m_(lp.num_constraints()) {
  const std::size_t total = n_ + m_;
  lo_.resize(total);
  up_.resize(total);
  cost_.assign(total, 0.0);
  offset_ = lp.objective_offset;
  for (std::size_t j = 0; j < n_; ++j) {
    lo_[j] = lp.variables[j].lower;
    up_[j] = lp.variables[j].upper;
    cost_[j] = lp.objective[j];
  }

  std::vector<std::size_t> count(n_ + 1, 0);
  for (const auto& c : lp.constraints)
    for (const auto& t : c.terms) ++count[static_cast<std::size_t>(t.var) + 1];
  col_start_.assign(n_ + 1, 0);
  for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j + 1];
  row_index_.resize(col_start_[n_]);
  value_.resize(col_start_[n_]);
  std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
  rhs_.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    const auto& c = lp.constraints[i];
    for (const auto& t : c.terms) {
      const auto at = fill[static_cast<std::size_t>(t.var)]++;
      row_index_[at] = i;
      value_[at] = t.coef;
    }
    rhs_[i] = c.rhs;
    // Row i reads a.x + s_i = rhs.
    switch (c.sense) {
      case Sense::LessEqual: lo_[n_ + i] = 0.0; up_[n_ + i] = kInfinity; break;
      case Sense::GreaterEqual: lo_[n_ + i] = -kInfinity; up_[n_ + i] = 0.0; break;
      case Sense::Equal: lo_[n_ + i] = 0.0; up_[n_ + i] = 0.0; break;
    }
  }

  status_.assign(total, kAtLower);
  basic_.resize(m_);
  pos_.assign(total, -1);
  x_.assign(total, 0.0);
  for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
  for (std::size_t i = 0; i < m_; ++i) {
    basic_[i] = static_cast<int>(n_ + i);
    status_[n_ + i] = kBasic;
    pos_[n_ + i] = static_cast<int>(i);
  }
  binv_.assign(m_ * m_, 0.0);
  alpha_.resize(m_);
  work_.resize(m_);
  pi_.resize(m_);
}

template <typename F>
void SimplexSolver::for_each_entry(std::size_t col, F&& f) const {
  if (col < n_) {
    for (std::size_t at = col_start_[col]; at < col_start_[col + 1]; ++at) f(row_index_[at], value_[at]);
  } else {
    f(col - n_, 1.0);
  }
}

void SimplexSolver::place_nonbasic(std::size_t col) {
  const double lo = lo_[col];
  const double up = up_[col];
  if (cost_[col] < 0.0 && std::isfinite(up)) {
    status_[col] = kAtUpper;
    x_[col] = up;
  } else if (std::isfinite(lo)) {
    status_[col] = kAtLower;
    x_[col] = lo;
  } else if (std::isfinite(up)) {
    status_[col] = kAtUpper;
    x_[col] = up;
  } else {
    status_[col] = kAtZero;
    x_[col] = 0.0;
  }
}

void SimplexSolver::set_bounds(int var, double lower, double upper) {
  const auto j = static_cast<std::size_t>(var);
  lo_[j] = lower;
  up_[j] = upper;
  if (status_[j] != kBasic) {
    if (status_[j] == kAtLower && std::isfinite(lower)) {
      x_[j] = lower;
    } else if (status_[j] == kAtUpper && std::isfinite(upper)) {
      x_[j] = upper;
    } else {
      place_nonbasic(j);
    }
  }
  need_primal_ = true;
}

double SimplexSolver::objective() const {
  double z = offset_;
  for (std::size_t j = 0; j < n_; ++j) z += cost_[j] * x_[j];
  return z;
}

Basis SimplexSolver::basis() const { return {basic_, status_}; }

void SimplexSolver::set_basis(const Basis& b) {
  if (b.basic.size() != m_ || b.status.size() != n_ + m_)
    throw SolverError("basis dimension does not match the linear program");
  basic_ = b.basic;
  status_ = b.status;
  std::fill(pos_.begin(), pos_.end(), -1);
  for (std::size_t r = 0; r < m_; ++r) pos_[static_cast<std::size_t>(basic_[r])] = static_cast<int>(r);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic) continue;
    if (status_[j] == kAtLower && std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
    } else if (status_[j] == kAtUpper && std::isfinite(up_[j])) {
      x_[j] = up_[j];
    } else {
      place_nonbasic(j);
    }
  }
  need_reinvert_ = true;
  need_primal_ = true;
}

void SimplexSolver::ftran(std::size_t col, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for_each_entry(col, [&](std::size_t i, double v) {
    const double* c = binv_.data() + i * m_;
    for (std::size_t r = 0; r < m_; ++r) out[r] += v * c[r];
  });
}

void SimplexSolver::pivot(std::size_t row, const std::vector<double>& alpha) {
  nz_.clear();
  for (std::size_t r = 0; r < m_; ++r)
    if (r != row && alpha[r] != 0.0) nz_.push_back(r);
  const double inv = 1.0 / alpha[row];
  for (std::size_t c = 0; c < m_; ++c) {
    double* col = binv_.data() + c * m_;
    if (col[row] == 0.0) continue;
    const double v = col[row] * inv;
    col[row] = v;
    for (std::size_t r : nz_) col[r] -= alpha[r] * v;
  }
}

void SimplexSolver::reinvert() {
  // Start from the all-slack basis and pivot in the structural basics, each
  // into the row (among those whose slack must leave) with the largest
  // pivot element.
  std::fill(binv_.begin(), binv_.end(), 0.0);
  for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
  std::vector<char> row_free(m_, 0);
  std::vector<int> structural;
  for (std::size_t r = 0; r < m_; ++r) {
    const auto col = static_cast<std::size_t>(basic_[r]);
    if (col < n_) structural.push_back(basic_[r]);
  }
  for (std::size_t i = 0; i < m_; ++i) row_free[i] = status_[n_ + i] == kBasic ? 0 : 1;
  std::vector<int> holder(m_);
  for (std::size_t i = 0; i < m_; ++i) holder[i] = static_cast<int>(n_ + i);

  for (int q : structural) {
    ftran(static_cast<std::size_t>(q), alpha_);
    std::size_t best = m_;
    double best_abs = 1e-9;
    for (std::size_t r = 0; r < m_; ++r) {
      if (!row_free[r]) continue;
      const double a = std::abs(alpha_[r]);
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    const auto qc = static_cast<std::size_t>(q);
    if (best == m_) {
      // Dependent column: drop it from the basis.
      status_[qc] = kAtLower;
      place_nonbasic(qc);
      continue;
    }
    pivot(best, alpha_);
    holder[best] = q;
    row_free[best] = 0;
  }
  std::fill(pos_.begin(), pos_.end(), -1);
  for (std::size_t r = 0; r < m_; ++r) {
    basic_[r] = holder[r];
    const auto col = static_cast<std::size_t>(holder[r]);
    status_[col] = kBasic;
    pos_[col] = static_cast<int>(r);
  }
  // Slacks displaced from the basis by this reconstruction.
  for (std::size_t i = 0; i < m_; ++i) {
    const auto col = n_ + i;
    if (status_[col] == kBasic && pos_[col] < 0) place_nonbasic(col);
  }
  need_reinvert_ = false;
  since_refactor_ = 0;
}

void SimplexSolver::compute_primal() {
  std::vector<double>& r = work_;
  r = rhs_;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic || x_[j] == 0.0) continue;
    const double xj = x_[j];
    for_each_entry(j, [&](std::size_t i, double v) { r[i] -= v * xj; });
  }
  std::fill(alpha_.begin(), alpha_.end(), 0.0);
  for (std::size_t c = 0; c < m_; ++c) {
    if (r[c] == 0.0) continue;
    const double* col = binv_.data() + c * m_;
    for (std::size_t row = 0; row < m_; ++row) alpha_[row] += r[c] * col[row];
  }
  for (std::size_t row = 0; row < m_; ++row) x_[static_cast<std::size_t>(basic_[row])] = alpha_[row];
  need_primal_ = false;
}

void SimplexSolver::compute_duals(std::span<const double> cost) {
  std::fill(pi_.begin(), pi_.end(), 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    const double cb = cost[static_cast<std::size_t>(basic_[r])];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c < m_; ++c) pi_[c] += cb * binv_[c * m_ + r];
  }
}

double SimplexSolver::reduced_cost(std::size_t col, std::span<const double> cost) const {
  double d = cost[col];
  for_each_entry(col, [&](std::size_t i, double v) { d -= pi_[i] * v; });
  return d;
}

bool SimplexSolver::dual_feasible() {
  compute_duals(cost_);
  const double tol = options_.dual_tolerance;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic || lo_[j] == up_[j]) continue;
    const double d = reduced_cost(j, cost_);
    switch (status_[j]) {
      case kAtLower: if (d < -tol) return false; break;
      case kAtUpper: if (d > tol) return false; break;
      case kAtZero: if (std::abs(d) > tol) return false; break;
      default: break;
    }
  }
  return true;
}

bool SimplexSolver::limits_hit(LpResult& result) const {
  if (result.iterations >= options_.iteration_limit) {
    result.status = LpStatus::IterationLimit;
    return true;
  }
  if (options_.deadline && (result.iterations & 15) == 0 &&
      std::chrono::steady_clock::now() >= *options_.deadline) {
    result.status = LpStatus::TimeLimit;
    return true;
  }
  return false;
}

long SimplexSolver::stall_window() const {
  return options_.stall_before_bland > 0 ? options_.stall_before_bland : 2 * static_cast<long>(m_) + 100;
}

namespace {

// Counts pivots since the objective or the infeasibility sum last reached
// a new best.
class StallTracker {
 public:
  // Both measures are to be minimized.
  void observe(double objective, double infeasibility) {
    const bool better_obj = objective < best_obj_ - 1e-12 * (1.0 + std::abs(objective));
    const bool better_inf = infeasibility < best_inf_ - 1e-12 * (1.0 + infeasibility);
    if (better_obj) best_obj_ = objective;
    if (better_inf) best_inf_ = infeasibility;
    stalled_ = better_obj || better_inf ? 0 : stalled_ + 1;
  }
  void reset() {
    best_obj_ = best_inf_ = INFINITY;
    stalled_ = 0;
  }
  long stalled() const { return stalled_; }

 private:
  double best_obj_ = INFINITY;
  double best_inf_ = INFINITY;
  long stalled_ = 0;
};

}  // namespace

void SimplexSolver::maybe_refactor(long) {
  if (since_refactor_ >= options_.refactor_interval) {
    reinvert();
    compute_primal();
  }
}

LpStatus SimplexSolver::run_dual(LpResult& result) {
  const double ptol = options_.primal_tolerance;
  const double ztol = options_.pivot_tolerance;
  std::vector<double> rho(m_);
  StallTracker stall;
  const long window = stall_window();
  for (;;) {
    if (limits_hit(result)) return result.status;
    if (since_refactor_ >= options_.refactor_interval) {
      maybe_refactor(result.iterations);
      if (!dual_feasible()) return LpStatus::IterationLimit;  // hand over to primal
    }
    const bool bland = options_.always_bland || stall.stalled() >= window;
    double total_infeasibility = 0.0;

    // Leaving row.
    std::size_t leave = m_;
    double worst = 0.0;
    int leave_col = -1;
    for (std::size_t r = 0; r < m_; ++r) {
      const auto col = static_cast<std::size_t>(basic_[r]);
      const double v = x_[col];
      double infeas = 0.0;
      if (v < lo_[col] - ptol) infeas = lo_[col] - v;
      else if (v > up_[col] + ptol) infeas = v - up_[col];
      if (infeas <= 0.0) continue;
      total_infeasibility += infeas;
      if (bland) {
        if (leave_col < 0 || basic_[r] < leave_col) {
          leave = r;
          leave_col = basic_[r];
        }
      } else if (infeas > worst) {
        worst = infeas;
        leave = r;
      }
    }
    if (leave == m_) return LpStatus::Optimal;
    // The dual objective rises; track its negation.
    stall.observe(-objective(), total_infeasibility);
    const auto lcol = static_cast<std::size_t>(basic_[leave]);
    const bool to_lower = x_[lcol] < lo_[lcol];
    const double target = to_lower ? lo_[lcol] : up_[lcol];

    for (std::size_t c = 0; c < m_; ++c) rho[c] = binv_[c * m_ + leave];
    compute_duals(cost_);

    std::size_t enter = n_ + m_;
    double best_ratio = kInfinity;
    double best_pivot = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      const auto st = status_[j];
      if (st == kBasic || lo_[j] == up_[j]) continue;
      double arj = 0.0;
      for_each_entry(j, [&](std::size_t i, double v) { arj += rho[i] * v; });
      if (std::abs(arj) <= ztol) continue;
      // x_leave moves by -arj per unit increase of x_j.
      bool eligible = false;
      if (to_lower) {
        eligible = (st == kAtLower && arj < 0.0) || (st == kAtUpper && arj > 0.0) || st == kAtZero;
      } else {
        eligible = (st == kAtLower && arj > 0.0) || (st == kAtUpper && arj < 0.0) || st == kAtZero;
      }
      if (!eligible) continue;
      const double dj = reduced_cost(j, cost_);
      const double ratio = std::max(std::abs(dj), 0.0) / std::abs(arj);
      const bool better =
          ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && (bland ? j < enter : std::abs(arj) > best_pivot));
      if (better) {
        best_ratio = ratio;
        best_pivot = std::abs(arj);
        enter = j;
      }
    }
    if (enter == n_ + m_) return LpStatus::Infeasible;

    ftran(enter, alpha_);
    const double arq = alpha_[leave];
    if (std::abs(arq) <= ztol) {
      // Numerical disagreement between the row and the column; refactor.
      reinvert();
      compute_primal();
      if (!dual_feasible()) return LpStatus::IterationLimit;
      ++result.iterations;
      continue;
    }
    const double theta = (x_[lcol] - target) / arq;
    x_[enter] += theta;
    for (std::size_t r = 0; r < m_; ++r)
      if (alpha_[r] != 0.0) x_[static_cast<std::size_t>(basic_[r])] -= theta * alpha_[r];
    x_[lcol] = target;
    status_[lcol] = to_lower ? kAtLower : kAtUpper;
    pos_[lcol] = -1;
    pivot(leave, alpha_);
    basic_[leave] = static_cast<int>(enter);
    status_[enter] = kBasic;
    pos_[enter] = static_cast<int>(leave);
    ++since_refactor_;
    ++result.iterations;
  }
}

LpStatus SimplexSolver::run_primal(LpResult& result) {
  const double ptol = options_.primal_tolerance;
  const double dtol = options_.dual_tolerance;
  const double ztol = options_.pivot_tolerance;
  std::vector<double> phase_cost(n_ + m_, 0.0);
  StallTracker stall;
  const long window = stall_window();
  bool was_infeasible = true;
  for (;;) {
    if (limits_hit(result)) return result.status;
    maybe_refactor(result.iterations);

    bool infeasible = false;
    double total_infeasibility = 0.0;
    std::fill(phase_cost.begin(), phase_cost.end(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto col = static_cast<std::size_t>(basic_[r]);
      if (x_[col] < lo_[col] - ptol) {
        phase_cost[col] = -1.0;
        infeasible = true;
        total_infeasibility += lo_[col] - x_[col];
      } else if (x_[col] > up_[col] + ptol) {
        phase_cost[col] = 1.0;
        infeasible = true;
        total_infeasibility += x_[col] - up_[col];
      }
    }
    if (infeasible != was_infeasible) stall.reset();
    was_infeasible = infeasible;
    stall.observe(infeasible ? total_infeasibility : objective(), 0.0);
    const bool bland = options_.always_bland || stall.stalled() >= window;
    const std::span<const double> cost = infeasible ? std::span<const double>(phase_cost)
                                                    : std::span<const double>(cost_);
    compute_duals(cost);

    std::size_t enter = n_ + m_;
    double best = 0.0;
    int dir = 0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      const auto st = status_[j];
      if (st == kBasic || lo_[j] == up_[j]) continue;
      const double dj = reduced_cost(j, cost);
      int dj_dir = 0;
      if (st == kAtLower && dj < -dtol) dj_dir = 1;
      else if (st == kAtUpper && dj > dtol) dj_dir = -1;
      else if (st == kAtZero && std::abs(dj) > dtol) dj_dir = dj < 0.0 ? 1 : -1;
      if (dj_dir == 0) continue;
      if (bland) {
        enter = j;
        dir = dj_dir;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        enter = j;
        dir = dj_dir;
      }
    }
    if (enter == n_ + m_) return infeasible ? LpStatus::Infeasible : LpStatus::Optimal;

    ftran(enter, alpha_);
    double theta = up_[enter] - lo_[enter];  // bound flip
    std::size_t leave = m_;
    bool leave_lower = false;
    double leave_pivot = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = alpha_[r];
      if (std::abs(a) <= ztol) continue;
      const auto col = static_cast<std::size_t>(basic_[r]);
      const double delta = -dir * a;
      const double v = x_[col];
      double limit = kInfinity;
      bool at_lower = false;
      if (infeasible && v < lo_[col] - ptol) {
        if (delta > 0.0) {
          limit = (lo_[col] - v) / delta;
          at_lower = true;
        }
      } else if (infeasible && v > up_[col] + ptol) {
        if (delta < 0.0) limit = (v - up_[col]) / -delta;
      } else if (delta < 0.0 && std::isfinite(lo_[col])) {
        limit = std::max(v - lo_[col], 0.0) / -delta;
        at_lower = true;
      } else if (delta > 0.0 && std::isfinite(up_[col])) {
        limit = std::max(up_[col] - v, 0.0) / delta;
      }
      if (!std::isfinite(limit)) continue;
      const bool better =
          limit < theta - 1e-12 ||
          (leave != m_ && limit <= theta + 1e-12 &&
           (bland ? basic_[r] < basic_[leave] : std::abs(a) > leave_pivot));
      if (better) {
        theta = limit;
        leave = r;
        leave_lower = at_lower;
        leave_pivot = std::abs(a);
      }
    }
    if (!std::isfinite(theta)) {
      if (infeasible) throw SolverError("phase 1 of the primal simplex became unbounded");
      return LpStatus::Unbounded;
    }

    x_[enter] += dir * theta;
    for (std::size_t r = 0; r < m_; ++r)
      if (alpha_[r] != 0.0) x_[static_cast<std::size_t>(basic_[r])] -= dir * theta * alpha_[r];
    ++result.iterations;
    if (leave == m_) {
      status_[enter] = dir > 0 ? kAtUpper : kAtLower;
      x_[enter] = dir > 0 ? up_[enter] : lo_[enter];
      continue;
    }
    const auto lcol = static_cast<std::size_t>(basic_[leave]);
    status_[lcol] = leave_lower ? kAtLower : kAtUpper;
    x_[lcol] = leave_lower ? lo_[lcol] : up_[lcol];
    pos_[lcol] = -1;
    pivot(leave, alpha_);
    basic_[leave] = static_cast<int>(enter);
    status_[enter] = kBasic;
    pos_[enter] = static_cast<int>(leave);
    ++since_refactor_;
  }
}

LpResult SimplexSolver::solve() {
  LpResult result;
  if (need_reinvert_) reinvert();
  compute_primal();
  LpStatus status = LpStatus::IterationLimit;
  bool ran_dual = false;
  if (dual_feasible()) {
    ran_dual = true;
    status = run_dual(result);
    if (status == LpStatus::TimeLimit || status == LpStatus::Infeasible) {
      result.status = status;
      return result;
    }
    if (result.status == LpStatus::IterationLimit && result.iterations >= options_.iteration_limit) {
      return result;
    }
  }
  if (!ran_dual || status != LpStatus::Optimal || !dual_feasible()) {
    // Primal simplex either from scratch or to clean up after the dual pass.
    result.status = LpStatus::Optimal;
    status = run_primal(result);
  } else {
    status = LpStatus::Optimal;
  }
  result.status = status;
  // Refresh basic values against the accumulated update error.
  if (result.iterations > 0) compute_primal();
  result.objective = objective();
  return result;
}

LpResult solve_lp(const LinearProgram& lp, std::vector<double>& values, SimplexOptions options) {
  SimplexSolver solver(lp, options);
  const auto result = solver.solve();
  const auto v = solver.values();
  values.assign(v.begin(), v.end());
  return result;
}

}  // namespace geomr::lp
