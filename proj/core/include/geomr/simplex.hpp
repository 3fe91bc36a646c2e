#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geomr/lp.hpp"

namespace geomr::lp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit };

const char* to_string(LpStatus s);

struct SimplexOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  long iteration_limit = 5'000'000;
  int refactor_interval = 100;
  // Pivots without a new best objective or infeasibility sum before pricing
  // switches to Bland's rule; 0 picks 2 * rows + 100. A cycle never sets a
  // new best, so it is always caught.
  long stall_before_bland = 0;
  // Use Bland's rule from the first iteration.
  bool always_bland = false;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  long iterations = 0;
};

// Snapshot of a simplex basis: which column sits in each row, and the
// nonbasic position of every column (structural columns, then one slack
// per row).
struct Basis {
  std::vector<int> basic;
  std::vector<std::int8_t> status;
};

// Bounded-variable revised simplex with an explicit basis inverse.
// Dual simplex is used whenever the current basis is dual feasible (the
// all-slack start of a problem with nonnegative costs, or any re-solve after
// bound changes); primal simplex with a composite phase 1 otherwise. Pricing
// is Dantzig's rule and falls back to Bland's rule when progress stalls,
// which rules out cycling.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearProgram& lp, SimplexOptions options = {});

  void set_bounds(int var, double lower, double upper);
  double lower(int var) const { return lo_[static_cast<std::size_t>(var)]; }
  double upper(int var) const { return up_[static_cast<std::size_t>(var)]; }

  void set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline) {
    options_.deadline = deadline;
  }

  LpResult solve();

  // Structural variable values of the last solve.
  std::span<const double> values() const { return {x_.data(), n_}; }
  double objective() const;

  Basis basis() const;
  void set_basis(const Basis& b);

  std::size_t num_rows() const noexcept { return m_; }
  std::size_t num_columns() const noexcept { return n_; }

 private:
  enum Status : std::int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kAtZero = 3 };

  template <typename F>
  void for_each_entry(std::size_t col, F&& f) const;

  void place_nonbasic(std::size_t col);
  void reinvert();
  void compute_primal();
  void compute_duals(std::span<const double> cost);
  double reduced_cost(std::size_t col, std::span<const double> cost) const;
  void ftran(std::size_t col, std::vector<double>& out) const;
  void pivot(std::size_t row, const std::vector<double>& alpha);
  bool dual_feasible();
  bool limits_hit(LpResult& result) const;
  long stall_window() const;
  void maybe_refactor(long iteration);

  LpStatus run_primal(LpResult& result);
  LpStatus run_dual(LpResult& result);

  SimplexOptions options_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::size_t> col_start_;
  std::vector<std::size_t> row_index_;
  std::vector<double> value_;
  std::vector<double> rhs_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;
  double offset_ = 0.0;

  std::vector<std::int8_t> status_;
  std::vector<int> basic_;  // column held by each row
  std::vector<int> pos_;    // row of a basic column, -1 otherwise
  std::vector<double> x_;
  std::vector<double> binv_;  // column-major m x m
  std::vector<double> pi_;
  bool need_reinvert_ = true;
  bool need_primal_ = true;
  long since_refactor_ = 0;

  std::vector<double> alpha_;
  std::vector<double> work_;
  std::vector<std::size_t> nz_;
};

// Convenience: solves a standalone LP from the all-slack basis.
LpResult solve_lp(const LinearProgram& lp, std::vector<double>& values, SimplexOptions options = {});

}  // namespace geomr::lp
