#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "geomr/matrix.hpp"
#include "geomr/platform.hpp"

namespace geomr {

// Push fractions x[i][j] (source i -> mapper j) and the reducer key-space
// fractions y[k]. Every mapper shuffles with the same y, so the shuffle
// matrix is never stored and the one-reducer-per-key rule cannot be broken.
struct ExecutionPlan {
  Matrix push_fraction;                 // |S| x |M|
  std::vector<double> reducer_fraction;  // |R|

  // Expanded |M| x |R| shuffle matrix (each row equals reducer_fraction).
  Matrix shuffle_fraction() const;

  friend bool operator==(const ExecutionPlan&, const ExecutionPlan&) = default;
};

inline constexpr double kPlanSumTolerance = 1e-9;

enum class Barrier { Global, Local, Pipelined };

// Discipline at each of the three phase boundaries.
struct BarrierConfig {
  Barrier push_map = Barrier::Global;
  Barrier map_shuffle = Barrier::Global;
  Barrier shuffle_reduce = Barrier::Global;

  static BarrierConfig all(Barrier b) { return {b, b, b}; }

  friend bool operator==(const BarrierConfig&, const BarrierConfig&) = default;
};

char to_char(Barrier b);
Barrier parse_barrier(char c);

// "G-P-L" <-> {Global, Pipelined, Local}. Also accepts "GPL".
BarrierConfig parse_barriers(std::string_view text);
std::string to_string(const BarrierConfig& b);

ValidationResult validate_plan(const ExecutionPlan& plan, const PlatformGraph& p);

// Throws InvalidPlanError describing every violation.
void require_valid(const ExecutionPlan& plan, const PlatformGraph& p);

// x[i][j] = 1/|M|, y[k] = 1/|R|.
ExecutionPlan uniform_plan(const PlatformGraph& p);

// Each source splits its data equally over the mappers in its own cluster;
// y stays uniform. Throws Error if a source's cluster has no mapper.
ExecutionPlan affinity_plan(const PlatformGraph& p);

// Rows whose entries are within `tolerance` of [0, 1] and whose sum is
// within `tolerance` of 1 are clamped and rescaled to sum to 1. Rows further
// off are left alone for validate_plan to report.
ExecutionPlan renormalized(ExecutionPlan plan, double tolerance = kPlanSumTolerance);

// Euclidean projection of v onto the probability simplex.
void project_to_simplex(std::span<double> v);

// Lexicographic order on (x row-major, then y); used to break ties among
// plans with equal makespan.
bool lexicographically_less(const ExecutionPlan& a, const ExecutionPlan& b);

}  // namespace geomr
