#include "geomr/plan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "geomr/error.hpp"
#include "geomr/units.hpp"

namespace geomr {

Matrix ExecutionPlan::shuffle_fraction() const {
  Matrix m(push_fraction.cols(), reducer_fraction.size());
  for (std::size_t j = 0; j < m.rows(); ++j)
    std::copy(reducer_fraction.begin(), reducer_fraction.end(), m.row(j).begin());
  return m;
}

char to_char(Barrier b) {
  switch (b) {
    case Barrier::Global: return 'G';
    case Barrier::Local: return 'L';
    case Barrier::Pipelined: return 'P';
  }
  return '?';
}

Barrier parse_barrier(char c) {
  switch (c) {
    case 'G': case 'g': return Barrier::Global;
    case 'L': case 'l': return Barrier::Local;
    case 'P': case 'p': return Barrier::Pipelined;
    default: break;
  }
  throw Error(std::string("unknown barrier discipline '") + c + "' (expected G, L or P)");
}

BarrierConfig parse_barriers(std::string_view text) {
  std::string letters;
  for (char c : text)
    if (c != '-') letters.push_back(c);
  if (letters.size() != 3) {
    throw Error("barrier configuration \"" + std::string(text) +
                "\" must name three boundaries, e.g. G-P-L");
  }
  return {parse_barrier(letters[0]), parse_barrier(letters[1]), parse_barrier(letters[2])};
}

std::string to_string(const BarrierConfig& b) {
  return {to_char(b.push_map), '-', to_char(b.map_shuffle), '-', to_char(b.shuffle_reduce)};
}

namespace {

void check_fraction(ValidationResult& result, const std::string& where, double v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0)
    result.add(where, "fraction must lie in [0, 1], got " + format_double(v));
}

}  // namespace

ValidationResult validate_plan(const ExecutionPlan& plan, const PlatformGraph& p) {
  ValidationResult result;
  const auto& x = plan.push_fraction;
  if (x.rows() != p.num_sources() || x.cols() != p.num_mappers()) {
    result.add("push_fraction", "dimension mismatch: plan is " + std::to_string(x.rows()) + "x" +
                                    std::to_string(x.cols()) + ", platform has " +
                                    std::to_string(p.num_sources()) + " sources x " +
                                    std::to_string(p.num_mappers()) + " mappers");
  } else {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        check_fraction(result, "push_fraction[" + p.sources[i] + "][" + p.mappers[j] + "]", x(i, j));
        sum += x(i, j);
      }
      if (!(std::abs(sum - 1.0) <= kPlanSumTolerance))
        result.add("source row " + p.sources[i], "push fractions sum to " + format_double(sum) + ", expected 1");
    }
  }

  const auto& y = plan.reducer_fraction;
  if (y.size() != p.num_reducers()) {
    result.add("reducer_fraction", "dimension mismatch: plan has " + std::to_string(y.size()) +
                                       " reducer fractions, platform has " +
                                       std::to_string(p.num_reducers()) + " reducers");
  } else {
    double sum = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      check_fraction(result, "reducer_fraction[" + p.reducers[k] + "]", y[k]);
      sum += y[k];
    }
    if (!(std::abs(sum - 1.0) <= kPlanSumTolerance))
      result.add("reducer_fraction", "key-space fractions sum to " + format_double(sum) + ", expected 1");
  }
  return result;
}

void require_valid(const ExecutionPlan& plan, const PlatformGraph& p) {
  const auto result = validate_plan(plan, p);
  if (!result.ok()) throw InvalidPlanError("invalid execution plan:\n" + result.describe());
}

ExecutionPlan uniform_plan(const PlatformGraph& p) {
  ExecutionPlan plan;
  plan.push_fraction = Matrix(p.num_sources(), p.num_mappers(), 1.0 / static_cast<double>(p.num_mappers()));
  plan.reducer_fraction.assign(p.num_reducers(), 1.0 / static_cast<double>(p.num_reducers()));
  return plan;
}

ExecutionPlan affinity_plan(const PlatformGraph& p) {
  ExecutionPlan plan = uniform_plan(p);
  for (std::size_t i = 0; i < p.num_sources(); ++i) {
    const std::string cluster = p.cluster(p.sources[i]);
    std::vector<std::size_t> local;
    for (std::size_t j = 0; j < p.num_mappers(); ++j)
      if (p.cluster(p.mappers[j]) == cluster) local.push_back(j);
    if (local.empty()) {
      throw Error("affinity plan: cluster \"" + cluster + "\" of source " + p.sources[i] +
                  " has no mapper");
    }
    auto row = plan.push_fraction.row(i);
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t j : local) row[j] = 1.0 / static_cast<double>(local.size());
  }
  return plan;
}

namespace {

void renormalize_row(std::span<double> row, double tolerance) {
  for (double v : row)
    if (!(v >= -tolerance && v <= 1.0 + tolerance)) return;
  for (double& v : row) v = std::clamp(v, 0.0, 1.0);
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  if (sum > 0.0 && std::abs(sum - 1.0) <= tolerance)
    for (double& v : row) v /= sum;
}

}  // namespace

ExecutionPlan renormalized(ExecutionPlan plan, double tolerance) {
  for (std::size_t i = 0; i < plan.push_fraction.rows(); ++i)
    renormalize_row(plan.push_fraction.row(i), tolerance);
  renormalize_row(plan.reducer_fraction, tolerance);
  return plan;
}

void project_to_simplex(std::span<double> v) {
  if (v.empty()) return;
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t n = 0; n < sorted.size(); ++n) {
    cumulative += sorted[n];
    const double t = (cumulative - 1.0) / static_cast<double>(n + 1);
    if (sorted[n] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

bool lexicographically_less(const ExecutionPlan& a, const ExecutionPlan& b) {
  const auto xa = a.push_fraction.values();
  const auto xb = b.push_fraction.values();
  if (!std::equal(xa.begin(), xa.end(), xb.begin(), xb.end()))
    return std::lexicographical_compare(xa.begin(), xa.end(), xb.begin(), xb.end());
  return std::lexicographical_compare(a.reducer_fraction.begin(), a.reducer_fraction.end(),
                                      b.reducer_fraction.begin(), b.reducer_fraction.end());
}

}  // namespace geomr
