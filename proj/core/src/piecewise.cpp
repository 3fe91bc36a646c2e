#include "geomr/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geomr/error.hpp"

namespace geomr {

std::vector<double> breakpoints(int count, double lo, double hi) {
  if (count < 3) throw Error("breakpoint count must be at least 3, got " + std::to_string(count));
  if (!(hi > lo)) throw Error("breakpoint domain must have hi > lo");
  std::vector<double> bp(static_cast<std::size_t>(count));
  const double h = (hi - lo) / (count - 1);
  for (int t = 0; t < count; ++t) bp[static_cast<std::size_t>(t)] = lo + h * t;
  bp.back() = hi;
  return bp;
}

double tangent_envelope(std::span<const double> bp, double t) {
  double best = -INFINITY;
  for (double b : bp) best = std::max(best, 2.0 * b * t - b * b);
  return best;
}

double chord_interpolation(std::span<const double> bp, double t) {
  t = std::clamp(t, bp.front(), bp.back());
  auto hi = std::upper_bound(bp.begin(), bp.end(), t);
  if (hi == bp.end()) --hi;
  if (hi == bp.begin()) ++hi;
  const double b0 = *(hi - 1);
  const double b1 = *hi;
  // Chord of t^2 through (b0, b0^2) and (b1, b1^2).
  return (b0 + b1) * t - b0 * b1;
}

double quadratic_error_bound(int count, double lo, double hi) {
  const double h = (hi - lo) / (count - 1);
  return h * h / 4.0;
}

}  // namespace geomr
