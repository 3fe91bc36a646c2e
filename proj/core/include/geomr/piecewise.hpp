#pragma once

#include <span>
#include <vector>

namespace geomr {

// Evenly spaced breakpoints used to approximate t^2 on a bounded interval.
struct PiecewiseSpec {
  int breakpoint_count = 10;
};

// `count` evenly spaced points from lo to hi inclusive. Throws Error when
// count < 3 or hi <= lo.
std::vector<double> breakpoints(int count, double lo, double hi);

// max_b (2 b t - b^2) over the breakpoints: the tangent under-estimator of t^2.
double tangent_envelope(std::span<const double> bp, double t);

// Linear interpolation of t^2 between the breakpoints bracketing t: the chord
// over-estimator. t is clamped to [bp.front(), bp.back()].
double chord_interpolation(std::span<const double> bp, double t);

// Largest gap between t^2 and either estimator above: h^2 / 4 for spacing h.
double quadratic_error_bound(int count, double lo, double hi);

}  // namespace geomr
