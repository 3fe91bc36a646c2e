#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "geomr/branch_and_bound.hpp"
#include "geomr/error.hpp"
#include "geomr/lp.hpp"
#include "geomr/piecewise.hpp"
#include "geomr/simplex.hpp"

using namespace geomr;
using namespace geomr::lp;

namespace {

struct Box {
  LinearProgram lp;
  std::vector<double> cost;
};

// min c.x over rows a.x (<=|>=) b and 0 <= x <= u, all finite.
Box random_box(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> ub(0.5, 4.0);
  Box box;
  for (int v = 0; v < n; ++v) box.lp.add_variable("x" + std::to_string(v), 0.0, ub(rng));
  for (int r = 0; r < m; ++r) {
    std::vector<Term> terms;
    for (int v = 0; v < n; ++v) terms.push_back({v, std::round(coef(rng))});
    const Sense sense = r % 3 == 2 ? Sense::GreaterEqual : Sense::LessEqual;
    box.lp.add_constraint("r" + std::to_string(r), std::move(terms), sense, std::round(coef(rng)) + 2.0);
  }
  for (int v = 0; v < n; ++v) {
    box.cost.push_back(std::round(coef(rng)));
    box.lp.set_objective(v, box.cost.back());
  }
  return box;
}

// Gaussian elimination with partial pivoting; nullopt when singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-10) return std::nullopt;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Optimum by enumerating every basic solution of the bounded polytope.
std::optional<double> vertex_oracle(const LinearProgram& lp, const std::vector<double>& cost) {
  const std::size_t n = lp.num_variables();
  // Every hyperplane: rows, then x_v = lower, then x_v = upper.
  std::vector<std::vector<double>> planes;
  std::vector<double> rhs;
  for (const auto& c : lp.constraints) {
    std::vector<double> row(n, 0.0);
    for (const auto& t : c.terms) row[static_cast<std::size_t>(t.var)] += t.coef;
    planes.push_back(row);
    rhs.push_back(c.rhs);
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (double bound : {lp.variables[v].lower, lp.variables[v].upper}) {
      std::vector<double> row(n, 0.0);
      row[v] = 1.0;
      planes.push_back(row);
      rhs.push_back(bound);
    }
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t v = 0; v < n; ++v)
      if (x[v] < lp.variables[v].lower - 1e-9 || x[v] > lp.variables[v].upper + 1e-9) return false;
    for (const auto& c : lp.constraints) {
      double lhs = 0.0;
      for (const auto& t : c.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
      if (c.sense == Sense::LessEqual && lhs > c.rhs + 1e-9) return false;
      if (c.sense == Sense::GreaterEqual && lhs < c.rhs - 1e-9) return false;
      if (c.sense == Sense::Equal && std::abs(lhs - c.rhs) > 1e-9) return false;
    }
    return true;
  };
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  const std::size_t total = planes.size();
  // Odometer over increasing index tuples.
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i : pick) {
      a.push_back(planes[i]);
      b.push_back(rhs[i]);
    }
    if (auto x = solve_square(a, b); x && feasible(*x)) {
      double obj = 0.0;
      for (std::size_t v = 0; v < n; ++v) obj += cost[v] * (*x)[v];
      if (!best || obj < *best) best = obj;
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == total - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

}  // namespace

TEST(Simplex, AgreesWithVertexEnumeration) {
  std::mt19937_64 rng(2024);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 2 + (trial / 3) % 4;
    const auto box = random_box(rng, n, m);
    const auto expected = vertex_oracle(box.lp, box.cost);
    std::vector<double> x;
    const auto r = solve_lp(box.lp, x);
    if (!expected) {
      EXPECT_EQ(r.status, LpStatus::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(r.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, *expected, 1e-7 * std::max(1.0, std::abs(*expected))) << "trial " << trial;
    ++optimal;
  }
  EXPECT_GT(optimal, 100);
  EXPECT_GT(infeasible, 0);
}

TEST(Simplex, BlandOnlyPricingAgrees) {
  std::mt19937_64 rng(7);
  SimplexOptions bland;
  bland.always_bland = true;
  for (int trial = 0; trial < 100; ++trial) {
    const auto box = random_box(rng, 3, 4);
    std::vector<double> a, b;
    const auto ra = solve_lp(box.lp, a);
    const auto rb = solve_lp(box.lp, b, bland);
    ASSERT_EQ(ra.status, rb.status);
    if (ra.status == LpStatus::Optimal) EXPECT_NEAR(ra.objective, rb.objective, 1e-8);
  }
}

TEST(Simplex, WarmResolveAfterBoundChangeMatchesColdSolve) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto box = random_box(rng, 4, 4);
    SimplexSolver warm(box.lp);
    warm.solve();
    const int var = trial % 4;
    const double hi = box.lp.variables[static_cast<std::size_t>(var)].upper * u(rng);
    warm.set_bounds(var, 0.0, hi);
    const auto rw = warm.solve();
    box.lp.variables[static_cast<std::size_t>(var)].upper = hi;
    std::vector<double> x;
    const auto rc = solve_lp(box.lp, x);
    ASSERT_EQ(rw.status, rc.status) << "trial " << trial;
    if (rc.status == LpStatus::Optimal) EXPECT_NEAR(rw.objective, rc.objective, 1e-8) << "trial " << trial;
  }
}

TEST(Simplex, UnboundedIsReported) {
  LinearProgram lp;
  const int x = lp.add_variable("x", 0.0, kInfinity);
  const int y = lp.add_variable("y", 0.0, kInfinity);
  lp.add_constraint("c", {{x, 1.0}, {y, -1.0}}, Sense::LessEqual, 1.0);
  lp.set_objective(y, -1.0);
  std::vector<double> v;
  EXPECT_EQ(solve_lp(lp, v).status, LpStatus::Unbounded);
}

TEST(Simplex, EqualityRowsAndFreeVariables) {
  // min x + 2y with x + y = 3, x - y = 1 and y free.
  LinearProgram lp;
  const int x = lp.add_variable("x", 0.0, kInfinity);
  const int y = lp.add_variable("y", -kInfinity, kInfinity);
  lp.add_constraint("sum", {{x, 1.0}, {y, 1.0}}, Sense::Equal, 3.0);
  lp.add_constraint("diff", {{x, 1.0}, {y, -1.0}}, Sense::Equal, 1.0);
  lp.set_objective(x, 1.0);
  lp.set_objective(y, 2.0);
  std::vector<double> v;
  const auto r = solve_lp(lp, v);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(v[0], 2.0, 1e-12);
  EXPECT_NEAR(v[1], 1.0, 1e-12);
  EXPECT_NEAR(r.objective, 4.0, 1e-12);
}

TEST(BranchAndBound, PicksTheCheapestSegment) {
  // min t with t >= c_k z_k and exactly one z_k = 1. The relaxation spreads
  // z across all four to shrink the max; the integer optimum is min c_k.
  MixedIntegerProgram mip;
  auto& lp = mip.lp;
  const double cost[] = {5.0, 2.5, 3.0, 7.0};
  const int t = lp.add_variable("t", 0.0, kInfinity);
  SosGroup g{"g", {}, -1};
  std::vector<Term> one;
  for (int k = 0; k < 4; ++k) {
    const int z = lp.add_variable("z" + std::to_string(k), 0.0, 1.0);
    g.selectors.push_back(z);
    mip.binaries.push_back(z);
    one.push_back({z, 1.0});
    lp.add_constraint("cost" + std::to_string(k), {{t, 1.0}, {z, -cost[k]}}, Sense::GreaterEqual, 0.0);
  }
  g.exactly_one_row = lp.add_constraint("one", one, Sense::Equal, 1.0);
  lp.set_objective(t, 1.0);
  mip.sos_groups.push_back(g);
  const auto r = solve_branch_and_bound(mip, {}, {}, {});
  ASSERT_TRUE(r.incumbent.has_value());
  EXPECT_EQ(r.status, MipStatus::Optimal);
  EXPECT_NEAR(r.incumbent->objective, 2.5, 1e-9);
  EXPECT_NEAR(r.incumbent->values[2], 1.0, 1e-9);
  EXPECT_GT(r.nodes, 1);
}

TEST(BranchAndBound, UngroupedBinaryIsRejected) {
  MixedIntegerProgram mip;
  const int z = mip.lp.add_variable("z", 0.0, 1.0);
  mip.binaries.push_back(z);
  EXPECT_THROW(solve_branch_and_bound(mip, {}, {}, {}), SolverError);
}

TEST(LpFormat, HasEverySection) {
  MixedIntegerProgram mip;
  const int x = mip.lp.add_variable("x", 0.0, 2.0);
  const int z = mip.lp.add_variable("z", 0.0, 1.0);
  mip.binaries.push_back(z);
  mip.lp.add_constraint("c1", {{x, 1.0}, {z, -2.0}}, Sense::LessEqual, 0.5);
  mip.lp.set_objective(x, -1.0);
  std::ostringstream out;
  write_lp_format(mip, out);
  const auto text = out.str();
  for (const char* section : {"Minimize", "Subject To", "Bounds", "Binaries", "End"})
    EXPECT_NE(text.find(section), std::string::npos) << section;
  EXPECT_NE(text.find("c1:"), std::string::npos);
}

TEST(Piecewise, EstimatorsBracketTheSquare) {
  const auto bp = breakpoints(10, -0.5, 0.5);
  ASSERT_EQ(bp.size(), 10u);
  EXPECT_DOUBLE_EQ(bp.front(), -0.5);
  EXPECT_DOUBLE_EQ(bp.back(), 0.5);
  const double bound = quadratic_error_bound(10, -0.5, 0.5);
  double worst_chord = 0.0, worst_tangent = 0.0;
  for (int n = 0; n <= 9000; ++n) {
    const double t = -0.5 + n / 9000.0;
    const double lo = tangent_envelope(bp, t);
    const double hi = chord_interpolation(bp, t);
    EXPECT_LE(lo, t * t + 1e-15);
    EXPECT_GE(hi, t * t - 1e-15);
    worst_chord = std::max(worst_chord, hi - t * t);
    worst_tangent = std::max(worst_tangent, t * t - lo);
  }
  const double h = 1.0 / 9.0;
  EXPECT_NEAR(bound, h * h / 4.0, 1e-15);
  EXPECT_NEAR(worst_chord, bound, 1e-6);
  EXPECT_NEAR(worst_tangent, bound, 1e-6);
}

TEST(Piecewise, RejectsDegenerateSpecs) {
  EXPECT_THROW(breakpoints(2, 0.0, 1.0), Error);
  EXPECT_THROW(breakpoints(5, 1.0, 1.0), Error);
}
