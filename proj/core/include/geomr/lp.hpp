#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "geomr/platform.hpp"

namespace geomr::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// Minimization problem over bounded continuous variables.
class LinearProgram {
 public:
  int add_variable(std::string name, double lower, double upper);
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);
  void set_objective(int var, double coef);

  std::size_t num_variables() const noexcept { return variables.size(); }
  std::size_t num_constraints() const noexcept { return constraints.size(); }

  // Every term references a declared variable and every bound pair is
  // ordered.
  ValidationResult validate() const;

  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<double> objective;  // one coefficient per variable
  double objective_offset = 0.0;
};

// Ordered selector binaries of one approximated concave term; exactly one of
// them is 1, enforced by the constraint at `exactly_one_row`.
struct SosGroup {
  std::string name;
  std::vector<int> selectors;
  int exactly_one_row = -1;
};

struct MixedIntegerProgram {
  LinearProgram lp;
  std::vector<int> binaries;
  std::vector<SosGroup> sos_groups;

  ValidationResult validate() const;
};

// CPLEX LP text format: Minimize / Subject To / Bounds / Binaries / End.
void write_lp_format(const MixedIntegerProgram& mip, std::ostream& out);

}  // namespace geomr::lp
