#include "geomr/lp.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <set>

#include "geomr/units.hpp"

namespace geomr::lp {

int LinearProgram::add_variable(std::string name, double lower, double upper) {
  variables.push_back({std::move(name), lower, upper});
  objective.push_back(0.0);
  return static_cast<int>(variables.size()) - 1;
}

int LinearProgram::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  constraints.push_back({std::move(name), std::move(terms), sense, rhs});
  return static_cast<int>(constraints.size()) - 1;
}

void LinearProgram::set_objective(int var, double coef) { objective.at(static_cast<std::size_t>(var)) = coef; }

ValidationResult LinearProgram::validate() const {
  ValidationResult result;
  const int n = static_cast<int>(variables.size());
  if (objective.size() != variables.size()) result.add("objective", "one coefficient per variable expected");
  for (const auto& v : variables) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      result.add("variable " + v.name, "bounds must satisfy lower <= upper");
  }
  for (const auto& c : constraints) {
    for (const auto& t : c.terms) {
      if (t.var < 0 || t.var >= n) result.add("constraint " + c.name, "references an undeclared variable");
      else if (!std::isfinite(t.coef)) result.add("constraint " + c.name, "non-finite coefficient");
    }
    if (!std::isfinite(c.rhs)) result.add("constraint " + c.name, "non-finite right-hand side");
  }
  return result;
}

ValidationResult MixedIntegerProgram::validate() const {
  ValidationResult result = lp.validate();
  const std::set<int> binary_set(binaries.begin(), binaries.end());
  for (int b : binaries) {
    if (b < 0 || b >= static_cast<int>(lp.num_variables())) result.add("binaries", "undeclared variable");
  }
  for (const auto& g : sos_groups) {
    for (int s : g.selectors)
      if (!binary_set.count(s)) result.add("group " + g.name, "selector is not declared binary");
    if (g.exactly_one_row < 0 || g.exactly_one_row >= static_cast<int>(lp.num_constraints())) {
      result.add("group " + g.name, "missing exactly-one constraint");
      continue;
    }
    const auto& row = lp.constraints[static_cast<std::size_t>(g.exactly_one_row)];
    std::set<int> in_row;
    bool unit = row.sense == Sense::Equal && row.rhs == 1.0;
    for (const auto& t : row.terms) {
      in_row.insert(t.var);
      unit = unit && t.coef == 1.0;
    }
    if (!unit || in_row != std::set<int>(g.selectors.begin(), g.selectors.end()))
      result.add("group " + g.name, "exactly-one constraint does not match the selectors");
  }
  return result;
}

namespace {

std::string lp_name(const std::string& raw) {
  static const std::string allowed = "!\"#$%&()/,.;?@_`'{}|~";
  std::string out;
  for (char c : raw) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || allowed.find(c) != std::string::npos;
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') out.insert(0, "v");
  return out;
}

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  bool first = true;
  std::size_t on_line = 0;
  for (const auto& [coef, name] : terms) {
    if (coef == 0.0) continue;
    out << (coef < 0 ? " - " : (first ? " " : " + ")) << format_double(std::abs(coef)) << ' ' << name;
    first = false;
    if (++on_line % 8 == 0) out << "\n   ";
  }
  if (first) out << " 0";
}

}  // namespace

void write_lp_format(const MixedIntegerProgram& mip, std::ostream& out) {
  const auto& lp = mip.lp;
  std::vector<std::string> names;
  names.reserve(lp.num_variables());
  for (const auto& v : lp.variables) names.push_back(lp_name(v.name));

  out << "\\ geomr execution-plan MIP\nMinimize\n obj:";
  std::vector<std::pair<double, std::string>> terms;
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    if (lp.objective[j] != 0.0) terms.emplace_back(lp.objective[j], names[j]);
  write_terms(out, terms);
  if (lp.objective_offset != 0.0) out << " + " << format_double(lp.objective_offset) << " __offset";
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
    const auto& c = lp.constraints[r];
    terms.clear();
    for (const auto& t : c.terms) terms.emplace_back(t.coef, names[static_cast<std::size_t>(t.var)]);
    out << ' ' << lp_name(c.name.empty() ? "c" + std::to_string(r) : c.name) << ':';
    write_terms(out, terms);
    out << (c.sense == Sense::LessEqual ? " <= " : c.sense == Sense::GreaterEqual ? " >= " : " = ")
        << format_double(c.rhs) << '\n';
  }
  out << "Bounds\n";
  if (lp.objective_offset != 0.0) out << " __offset = 1\n";
  const std::set<int> binary_set(mip.binaries.begin(), mip.binaries.end());
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    if (binary_set.count(static_cast<int>(j))) continue;
    const auto& v = lp.variables[j];
    if (v.lower == v.upper) {
      out << ' ' << names[j] << " = " << format_double(v.lower) << '\n';
      continue;
    }
    out << ' ';
    if (std::isinf(v.lower)) out << "-inf";
    else out << format_double(v.lower);
    out << " <= " << names[j] << " <= ";
    if (std::isinf(v.upper)) out << "+inf";
    else out << format_double(v.upper);
    out << '\n';
  }
  if (!mip.binaries.empty()) {
    out << "Binaries\n";
    std::size_t on_line = 0;
    for (int b : mip.binaries) {
      out << ' ' << names[static_cast<std::size_t>(b)];
      if (++on_line % 10 == 0) out << '\n';
    }
    out << '\n';
  }
  out << "End\n";
}

}  // namespace geomr::lp
