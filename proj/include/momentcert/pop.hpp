#pragma once

#include <string>
#include <vector>

#include "momentcert/polynomial.hpp"

namespace momentcert {

/// A constrained polynomial optimization problem
///   min f(x)  s.t.  h_i(x) = 0 (i = 1..m1),  g_j(x) >= 0 (j = 1..m2).
/// Coefficients are exact rationals; numeric stages convert on demand.
struct POPInstance {
  std::string name;
  std::vector<std::string> var_names;
  Polynomial<Rational> objective;
  PolyTuple<Rational> equalities;
  PolyTuple<Rational> inequalities;

  int nvars() const { return objective.nvars(); }
  int num_equalities() const { return static_cast<int>(equalities.size()); }
  int num_inequalities() const { return static_cast<int>(inequalities.size()); }

  void validate() const {
    const int n = nvars();
    if (static_cast<int>(var_names.size()) != n)
      throw std::invalid_argument("pop instance: variable name count mismatch");
    if (equalities.nvars != n || inequalities.nvars != n)
      throw std::invalid_argument("pop instance: constraint nvars mismatch");
    if (num_equalities() > n)
      throw std::invalid_argument("pop instance: more equality constraints than variables (m1 > n)");
  }
};

/// Numeric view of an instance used by the relaxation/certification stages.
struct NumericPOP {
  Polynomial<double> objective;
  std::vector<Polynomial<double>> equalities;
  std::vector<Polynomial<double>> inequalities;

  static NumericPOP from(const POPInstance& pop) {
    NumericPOP num;
    num.objective = to_double(pop.objective);
    for (const auto& h : pop.equalities.entries) num.equalities.push_back(to_double(h));
    for (const auto& g : pop.inequalities.entries) num.inequalities.push_back(to_double(g));
    return num;
  }
};

}  // namespace momentcert
