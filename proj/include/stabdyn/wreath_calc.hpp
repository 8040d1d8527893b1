#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stabdyn/serialize.hpp"
#include "stabdyn/wreath.hpp"

namespace stabdyn
{

/**
 * Expressions over named elements of G wr Sym(n):
 *
 *   expr   := power ('*' power)*
 *   power  := atom ('^' integer)?
 *   atom   := name | 'id' | '(' expr ')' | 'inv(' expr ')'
 *           | 'conj(' expr ',' expr ')' | 'comm(' expr ',' expr ')'
 *
 * conj(x, y) = y x y^-1 and comm(x, y) = x y x^-1 y^-1. Both are evaluated
 * through the closed forms and again as plain products; disagreements are
 * counted in `formula_mismatches`.
 */
struct WreathCalculator
{
  FiniteGroup group;
  std::size_t degree = 1;
  std::map<std::string, WreathElement> names;

  std::size_t formula_checks = 0;
  std::size_t formula_mismatches = 0;

  /// Throws ParseError on syntax errors and unknown names.
  WreathElement evaluate(std::string_view expression);
};

/// Resolves "Z9", "S3", "D4", "Q8", the small_groups() names, or a group document.
FiniteGroup resolve_group(Json const &spec, Budgets const &budgets = default_budgets());
FiniteGroup named_group(std::string_view name, Budgets const &budgets = default_budgets());

/// Runs a calculation document:
///   {"group": <name or group>, "n": k, "elements": {"x": {"g", "sigma"}, ...},
///    "expressions": ["x*y", ...]}
/// and returns a "wreath_calc" report.
Json run_wreath_calc(Json const &input, Budgets const &budgets = default_budgets());

} // namespace stabdyn
