#pragma once

#include <cstdint>
#include <string_view>

namespace stabdyn
{

/// Hard size caps. Overruns raise BudgetExceeded, never truncate.
struct Budgets
{
  std::uint64_t words = 10'000'000;        ///< admissible words of one length
  std::uint64_t group_order = 20'000;      ///< materialized multiplication tables
  std::uint64_t search_nodes = 50'000'000; ///< backtracking nodes in rule enumeration
  std::uint64_t factorial_degree = 8;      ///< Sym(m) enumerations

  /// Defaults, overridden by STABDYN_BUDGET ("words=1e6,group_order=50000").
  static Budgets from_environment();

  /// Applies "key=value,..." overrides; unknown keys raise ParseError.
  void apply_overrides(std::string_view spec);
};

/// Process-wide budgets, initialized from the environment on first use.
Budgets const &default_budgets();

} // namespace stabdyn
