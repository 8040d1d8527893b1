#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "stabdyn/finite_group.hpp"

namespace stabdyn
{

/// Isomorphism invariants used to prune (and often settle) the search.
struct GroupInvariants
{
  std::size_t order = 0;
  std::size_t center_order = 0;
  std::size_t derived_order = 0;
  /// (element order, conjugacy class size) -> number of elements
  std::map<std::pair<std::uint64_t, std::size_t>, std::size_t> element_profile;

  friend bool operator==(GroupInvariants const &, GroupInvariants const &) = default;
};

GroupInvariants invariants(FiniteGroup const &group);

/// A minimal generating subset of group.generators() (redundant ones dropped).
std::vector<Element> reduced_generators(FiniteGroup const &group);

/// True iff map (indexed by elements of G) is a bijective homomorphism G -> H.
bool is_isomorphism(FiniteGroup const &G, FiniteGroup const &H, std::vector<Element> const &map);

/**
 * An explicit isomorphism G -> H, or nullopt if none exists. Exhaustive
 * backtracking over images of reduced_generators(G); candidates must match
 * element order and class size. The first map found in increasing order of
 * generator images is returned. Throws BudgetExceeded past budgets.search_nodes.
 */
std::optional<std::vector<Element>> is_isomorphic(FiniteGroup const &G, FiniteGroup const &H,
                                                  Budgets const &budgets = default_budgets());

/// Every isomorphism G -> H in search order, stopping after `limit`.
std::vector<std::vector<Element>> all_isomorphisms(FiniteGroup const &G, FiniteGroup const &H,
                                                   std::size_t limit,
                                                   Budgets const &budgets = default_budgets());

} // namespace stabdyn
