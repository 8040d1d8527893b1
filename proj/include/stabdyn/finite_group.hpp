#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stabdyn/budget.hpp"
#include "stabdyn/permutation.hpp"

namespace stabdyn
{

using Element = std::uint32_t;

/// A finite group given by its full multiplication table.
class FiniteGroup
{
public:
  /// Validates identity, inverses, associativity (exhaustive up to order 64,
  /// sampled above) and that the generators generate.
  FiniteGroup(std::vector<Element> table, std::size_t order, std::vector<Element> generators,
              std::vector<std::string> names = {});

  std::size_t order() const { return order_; }
  Element identity() const { return identity_; }
  Element mul(Element a, Element b) const { return table_[a * order_ + b]; }
  Element inv(Element a) const { return inverse_[a]; }
  Element pow(Element a, std::int64_t k) const;
  Element commutator(Element a, Element b) const { return mul(mul(a, b), mul(inv(a), inv(b))); }
  Element conjugate(Element x, Element by) const { return mul(mul(by, x), inv(by)); }

  std::vector<Element> const &generators() const { return generators_; }
  std::vector<Element> const &table() const { return table_; }
  std::string name(Element a) const;

  std::uint64_t element_order(Element a) const { return orders_[a]; }
  bool is_abelian() const;

  /// Sorted closure of `gens`.
  std::vector<Element> generate(std::span<Element const> gens) const;
  /// Smallest normal subgroup containing `gens`, sorted.
  std::vector<Element> normal_closure(std::span<Element const> gens) const;

  std::vector<Element> center() const;
  std::vector<Element> derived_subgroup() const;
  /// Conjugacy classes, each sorted, ordered by least element.
  std::vector<std::vector<Element>> conjugacy_classes() const;

  /// Re-indexed group on a sorted subgroup; element i is elements[i].
  /// Throws PreconditionError if `elements` is not a subgroup.
  FiniteGroup subgroup(std::span<Element const> elements) const;

  /// `elements` must be sorted.
  bool is_subgroup(std::span<Element const> elements) const;
  bool is_normal(std::span<Element const> elements) const;

private:
  std::size_t order_;
  std::vector<Element> table_;
  std::vector<Element> inverse_;
  std::vector<std::uint64_t> orders_;
  std::vector<Element> generators_;
  std::vector<std::string> names_;
  Element identity_ = 0;
};

FiniteGroup trivial_group();
FiniteGroup cyclic_group(std::size_t n);
FiniteGroup direct_product(FiniteGroup const &a, FiniteGroup const &b);
/// Element i is Permutation::unrank(m, i); generators are (i i+1).
FiniteGroup symmetric_group(std::size_t m, Budgets const &budgets = default_budgets());

/// A permutation group with its elements listed; element i of `group` is elements[i].
struct PermutationGroup
{
  FiniteGroup group;
  std::vector<Permutation> elements; ///< sorted
};
PermutationGroup permutation_group(std::vector<Permutation> const &generators,
                                   Budgets const &budgets = default_budgets());
/// Symmetries of the k-gon, order 2k.
FiniteGroup dihedral_group(std::size_t k);
FiniteGroup quaternion_group();

/// Every group of order at most 9 up to isomorphism, with short names.
struct NamedGroup
{
  std::string name;
  FiniteGroup group;
};
std::vector<NamedGroup> small_groups();

/// {g : g k = k g for every k in subset}, sorted.
std::vector<Element> centralizer(FiniteGroup const &ambient, std::span<Element const> subset,
                                 Budgets const &budgets = default_budgets());

/// All normal subgroups, sorted by order then elements.
std::vector<std::vector<Element>> normal_subgroups(FiniteGroup const &group);

/// All subgroups, sorted by order then elements.
std::vector<std::vector<Element>> all_subgroups(FiniteGroup const &group);

/// Normal subgroups of Sym(m) found by closing unions of conjugacy classes,
/// working on permutations directly; each sorted.
std::vector<std::vector<Permutation>> normal_subgroups_sym(std::size_t m,
                                                          Budgets const &budgets = default_budgets());

} // namespace stabdyn
