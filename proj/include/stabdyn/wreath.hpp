#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stabdyn/finite_group.hpp"
#include "stabdyn/permutation.hpp"

namespace stabdyn
{

/// (g, sigma) in G wr Sym(n).
struct WreathElement
{
  std::vector<Element> g;
  Permutation sigma;

  friend auto operator<=>(WreathElement const &, WreathElement const &) = default;
  friend bool operator==(WreathElement const &, WreathElement const &) = default;
};

/// g_sigma: the vector with entry g_{sigma^-1(i)} at position i.
std::vector<Element> permute_vector(std::span<Element const> g, Permutation const &sigma);

WreathElement wr_identity(FiniteGroup const &G, std::size_t n);

/// (g, sigma)(h, tau) = (g_{tau^-1} h, sigma tau).
WreathElement wr_mul(FiniteGroup const &G, WreathElement const &a, WreathElement const &b);

/// (g, sigma)^-1 = ((g^-1)_sigma, sigma^-1).
WreathElement wr_inv(FiniteGroup const &G, WreathElement const &a);

/// by * x * by^-1 in closed form:
/// (g_{sigma tau^-1} h_sigma (g^-1)_sigma, sigma tau sigma^-1) for x = (h, tau), by = (g, sigma).
WreathElement wr_conj(FiniteGroup const &G, WreathElement const &x, WreathElement const &by);

/// x y x^-1 y^-1 in closed form for x = (g, sigma), y = (h, tau):
/// (g_{tau sigma tau^-1} h_{tau sigma} (g^-1)_{tau sigma} (h^-1)_tau, sigma tau sigma^-1 tau^-1).
WreathElement wr_comm(FiniteGroup const &G, WreathElement const &x, WreathElement const &y);

/// c_sigma(g, j) = g_{sigma^{-|p|+1}(j)} ... g_{sigma^{-1}(j)} g_j over the sigma-orbit p of j.
Element cycle_product(FiniteGroup const &G, std::span<Element const> g, Permutation const &sigma,
                      std::uint32_t j);

/// Least point of each sigma-orbit.
std::vector<std::uint32_t> default_anchors(Permutation const &sigma);

/**
 * k with (k,1)(g,sigma)(k,1)^-1 = (h,sigma) and k_j = 1 at every anchor j,
 * or nullopt when no such k exists, which happens iff
 * c_{sigma^-1}(g, j) != c_{sigma^-1}(h, j) at some anchor. Built by
 * k_{sigma(i)} = h_i k_i g_i^-1. Anchors default to the least orbit points.
 * For nonabelian G a conjugator with nontrivial anchor entries may exist
 * when the cycle products are only conjugate in G.
 */
std::optional<std::vector<Element>> conjugate_in_base(FiniteGroup const &G,
                                                      std::span<Element const> g,
                                                      std::span<Element const> h,
                                                      Permutation const &sigma,
                                                      std::span<std::uint32_t const> anchors = {});

/// G wr Sym(n) with its elements listed; element i of `group` is elements[i].
struct WreathGroup
{
  FiniteGroup base;
  std::size_t degree = 0;
  FiniteGroup group;
  std::vector<WreathElement> elements; ///< sorted by (g, sigma)

  Element index_of(WreathElement const &x) const;
  /// Indices of the diagonal {(c,...,c) : c in subset} x {1}.
  std::vector<Element> diagonal(std::span<Element const> subset) const;
  /// Indices of {1} x Sym(n).
  std::vector<Element> top() const;
  /// Indices of G^n x {1}.
  std::vector<Element> base_subgroup() const;
};

/// Materializes G wr Sym(n). Generators are the generators of G in coordinate
/// 0 and the transpositions (i i+1). Throws BudgetExceeded above budgets.group_order.
WreathGroup wreath_group(FiniteGroup const &G, std::size_t n,
                         Budgets const &budgets = default_budgets());

} // namespace stabdyn
