#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabdyn/block_code.hpp"
#include "stabdyn/permutation.hpp"
#include "stabdyn/spectral.hpp"

namespace stabdyn
{

/**
 * The automorphisms of (X, sigma^n) of radius <= r whose inverse has radius
 * <= R_inv. This is a finite truncation of Aut(sigma^n), not the group
 * itself: it need not be closed under composition.
 */
struct AutomorphismSet
{
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ShiftHandle context;
  std::uint64_t power = 1;
  std::size_t radius = 0;
  std::size_t inverse_radius = 0;
  std::vector<SlidingBlockCode> elements; ///< canonical, sorted
  std::vector<SlidingBlockCode> inverses; ///< inverses[i] undoes elements[i]
  std::uint64_t search_nodes = 0;

  std::size_t size() const { return elements.size(); }

  /// Position of the map `code` (any representation), or npos.
  std::size_t index_of(SlidingBlockCode const &code) const;
  bool contains(SlidingBlockCode const &code) const { return index_of(code) != npos; }
};

struct EnumerationOptions
{
  std::size_t threads = 0;                ///< 0 picks hardware concurrency
  std::size_t periodic_point_limit = 4096; ///< closed paths used for the injectivity filter
  std::size_t balance_length = 3;         ///< longest block in the measure filter
};

AutomorphismSet enumerate_automorphisms(ShiftHandle const &context, std::uint64_t n,
                                        std::size_t radius, std::size_t inverse_radius,
                                        EnumerationOptions const &options = {});

/// Convenience overload; R_inv defaults to 2r.
AutomorphismSet enumerate_automorphisms(EdgeShift const &shift, std::uint64_t n,
                                        std::size_t radius,
                                        std::optional<std::size_t> inverse_radius = std::nullopt,
                                        Budgets const &budgets = default_budgets());

/// Group laws on a truncated automorphism set. A product or inverse is only
/// required to be present when it fits the set's radius bounds.
struct GroupLawReport
{
  bool identity_present = false;
  std::size_t inverse_failures = 0; ///< recorded inverse does not undo the element
  std::size_t inverse_missing = 0;  ///< inverse fits the bounds but is absent
  std::size_t closure_failures = 0; ///< product is not inverted by the reversed product
  std::size_t closure_missing = 0;  ///< product fits the bounds but is absent
  std::size_t products_checked = 0;

  bool passed() const
  {
    return identity_present && inverse_failures == 0 && inverse_missing == 0 &&
           closure_failures == 0 && closure_missing == 0;
  }
  std::string summary() const;
};

GroupLawReport check_group_laws(AutomorphismSet const &set);

/// The permutation pi with code(T^k X_m) inside T^{pi(k)} X_m. Throws
/// ImageSplitsClasses if some class is not carried into a single class.
Permutation partition_action(SlidingBlockCode const &code, CyclicPartition const &part);

/// j with code acting on the partition as k -> k + j. Throws
/// PreconditionError if the action is not a rotation.
std::size_t rotation_index(SlidingBlockCode const &code, CyclicPartition const &part);

} // namespace stabdyn
