#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stabdyn/sft.hpp"

namespace stabdyn
{

/**
 * States split into m classes so that every edge runs from class k to class
 * k + 1 (mod m). Class 0 holds the lowest-numbered state; the cylinders over
 * edges leaving class-k states form T^k X_m.
 */
struct CyclicPartition
{
  std::size_t size = 0;
  std::vector<std::vector<StateId>> classes;
  std::vector<std::size_t> class_of; ///< state -> class index
  std::string parent_hash;

  friend bool operator==(CyclicPartition const &, CyclicPartition const &) = default;
};

/// (X_m, sigma^m restricted to X_m) presented as an edge shift.
struct SmaleDecomposition
{
  std::uint64_t period = 1;
  EdgeShift component_shift;
  CyclicPartition partition;
  std::vector<StateId> component_states; ///< component state -> original state
  std::vector<Word> path_dictionary;     ///< component edge -> length-m path
};

struct PowerDecomposition
{
  std::uint64_t n = 1;
  std::uint64_t k = 1; ///< sigma^k is transitive
  std::uint64_t l = 1; ///< l is a rational eigenvalue

  friend bool operator==(PowerDecomposition const &, PowerDecomposition const &) = default;
};

std::vector<std::uint64_t> divisors(std::uint64_t n);

/// Eig(sigma): the divisors of the period.
std::vector<std::uint64_t> rational_eigs(EdgeShift const &shift);

/// BFS levels mod m from state 0. Throws NoSuchEigenvalue unless m | period.
CyclicPartition cyclic_partition(EdgeShift const &shift, std::uint64_t m);

/// Merges classes k, k + p, k + 2p, ... into class k.
CyclicPartition coarsen_partition(CyclicPartition const &part, std::uint64_t p);

/// Checks the partition invariants against the graph.
bool is_cyclic_partition(EdgeShift const &shift, CyclicPartition const &part);

/// The restriction of sigma^m to X_m for any m in Eig(sigma).
SmaleDecomposition component_system(EdgeShift const &shift, std::uint64_t m,
                                    Budgets const &budgets = default_budgets());

/// component_system at m = period; the component is mixing.
SmaleDecomposition smale(EdgeShift const &shift, Budgets const &budgets = default_budgets());

/// sigma^n transitive, from gcd(n, period) = 1.
bool is_power_transitive(EdgeShift const &shift, std::uint64_t n);

/// Same question answered by strong connectivity of A^n.
bool is_power_transitive_by_connectivity(EdgeShift const &shift, std::uint64_t n);

/// The unique n = k * l with sigma^k transitive and l in Eig(sigma).
PowerDecomposition decompose_power(EdgeShift const &shift, std::uint64_t n);

/// sigma^{nm} transitive on X_m: gcd(n, k / m) = 1 for every k in Eig with m | k.
bool restricted_transitivity(EdgeShift const &shift, std::uint64_t m, std::uint64_t n);

/// Same question answered by strong connectivity of A^{nm} on class 0.
bool restricted_transitivity_by_connectivity(EdgeShift const &shift, std::uint64_t m,
                                             std::uint64_t n);

} // namespace stabdyn
