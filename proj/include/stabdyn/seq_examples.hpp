#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabdyn/budget.hpp"

namespace stabdyn
{

/// Where a block of the recursion sits in the generated word. k = 0 marks an
/// A_0 block (example 2 only); k >= 1 marks b_k.
struct MarkerTile
{
  std::size_t k = 0;
  std::size_t position = 0;

  friend bool operator==(MarkerTile const &, MarkerTile const &) = default;
};

struct RecursiveWord
{
  std::string scheme; ///< "example1" or "example2"
  std::size_t level = 0;
  std::string word;                 ///< A_level over {0, 1, a}
  std::vector<std::string> markers; ///< markers[k - 1] = b_k, k = 1..level
  std::vector<MarkerTile> tiles;    ///< sorted by position
};

/// b_n = 1 0^{2^n - 1}.
std::string example1_marker(std::size_t n);

/// A_0 empty, A_n = A_{n-1} A_{n-1} b_n, so |A_n| = n 2^n.
RecursiveWord example1(std::size_t level, Budgets const &budgets = default_budgets());
std::string example1_word(std::size_t level, Budgets const &budgets = default_budgets());

/// Fibonacci mechanical word: s(i) = floor((i+1) a) - floor(i a) with
/// a = (sqrt 5 - 1) / 2, for i = 1..length. Computed with integer square roots.
std::string sturmian_prefix(std::size_t length, Budgets const &budgets = default_budgets());

/// b_n = a F_1 ... F_{3^n - 2} a with F = sturmian_prefix.
std::string example2_marker(std::size_t n, Budgets const &budgets = default_budgets());

/// A_0 = aaa, A_{n+1} = A_n b_{n+1} A_n, so |A_n| = 3^{n+1}.
RecursiveWord example2(std::size_t level, Budgets const &budgets = default_budgets());
std::string example2_word(std::size_t level, Budgets const &budgets = default_budgets());

struct ResidueReport
{
  std::string marker;
  std::uint64_t modulus = 1;
  std::size_t depth = 0;                  ///< length of the scanned prefix
  std::vector<std::size_t> occurrences;   ///< start indices, overlapping allowed
  std::optional<std::uint64_t> residue;   ///< common residue, if there is one
  std::optional<std::uint64_t> expected;  ///< required residue, if any
  bool passed = false;
};

/// Passes iff every occurrence of `marker` in `word` starts at the same
/// residue mod `modulus` (and at `expected`, when given).
ResidueReport check_marker_residues(std::string_view word, std::string_view marker,
                                    std::uint64_t modulus,
                                    std::optional<std::uint64_t> expected = std::nullopt);

/// Scans the first `depth` symbols of A_{n+3} (all of it by default) for b_n.
/// Those prefixes start a point of X_0, so the residue must be 0 mod 2^n.
ResidueReport check_example1_residues(std::size_t n, std::optional<std::size_t> depth = {},
                                      Budgets const &budgets = default_budgets());

struct MarkerReport
{
  ResidueReport residues;
  std::size_t alpha_count = 0;
  std::size_t alpha_uncovered = 0;
  std::optional<std::size_t> first_uncovered;
  bool matches_catalog = true; ///< occurrences equal the b_n tiles of the recursion
  bool passed = false;
};

/// b_n residues mod 3^n (expected 0) on the first `depth` symbols of
/// A_{n+2}, plus coverage: every a lies in an aligned aaa block or is an end
/// symbol of an occurrence of some b_k.
MarkerReport check_example2_markers(std::size_t n, std::optional<std::size_t> depth = {},
                                    Budgets const &budgets = default_budgets());

/// The same checks on an arbitrary word (used for negative controls).
MarkerReport check_example2_markers_on(std::string_view word, std::size_t n,
                                       Budgets const &budgets = default_budgets());

} // namespace stabdyn
