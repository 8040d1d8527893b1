#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace stabdyn
{

/**
 * Element of Sym(n) acting on {0, ..., n-1}. Products compose right to left:
 * (s * t)(x) = s(t(x)).
 */
class Permutation
{
public:
  Permutation() = default;
  explicit Permutation(std::vector<std::uint32_t> images);

  static Permutation identity(std::size_t degree);
  static Permutation transposition(std::size_t degree, std::uint32_t a, std::uint32_t b);
  /// (c0 c1 ... ck): c_i -> c_{i+1}, c_k -> c_0.
  static Permutation cycle(std::size_t degree, std::vector<std::uint32_t> const &points);
  /// x -> x + shift (mod degree).
  static Permutation rotation(std::size_t degree, std::size_t shift);

  std::size_t degree() const { return images_.size(); }
  std::uint32_t operator()(std::uint32_t x) const { return images_[x]; }
  std::vector<std::uint32_t> const &images() const { return images_; }

  Permutation inverse() const;
  Permutation operator*(Permutation const &rhs) const;
  Permutation pow(std::int64_t k) const;

  bool is_identity() const;
  bool is_even() const;
  std::uint64_t order() const;

  /// Cycles (including fixed points), each listed from its least point.
  std::vector<std::vector<std::uint32_t>> orbits() const;

  /// Lexicographic rank among all permutations of the same degree.
  std::uint64_t rank() const;
  static Permutation unrank(std::size_t degree, std::uint64_t rank);

  std::string to_string() const;

  friend auto operator<=>(Permutation const &, Permutation const &) = default;
  friend bool operator==(Permutation const &, Permutation const &) = default;

private:
  std::vector<std::uint32_t> images_;
};

std::uint64_t factorial(std::size_t n);

/// All of Sym(n) in lexicographic order.
std::vector<Permutation> all_permutations(std::size_t degree);

} // namespace stabdyn
