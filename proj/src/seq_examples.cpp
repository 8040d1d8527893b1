#include "stabdyn/seq_examples.hpp"

#include <algorithm>
#include <cmath>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

std::uint64_t pow_checked(std::uint64_t base, std::size_t exp, std::uint64_t cap,
                          std::string const &what)
{
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / base)
      throw BudgetExceeded(what + " exceeds the word budget of " + std::to_string(cap));
    out *= base;
  }
  return out;
}

void check_length(std::uint64_t length, Budgets const &budgets, std::string const &what)
{
  if (length > budgets.words)
    throw BudgetExceeded(what + " of length " + std::to_string(length) +
                         " exceeds the word budget of " + std::to_string(budgets.words));
}

std::uint64_t isqrt(std::uint64_t x)
{
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
  while (r * r > x)
    --r;
  while ((r + 1) * (r + 1) <= x)
    ++r;
  return r;
}

/// floor(i (sqrt 5 - 1) / 2) = floor((floor(sqrt(5 i^2)) - i) / 2) for i >= 1.
std::uint64_t floor_golden(std::uint64_t i)
{
  if (i == 0)
    return 0;
  return (isqrt(5 * i * i) - i) / 2;
}

std::vector<std::size_t> occurrences(std::string_view word, std::string_view marker)
{
  std::vector<std::size_t> out;
  if (marker.empty())
    return out;
  for (std::size_t p = word.find(marker); p != std::string_view::npos; p = word.find(marker, p + 1))
    out.push_back(p);
  return out;
}

/// `rest` is a proper prefix of an aaa block or of a marker, cut by the end of the word.
bool starts_cut_marker(std::string_view rest, Budgets const &budgets)
{
  if (rest.size() < 3 && rest.find_first_not_of('a') == std::string_view::npos)
    return true;
  return rest.front() == 'a' && rest.substr(1) == sturmian_prefix(rest.size() - 1, budgets);
}

void sort_tiles(std::vector<MarkerTile> &tiles)
{
  std::sort(tiles.begin(), tiles.end(),
            [](MarkerTile const &a, MarkerTile const &b) { return a.position < b.position; });
}

} // namespace

std::string example1_marker(std::size_t n)
{
  if (n == 0 || n > 40)
    throw PreconditionError("example1_marker: n must lie in 1..40");
  return "1" + std::string((std::size_t{1} << n) - 1, '0');
}

RecursiveWord example1(std::size_t level, Budgets const &budgets)
{
  if (level > 40)
    throw BudgetExceeded("example1: level too large");
  check_length(static_cast<std::uint64_t>(level) << level, budgets, "example1 word");
  RecursiveWord out{"example1", level, "", {}, {}};
  for (std::size_t k = 1; k <= level; ++k) {
    std::string b = example1_marker(k);
    std::size_t half = out.word.size();
    std::vector<MarkerTile> copy = out.tiles;
    for (auto &t : copy)
      t.position += half;
    out.tiles.insert(out.tiles.end(), copy.begin(), copy.end());
    out.tiles.push_back({k, 2 * half});
    out.word = out.word + out.word + b;
    out.markers.push_back(std::move(b));
  }
  sort_tiles(out.tiles);
  return out;
}

std::string example1_word(std::size_t level, Budgets const &budgets)
{
  return example1(level, budgets).word;
}

std::string sturmian_prefix(std::size_t length, Budgets const &budgets)
{
  check_length(length, budgets, "Sturmian prefix");
  if (length > (std::uint64_t{1} << 30))
    throw BudgetExceeded("Sturmian prefix longer than 2^30 symbols");
  std::string out;
  out.reserve(length);
  std::uint64_t prev = floor_golden(1);
  for (std::uint64_t i = 1; i <= length; ++i) {
    std::uint64_t next = floor_golden(i + 1);
    out.push_back(next - prev ? '1' : '0');
    prev = next;
  }
  return out;
}

std::string example2_marker(std::size_t n, Budgets const &budgets)
{
  if (n == 0)
    throw PreconditionError("example2_marker: n must be positive");
  std::uint64_t len = pow_checked(3, n, budgets.words, "example2 marker");
  return "a" + sturmian_prefix(len - 2, budgets) + "a";
}

RecursiveWord example2(std::size_t level, Budgets const &budgets)
{
  pow_checked(3, level + 1, budgets.words, "example2 word");
  RecursiveWord out{"example2", level, "aaa", {}, {{0, 0}}};
  // b_level is the longest marker; the others are its prefixes bracketed by a.
  std::string F = level ? sturmian_prefix(pow_checked(3, level, budgets.words, "marker") - 2,
                                          budgets)
                        : std::string();
  for (std::size_t k = 1; k <= level; ++k) {
    std::size_t len = out.word.size();
    std::string b = "a" + F.substr(0, len - 2) + "a"; // |b_k| = 3^k = |A_{k-1}|
    std::vector<MarkerTile> copy = out.tiles;
    for (auto &t : copy)
      t.position += 2 * len;
    out.tiles.push_back({k, len});
    out.tiles.insert(out.tiles.end(), copy.begin(), copy.end());
    out.word = out.word + b + out.word;
    out.markers.push_back(std::move(b));
  }
  sort_tiles(out.tiles);
  if (out.word.size() != pow_checked(3, level + 1, budgets.words, "example2 word"))
    throw Error("example2: length differs from 3^(level+1)");
  return out;
}

std::string example2_word(std::size_t level, Budgets const &budgets)
{
  return example2(level, budgets).word;
}

ResidueReport check_marker_residues(std::string_view word, std::string_view marker,
                                    std::uint64_t modulus, std::optional<std::uint64_t> expected)
{
  if (modulus == 0)
    throw PreconditionError("check_marker_residues: modulus must be positive");
  ResidueReport rep;
  rep.marker = std::string(marker);
  rep.modulus = modulus;
  rep.depth = word.size();
  rep.expected = expected;
  rep.occurrences = occurrences(word, marker);
  rep.passed = true;
  for (std::size_t p : rep.occurrences) {
    std::uint64_t r = p % modulus;
    if (!rep.residue)
      rep.residue = r;
    else if (*rep.residue != r)
      rep.passed = false;
  }
  if (!rep.passed)
    rep.residue.reset();
  if (expected && rep.residue && *rep.residue != *expected)
    rep.passed = false;
  return rep;
}

ResidueReport check_example1_residues(std::size_t n, std::optional<std::size_t> depth,
                                      Budgets const &budgets)
{
  std::string word = example1_word(n + 3, budgets);
  std::size_t d = depth.value_or(word.size());
  if (d == 0 || d > word.size())
    throw PreconditionError("check_example1_residues: depth must lie in 1..|A_{n+3}|");
  return check_marker_residues(std::string_view(word).substr(0, d), example1_marker(n),
                               std::uint64_t{1} << n, 0);
}

MarkerReport check_example2_markers_on(std::string_view word, std::size_t n,
                                       Budgets const &budgets)
{
  MarkerReport rep;
  std::uint64_t modulus = pow_checked(3, n, budgets.words, "example2 marker");
  rep.residues = check_marker_residues(word, example2_marker(n, budgets), modulus, 0);

  std::vector<char> covered(word.size(), 0);
  for (std::size_t p = 0; p + 3 <= word.size(); p += 3)
    if (word.substr(p, 3) == "aaa")
      covered[p] = covered[p + 1] = covered[p + 2] = 1;
  for (std::size_t k = 1; pow_checked(3, k, budgets.words, "marker") <= word.size(); ++k) {
    std::string b = example2_marker(k, budgets);
    for (std::size_t p : occurrences(word, b))
      covered[p] = covered[p + b.size() - 1] = 1;
  }
  for (std::size_t p = 0; p < word.size(); ++p) {
    if (word[p] != 'a')
      continue;
    ++rep.alpha_count;
    if (!covered[p] && !starts_cut_marker(word.substr(p), budgets)) {
      ++rep.alpha_uncovered;
      if (!rep.first_uncovered)
        rep.first_uncovered = p;
    }
  }
  rep.passed = rep.residues.passed && rep.alpha_uncovered == 0;
  return rep;
}

MarkerReport check_example2_markers(std::size_t n, std::optional<std::size_t> depth,
                                    Budgets const &budgets)
{
  if (n == 0)
    throw PreconditionError("check_example2_markers: n must be positive");
  RecursiveWord gen = example2(n + 2, budgets);
  std::size_t d = depth.value_or(gen.word.size());
  if (d == 0 || d > gen.word.size())
    throw PreconditionError("check_example2_markers: depth must lie in 1..|A_{n+2}|");
  std::string_view word = std::string_view(gen.word).substr(0, d);
  MarkerReport rep = check_example2_markers_on(word, n, budgets);
  std::vector<std::size_t> tiles;
  std::size_t len = gen.markers[n - 1].size();
  for (auto const &t : gen.tiles)
    if (t.k == n && t.position + len <= d)
      tiles.push_back(t.position);
  rep.matches_catalog = tiles == rep.residues.occurrences;
  rep.passed = rep.passed && rep.matches_catalog;
  return rep;
}

} // namespace stabdyn
