#include "stabdyn/permutation.hpp"

#include <algorithm>
#include <numeric>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

Permutation::Permutation(std::vector<std::uint32_t> images)
  : images_(std::move(images))
{
  std::vector<bool> hit(images_.size(), false);
  for (auto x : images_) {
    if (x >= images_.size() || hit[x])
      throw PreconditionError("permutation images are not a bijection");
    hit[x] = true;
  }
}

Permutation Permutation::identity(std::size_t degree)
{
  std::vector<std::uint32_t> im(degree);
  std::iota(im.begin(), im.end(), 0u);
  Permutation p;
  p.images_ = std::move(im);
  return p;
}

Permutation Permutation::transposition(std::size_t degree, std::uint32_t a, std::uint32_t b)
{
  return cycle(degree, {a, b});
}

Permutation Permutation::cycle(std::size_t degree, std::vector<std::uint32_t> const &points)
{
  auto p = identity(degree);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] >= degree)
      throw PreconditionError("cycle point out of range");
    p.images_[points[i]] = points[(i + 1) % points.size()];
  }
  return Permutation(p.images_);
}

Permutation Permutation::rotation(std::size_t degree, std::size_t shift)
{
  std::vector<std::uint32_t> im(degree);
  for (std::size_t i = 0; i < degree; ++i)
    im[i] = static_cast<std::uint32_t>((i + shift) % degree);
  return Permutation(std::move(im));
}

Permutation Permutation::inverse() const
{
  std::vector<std::uint32_t> inv(images_.size());
  for (std::uint32_t i = 0; i < images_.size(); ++i)
    inv[images_[i]] = i;
  Permutation p;
  p.images_ = std::move(inv);
  return p;
}

Permutation Permutation::operator*(Permutation const &rhs) const
{
  if (rhs.degree() != degree())
    throw PreconditionError("permutation degrees differ");
  Permutation p;
  p.images_.resize(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i)
    p.images_[i] = images_[rhs.images_[i]];
  return p;
}

Permutation Permutation::pow(std::int64_t k) const
{
  Permutation base = k < 0 ? inverse() : *this;
  Permutation result = identity(degree());
  for (std::int64_t e = k < 0 ? -k : k; e > 0; --e)
    result = result * base;
  return result;
}

bool Permutation::is_identity() const
{
  for (std::uint32_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i)
      return false;
  }
  return true;
}

bool Permutation::is_even() const
{
  std::size_t transpositions = 0;
  for (auto const &c : orbits())
    transpositions += c.size() - 1;
  return transpositions % 2 == 0;
}

std::uint64_t Permutation::order() const
{
  std::uint64_t o = 1;
  for (auto const &c : orbits())
    o = std::lcm(o, static_cast<std::uint64_t>(c.size()));
  return o;
}

std::vector<std::vector<std::uint32_t>> Permutation::orbits() const
{
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<bool> seen(images_.size(), false);
  for (std::uint32_t i = 0; i < images_.size(); ++i) {
    if (seen[i])
      continue;
    out.emplace_back();
    for (std::uint32_t x = i; !seen[x]; x = images_[x]) {
      seen[x] = true;
      out.back().push_back(x);
    }
  }
  return out;
}

std::uint64_t factorial(std::size_t n)
{
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i)
    f *= i;
  return f;
}

std::uint64_t Permutation::rank() const
{
  std::uint64_t r = 0;
  std::size_t const n = images_.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j)
      smaller += images_[j] < images_[i];
    r += smaller * factorial(n - 1 - i);
  }
  return r;
}

Permutation Permutation::unrank(std::size_t degree, std::uint64_t rank)
{
  std::vector<std::uint32_t> pool(degree);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::uint32_t> im;
  for (std::size_t i = 0; i < degree; ++i) {
    std::uint64_t f = factorial(degree - 1 - i);
    std::size_t idx = rank / f;
    rank %= f;
    im.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  Permutation p;
  p.images_ = std::move(im);
  return p;
}

std::string Permutation::to_string() const
{
  std::string s;
  for (auto const &c : orbits()) {
    if (c.size() < 2)
      continue;
    s += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i)
        s += ' ';
      s += std::to_string(c[i]);
    }
    s += ')';
  }
  return s.empty() ? "()" : s;
}

std::vector<Permutation> all_permutations(std::size_t degree)
{
  std::vector<Permutation> out;
  std::vector<std::uint32_t> im(degree);
  std::iota(im.begin(), im.end(), 0u);
  do {
    out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

} // namespace stabdyn
