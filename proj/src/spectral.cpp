#include "stabdyn/spectral.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

/// 0/1 matrix of pairs joined by a path of length exactly n.
Matrix support_power(Matrix const &a, std::uint64_t n)
{
  std::size_t const d = a.size();
  auto multiply = [d](Matrix const &x, Matrix const &y) {
    Matrix z(d, std::vector<std::uint64_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        if (x[i][k])
          for (std::size_t j = 0; j < d; ++j)
            z[i][j] |= y[k][j] != 0;
    return z;
  };
  Matrix result(d, std::vector<std::uint64_t>(d, 0));
  for (std::size_t i = 0; i < d; ++i)
    result[i][i] = 1;
  Matrix base = a;
  for (; n > 0; n >>= 1) {
    if (n & 1)
      result = multiply(result, base);
    base = multiply(base, base);
  }
  return result;
}

bool reaches_all(Matrix const &a, bool transpose)
{
  std::size_t const d = a.size();
  std::vector<bool> seen(d, false);
  std::queue<std::size_t> queue;
  seen[0] = true;
  queue.push(0);
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop();
    for (std::size_t t = 0; t < d; ++t) {
      if ((transpose ? a[t][s] : a[s][t]) && !seen[t]) {
        seen[t] = true;
        queue.push(t);
      }
    }
  }
  return std::ranges::all_of(seen, [](bool b) { return b; });
}

bool strongly_connected(Matrix const &a)
{
  return !a.empty() && reaches_all(a, false) && reaches_all(a, true);
}

} // namespace

std::vector<std::uint64_t> divisors(std::uint64_t n)
{
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d == 0)
      out.push_back(d);
  }
  return out;
}

std::vector<std::uint64_t> rational_eigs(EdgeShift const &shift)
{
  return divisors(period(shift));
}

CyclicPartition cyclic_partition(EdgeShift const &shift, std::uint64_t m)
{
  std::uint64_t p = period(shift);
  if (m == 0 || p % m != 0)
    throw NoSuchEigenvalue(std::to_string(m) + " is not a rational eigenvalue (period " +
                           std::to_string(p) + ")");

  std::size_t const n = shift.state_count();
  std::vector<std::int64_t> level(n, -1);
  std::queue<StateId> queue;
  level[0] = 0;
  queue.push(0);
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop();
    for (EdgeId e : shift.out_edges(s)) {
      StateId t = shift.edge(e).head;
      if (level[t] < 0) {
        level[t] = level[s] + 1;
        queue.push(t);
      }
    }
  }

  CyclicPartition part;
  part.size = m;
  part.classes.assign(m, {});
  part.class_of.assign(n, 0);
  part.parent_hash = shift.hash();
  for (StateId s = 0; s < n; ++s) {
    auto k = static_cast<std::size_t>(level[s] % static_cast<std::int64_t>(m));
    part.class_of[s] = k;
    part.classes[k].push_back(s);
  }
  return part;
}

CyclicPartition coarsen_partition(CyclicPartition const &part, std::uint64_t p)
{
  if (p == 0 || part.size % p != 0)
    throw PreconditionError(std::to_string(p) + " does not divide partition size " +
                            std::to_string(part.size));
  CyclicPartition out;
  out.size = p;
  out.classes.assign(p, {});
  out.class_of.resize(part.class_of.size());
  out.parent_hash = part.parent_hash;
  for (std::size_t s = 0; s < part.class_of.size(); ++s) {
    std::size_t k = part.class_of[s] % p;
    out.class_of[s] = k;
    out.classes[k].push_back(static_cast<StateId>(s));
  }
  return out;
}

bool is_cyclic_partition(EdgeShift const &shift, CyclicPartition const &part)
{
  if (part.size == 0 || part.class_of.size() != shift.state_count() ||
      part.classes.size() != part.size)
    return false;
  if (part.class_of[0] != 0)
    return false;
  for (auto const &cls : part.classes) {
    if (cls.empty())
      return false;
  }
  for (auto const &e : shift.edges()) {
    if (part.class_of[e.head] != (part.class_of[e.tail] + 1) % part.size)
      return false;
  }
  return true;
}

SmaleDecomposition component_system(EdgeShift const &shift, std::uint64_t m,
                                    Budgets const &budgets)
{
  SmaleDecomposition out{m, shift, cyclic_partition(shift, m), {}, {}};
  PowerShift power = power_shift(shift, m, budgets);
  out.component_states = out.partition.classes[0];

  std::vector<EdgeId> edge_map;
  out.component_shift = induced_shift(power.shift, out.component_states, &edge_map);
  std::vector<std::string> labels;
  for (EdgeId e : edge_map) {
    out.path_dictionary.push_back(power.paths[e]);
    labels.push_back(shift.format_word(power.paths[e]));
  }
  if (m > 1)
    out.component_shift.set_labels(std::move(labels));
  return out;
}

SmaleDecomposition smale(EdgeShift const &shift, Budgets const &budgets)
{
  return component_system(shift, period(shift), budgets);
}

bool is_power_transitive(EdgeShift const &shift, std::uint64_t n)
{
  return std::gcd(n, period(shift)) == 1;
}

bool is_power_transitive_by_connectivity(EdgeShift const &shift, std::uint64_t n)
{
  return strongly_connected(support_power(shift.adjacency(), n));
}

PowerDecomposition decompose_power(EdgeShift const &shift, std::uint64_t n)
{
  if (n == 0)
    throw PreconditionError("decompose_power requires n >= 1");
  std::uint64_t p = period(shift);
  std::uint64_t l = 1;
  for (std::uint64_t d : divisors(p)) {
    if (n % d == 0)
      l = d;
  }
  PowerDecomposition out{n, n / l, l};
  if (std::gcd(out.k, p) != 1)
    throw PreconditionError("no decomposition of " + std::to_string(n) + " for period " +
                            std::to_string(p) + ": sigma^" + std::to_string(out.k) +
                            " is not transitive");
  return out;
}

bool restricted_transitivity(EdgeShift const &shift, std::uint64_t m, std::uint64_t n)
{
  std::uint64_t p = period(shift);
  if (m == 0 || p % m != 0)
    throw NoSuchEigenvalue(std::to_string(m) + " is not a rational eigenvalue");
  for (std::uint64_t k : divisors(p)) {
    if (k % m == 0 && std::gcd(n, k / m) != 1)
      return false;
  }
  return true;
}

bool restricted_transitivity_by_connectivity(EdgeShift const &shift, std::uint64_t m,
                                             std::uint64_t n)
{
  CyclicPartition part = cyclic_partition(shift, m);
  Matrix power = support_power(shift.adjacency(), n * m);
  auto const &states = part.classes[0];
  Matrix restricted(states.size(), std::vector<std::uint64_t>(states.size(), 0));
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j)
      restricted[i][j] = power[states[i]][states[j]];
  }
  return strongly_connected(restricted);
}

} // namespace stabdyn
