#include "stabdyn/wreath.hpp"

#include <algorithm>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

void check_ambient(FiniteGroup const &G, WreathElement const &x)
{
  if (x.g.size() != x.sigma.degree())
    throw PreconditionError("wreath element: vector length differs from the permutation degree");
  for (Element e : x.g)
    if (e >= G.order())
      throw PreconditionError("wreath element: base entry out of range");
}

void check_same(FiniteGroup const &G, WreathElement const &a, WreathElement const &b)
{
  check_ambient(G, a);
  check_ambient(G, b);
  if (a.g.size() != b.g.size())
    throw PreconditionError("wreath elements from different ambients");
}

std::vector<Element> times(FiniteGroup const &G, std::vector<Element> a,
                           std::span<Element const> b)
{
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = G.mul(a[i], b[i]);
  return a;
}

std::vector<Element> inverted(FiniteGroup const &G, std::span<Element const> g)
{
  std::vector<Element> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = G.inv(g[i]);
  return out;
}

} // namespace

std::vector<Element> permute_vector(std::span<Element const> g, Permutation const &sigma)
{
  std::vector<Element> out(g.size());
  for (std::uint32_t i = 0; i < g.size(); ++i)
    out[sigma(i)] = g[i];
  return out;
}

WreathElement wr_identity(FiniteGroup const &G, std::size_t n)
{
  return {std::vector<Element>(n, G.identity()), Permutation::identity(n)};
}

WreathElement wr_mul(FiniteGroup const &G, WreathElement const &a, WreathElement const &b)
{
  check_same(G, a, b);
  return {times(G, permute_vector(a.g, b.sigma.inverse()), b.g), a.sigma * b.sigma};
}

WreathElement wr_inv(FiniteGroup const &G, WreathElement const &a)
{
  check_ambient(G, a);
  return {permute_vector(inverted(G, a.g), a.sigma), a.sigma.inverse()};
}

WreathElement wr_conj(FiniteGroup const &G, WreathElement const &x, WreathElement const &by)
{
  check_same(G, x, by);
  Permutation const &sigma = by.sigma;
  Permutation const &tau = x.sigma;
  auto v = permute_vector(by.g, sigma * tau.inverse());
  v = times(G, std::move(v), permute_vector(x.g, sigma));
  v = times(G, std::move(v), permute_vector(inverted(G, by.g), sigma));
  return {std::move(v), sigma * tau * sigma.inverse()};
}

WreathElement wr_comm(FiniteGroup const &G, WreathElement const &x, WreathElement const &y)
{
  check_same(G, x, y);
  Permutation const &sigma = x.sigma;
  Permutation const &tau = y.sigma;
  Permutation ts = tau * sigma;
  auto v = permute_vector(x.g, ts * tau.inverse());
  v = times(G, std::move(v), permute_vector(y.g, ts));
  v = times(G, std::move(v), permute_vector(inverted(G, x.g), ts));
  v = times(G, std::move(v), permute_vector(inverted(G, y.g), tau));
  return {std::move(v), sigma * tau * sigma.inverse() * tau.inverse()};
}

Element cycle_product(FiniteGroup const &G, std::span<Element const> g, Permutation const &sigma,
                      std::uint32_t j)
{
  if (j >= sigma.degree() || g.size() != sigma.degree())
    throw PreconditionError("cycle_product: index or vector length out of range");
  Permutation back = sigma.inverse();
  // Accumulate from the right: g_j, then g_{sigma^-1(j)} g_j, ...
  Element out = g[j];
  for (std::uint32_t i = back(j); i != j; i = back(i))
    out = G.mul(g[i], out);
  return out;
}

std::vector<std::uint32_t> default_anchors(Permutation const &sigma)
{
  std::vector<std::uint32_t> out;
  for (auto const &orbit : sigma.orbits())
    out.push_back(orbit.front());
  return out;
}

std::optional<std::vector<Element>> conjugate_in_base(FiniteGroup const &G,
                                                      std::span<Element const> g,
                                                      std::span<Element const> h,
                                                      Permutation const &sigma,
                                                      std::span<std::uint32_t const> anchors)
{
  std::size_t n = sigma.degree();
  if (g.size() != n || h.size() != n)
    throw PreconditionError("conjugate_in_base: vector length differs from the degree");
  std::vector<std::uint32_t> chosen(anchors.begin(), anchors.end());
  if (chosen.empty())
    chosen = default_anchors(sigma);

  std::vector<char> covered(n, 0);
  for (std::uint32_t j : chosen) {
    if (j >= n)
      throw PreconditionError("conjugate_in_base: anchor out of range");
    std::uint32_t i = j;
    do {
      if (covered[i])
        throw PreconditionError("conjugate_in_base: two anchors in one orbit");
      covered[i] = 1;
      i = sigma(i);
    } while (i != j);
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw PreconditionError("conjugate_in_base: an orbit has no anchor");

  Permutation back = sigma.inverse();
  std::vector<Element> k(n, G.identity());
  for (std::uint32_t j : chosen) {
    if (cycle_product(G, g, back, j) != cycle_product(G, h, back, j))
      return std::nullopt;
    for (std::uint32_t i = j; sigma(i) != j; i = sigma(i))
      k[sigma(i)] = G.mul(G.mul(h[i], k[i]), G.inv(g[i]));
  }
  return k;
}

Element WreathGroup::index_of(WreathElement const &x) const
{
  // Elements are sorted by (g, sigma), so the index is positional.
  if (x.g.size() != degree || x.sigma.degree() != degree)
    throw PreconditionError("element is not in this wreath product");
  std::uint64_t index = 0;
  for (Element e : x.g) {
    if (e >= base.order())
      throw PreconditionError("element is not in this wreath product");
    index = index * base.order() + e;
  }
  return static_cast<Element>(index * factorial(degree) + x.sigma.rank());
}

std::vector<Element> WreathGroup::diagonal(std::span<Element const> subset) const
{
  std::vector<Element> out;
  for (Element c : subset)
    out.push_back(index_of({std::vector<Element>(degree, c), Permutation::identity(degree)}));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Element> WreathGroup::top() const
{
  std::vector<Element> out;
  for (Permutation const &p : all_permutations(degree))
    out.push_back(index_of({std::vector<Element>(degree, base.identity()), p}));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Element> WreathGroup::base_subgroup() const
{
  std::vector<Element> out;
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i].sigma.is_identity())
      out.push_back(static_cast<Element>(i));
  return out;
}

WreathGroup wreath_group(FiniteGroup const &G, std::size_t n, Budgets const &budgets)
{
  if (n == 0)
    throw PreconditionError("wreath_group: degree must be positive");
  if (n > budgets.factorial_degree)
    throw BudgetExceeded("wreath_group: degree exceeds the factorial budget");
  double order = static_cast<double>(factorial(n));
  for (std::size_t i = 0; i < n; ++i)
    order *= static_cast<double>(G.order());
  if (order > static_cast<double>(budgets.group_order))
    throw BudgetExceeded("wreath_group: order " + std::to_string(static_cast<std::uint64_t>(order)) +
                         " exceeds the group budget " + std::to_string(budgets.group_order));

  std::vector<WreathElement> elements;
  elements.reserve(static_cast<std::size_t>(order));
  auto perms = all_permutations(n);
  std::vector<Element> g(n, 0);
  for (;;) {
    for (Permutation const &p : perms)
      elements.push_back({g, p});
    std::size_t i = n;
    while (i > 0 && g[i - 1] + 1 == G.order())
      g[--i] = 0;
    if (i == 0)
      break;
    ++g[i - 1];
  }

  WreathGroup out{G, n, trivial_group(), {}};
  out.elements = std::move(elements);
  std::size_t N = out.elements.size();
  std::vector<Element> table(N * N);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      table[a * N + b] = out.index_of(wr_mul(G, out.elements[a], out.elements[b]));

  std::vector<Element> gens;
  for (Element x : G.generators()) {
    std::vector<Element> v(n, G.identity());
    v[0] = x;
    gens.push_back(out.index_of({v, Permutation::identity(n)}));
  }
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    gens.push_back(out.index_of({std::vector<Element>(n, G.identity()),
                                 Permutation::transposition(n, i, i + 1)}));
  std::vector<std::string> names;
  for (auto const &x : out.elements) {
    std::string s = "(";
    for (std::size_t i = 0; i < n; ++i)
      s += (i ? "," : "") + G.name(x.g[i]);
    names.push_back(s + ";" + x.sigma.to_string() + ")");
  }
  out.group = FiniteGroup(std::move(table), N, std::move(gens), std::move(names));
  return out;
}

} // namespace stabdyn
