#include "stabdyn/stab_verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "stabdyn/errors.hpp"
#include "stabdyn/isomorphism.hpp"
#include "stabdyn/wreath.hpp"

namespace stabdyn
{

namespace
{

constexpr std::size_t npos = AutomorphismSet::npos;

/// Raised inside evaluators when a block has no component edge.
struct MissingBlock
{};

/// X, its cyclic partition of size m, and the component Y = (X_m, sigma^m).
struct Split
{
  std::uint64_t n = 1, m = 1, N = 1;
  ShiftHandle x, y;
  CyclicPartition part;
  SmaleDecomposition component;
  std::map<Word, EdgeId> block_to_edge;

  Split(ShiftHandle context, std::uint64_t n_, std::uint64_t m_, ShiftHandle comp = nullptr)
    : n(n_), m(m_), N(n_ * m_), x(std::move(context)), part(cyclic_partition(x->shift(), m_)),
      component(component_system(x->shift(), m_, x->budgets()))
  {
    y = comp ? std::move(comp) : ShiftContext::create(component.component_shift, x->budgets());
    if (!(y->shift() == component.component_shift))
      throw PreconditionError("component context does not match the component shift");
    for (EdgeId e = 0; e < component.path_dictionary.size(); ++e)
      block_to_edge.emplace(component.path_dictionary[e], e);
  }

  std::size_t class_of_edge(EdgeId e) const { return part.class_of[x->shift().edge(e).tail]; }

  EdgeId lookup(std::span<EdgeId const> block) const
  {
    auto it = block_to_edge.find(Word(block.begin(), block.end()));
    if (it == block_to_edge.end())
      throw MissingBlock{};
    return it->second;
  }

  /// rho(s)(T^i x) = T^{s(i)} x, period m, radius m - 1.
  SlidingBlockCode rho(Permutation const &s) const
  {
    std::size_t const R = m - 1;
    return SlidingBlockCode::from_evaluator(x, R, m, [&](std::size_t k, std::span<EdgeId const> w) {
             std::size_t i = (class_of_edge(w[R]) + m - k % m) % m;
             auto d = static_cast<std::int64_t>(s(static_cast<std::uint32_t>(i))) -
                      static_cast<std::int64_t>(i);
             return w[static_cast<std::size_t>(static_cast<std::int64_t>(R) + d)];
           })
      .canonical();
  }

  /// psi(g)(T^i x) = T^i g_i(x) for period-n codes g_i on Y.
  SlidingBlockCode psi(std::vector<SlidingBlockCode const *> const &g) const
  {
    std::size_t rY = 0;
    for (auto const *c : g)
      rY = std::max(rY, c->radius());
    std::size_t const R = rY * m + m - 1;
    return SlidingBlockCode::from_evaluator(
             x, R, N,
             [&](std::size_t k, std::span<EdgeId const> w) {
               std::size_t cls = class_of_edge(w[R]);
               std::size_t i = (cls + m - k % m) % m;
               std::size_t t = cls;
               std::size_t s = ((k + i) / m) % n;
               Word ywin(2 * rY + 1);
               for (std::size_t j = 0; j < ywin.size(); ++j)
                 ywin[j] = lookup(w.subspan(R + j * m - rY * m - t, m));
               SlidingBlockCode const &gi = *g[i];
               std::span<EdgeId const> sub(ywin.data() + rY - gi.radius(), gi.window_length());
               EdgeId v = gi.evaluate(static_cast<std::int64_t>(s), sub);
               return component.path_dictionary[v][t];
             })
      .canonical();
  }

  /// g_i = T^-i a T^i on X_m as Y-codes, for a code a fixing every class.
  std::optional<std::vector<SlidingBlockCode>> decompose(SlidingBlockCode const &a) const
  {
    std::size_t const r = a.radius();
    std::size_t const rho_y = (r + m - 1) / m;
    std::vector<SlidingBlockCode> out;
    try {
      for (std::size_t i = 0; i < m; ++i) {
        out.push_back(SlidingBlockCode::from_evaluator(
                        y, rho_y, n,
                        [&](std::size_t s, std::span<EdgeId const> u) {
                          Word xw;
                          for (EdgeId e : u) {
                            auto const &path = component.path_dictionary[e];
                            xw.insert(xw.end(), path.begin(), path.end());
                          }
                          auto offset = static_cast<std::int64_t>(s * m) -
                                        static_cast<std::int64_t>(rho_y * m) -
                                        static_cast<std::int64_t>(i);
                          Word image = apply_code(a, xw, offset);
                          return lookup(std::span<EdgeId const>(image).subspan(rho_y * m - r, m));
                        })
                        .canonical());
      }
    } catch (MissingBlock const &) {
      return std::nullopt;
    }
    return out;
  }
};

std::string tuple_text(std::vector<std::size_t> const &t)
{
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i)
    s += (i ? "," : "") + std::string("G#") + std::to_string(t[i]);
  return s + ")";
}

void fail(NamedCheck &check, std::string const &what)
{
  if (check.passed)
    check.counterexample = what;
  check.passed = false;
}

std::size_t identity_index(AutomorphismSet const &set)
{
  std::size_t i = set.index_of(SlidingBlockCode::identity(set.context));
  if (i == npos)
    throw PreconditionError("enumerated automorphism set lacks the identity");
  return i;
}

/// Tuples of component automorphisms: every tuple if they fit the limit,
/// else the single-coordinate tuples plus seeded random ones.
std::vector<std::vector<std::size_t>> choose_tuples(std::size_t order, std::size_t m,
                                                    std::size_t id, std::size_t limit,
                                                    std::uint64_t seed, bool &exhaustive)
{
  std::vector<std::vector<std::size_t>> out;
  double total = std::pow(static_cast<double>(order), static_cast<double>(m));
  exhaustive = total <= static_cast<double>(limit);
  if (exhaustive) {
    std::vector<std::size_t> t(m, 0);
    for (;;) {
      out.push_back(t);
      std::size_t i = m;
      while (i > 0 && t[i - 1] + 1 == order)
        t[--i] = 0;
      if (i == 0)
        break;
      ++t[i - 1];
    }
    return out;
  }
  out.push_back(std::vector<std::size_t>(m, id));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t e = 0; e < order && out.size() < limit / 2; ++e)
      if (e != id) {
        std::vector<std::size_t> t(m, id);
        t[i] = e;
        out.push_back(t);
      }
  std::mt19937_64 rng(seed);
  while (out.size() < limit) {
    std::vector<std::size_t> t(m);
    for (auto &x : t)
      x = rng() % order;
    out.push_back(t);
  }
  return out;
}

std::vector<std::int64_t> index_tuple(AutomorphismSet const &set,
                                      std::vector<SlidingBlockCode> const &codes)
{
  std::vector<std::int64_t> out;
  for (auto const &c : codes) {
    std::size_t i = set.index_of(c);
    out.push_back(i == npos ? -1 : static_cast<std::int64_t>(i));
  }
  return out;
}

} // namespace

SlidingBlockCode split_rho(ShiftHandle const &context, std::uint64_t m, Permutation const &s)
{
  if (s.degree() != m)
    throw PreconditionError("split_rho: permutation degree differs from m");
  return Split(context, 1, m).rho(s);
}

SlidingBlockCode split_psi(ShiftHandle const &context, std::uint64_t n, std::uint64_t m,
                           std::vector<SlidingBlockCode> const &g)
{
  if (g.size() != m)
    throw PreconditionError("split_psi: expected one component code per class");
  Split const split(context, n, m);
  std::vector<SlidingBlockCode const *> ptr;
  for (auto const &c : g) {
    if (!(c.shift() == split.component.component_shift) || n % c.period() != 0)
      throw PreconditionError("split_psi: component code is not an automorphism of the power");
    ptr.push_back(&c);
  }
  return split.psi(ptr);
}

std::optional<std::vector<SlidingBlockCode>> split_components(ShiftHandle const &context,
                                                              ShiftHandle const &component,
                                                              std::uint64_t n, std::uint64_t m,
                                                              SlidingBlockCode const &a)
{
  return Split(context, n, m, component).decompose(a);
}

bool WreathDecompositionReport::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](NamedCheck const &c) { return c.passed; });
}

bool QuotientReport::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](NamedCheck const &c) { return c.passed; });
}

WreathDecompositionReport verify_split_sequence(EdgeShift const &shift, std::uint64_t n,
                                                std::uint64_t m, std::size_t radius,
                                                std::optional<std::size_t> inverse_radius,
                                                SplitOptions const &options,
                                                Budgets const &budgets)
{
  if (n == 0 || m == 0)
    throw PreconditionError("verify_split_sequence: n and m must be positive");
  std::uint64_t const p = period(shift);
  if (p % m != 0)
    throw NoSuchEigenvalue("m = " + std::to_string(m) + " does not divide the period " +
                           std::to_string(p));
  if (!is_power_transitive(shift, n))
    throw PreconditionError("sigma^" + std::to_string(n) + " is not transitive (gcd(n, " +
                            std::to_string(p) + ") != 1)");
  if (m > budgets.factorial_degree)
    throw BudgetExceeded("verify_split_sequence: Sym(m) exceeds the factorial budget");

  std::size_t const R_inv = inverse_radius.value_or(2 * radius);
  Split const split(ShiftContext::create(shift, budgets), n, m);

  WreathDecompositionReport rep;
  rep.sft_hash = shift.hash();
  rep.matrix = shift.matrix_text();
  rep.n = n;
  rep.m = m;
  rep.radius = radius;
  rep.inverse_radius = R_inv;

  AutomorphismSet const A = enumerate_automorphisms(split.x, split.N, radius, R_inv,
                                                    options.enumeration);
  AutomorphismSet const G = enumerate_automorphisms(split.y, n, radius, R_inv,
                                                    options.enumeration);
  rep.aut_count = A.size();
  rep.component_aut_count = G.size();
  std::size_t const g_id = identity_index(G);
  auto const perms = all_permutations(m);

  // pi on A.
  NamedCheck pi_defined{"pi_defined_on_A", true, 0, {}};
  std::vector<std::optional<Permutation>> pi(A.size());
  for (std::size_t a = 0; a < A.size(); ++a) {
    ++pi_defined.cases;
    try {
      pi[a] = partition_action(A.elements[a], split.part);
      rep.pi_table.push_back(pi[a]->images());
    } catch (ImageSplitsClasses const &) {
      fail(pi_defined, "A#" + std::to_string(a) + " splits a class");
      rep.pi_table.push_back({});
    }
  }
  rep.checks.push_back(pi_defined);
  auto pi_of = [&](SlidingBlockCode const &c) -> std::optional<Permutation> {
    try {
      return partition_action(c, split.part);
    } catch (ImageSplitsClasses const &) {
      return std::nullopt;
    }
  };

  std::vector<Permutation> image;
  for (auto const &q : pi)
    if (q && std::find(image.begin(), image.end(), *q) == image.end())
      image.push_back(*q);
  rep.image_count = image.size();
  for (auto const &q : pi)
    if (q && q->is_identity())
      ++rep.kernel_count;
  for (auto const &q : pi)
    if (q && !q->is_identity() && q->images() == Permutation::rotation(m, (*q)(0)).images())
      ++rep.rotating_elements;

  // Product table of A; -1 when the product leaves the radius bounds.
  std::vector<std::size_t> prod(A.size() * A.size());
  for (std::size_t a = 0; a < A.size(); ++a)
    for (std::size_t b = 0; b < A.size(); ++b)
      prod[a * A.size() + b] = A.index_of(compose(A.elements[a], A.elements[b]));

  NamedCheck pi_hom{"pi_homomorphism", true, 0, {}};
  for (std::size_t a = 0; a < A.size(); ++a)
    for (std::size_t b = 0; b < A.size(); ++b) {
      std::size_t c = prod[a * A.size() + b];
      if (c == npos || !pi[a] || !pi[b] || !pi[c])
        continue;
      ++pi_hom.cases;
      if (*pi[c] != *pi[a] * *pi[b])
        fail(pi_hom, "pi(A#" + std::to_string(a) + " A#" + std::to_string(b) +
                       ") != pi(A#" + std::to_string(a) + ") pi(A#" + std::to_string(b) + ")");
    }
  rep.checks.push_back(pi_hom);

  // rho.
  std::vector<SlidingBlockCode> rho;
  for (auto const &s : perms) {
    rho.push_back(split.rho(s));
    std::size_t idx = A.index_of(rho.back());
    rep.rho_table.push_back(idx == npos ? -1 : static_cast<std::int64_t>(idx));
  }
  NamedCheck rho_section{"pi_rho_identity", true, 0, {}};
  NamedCheck rho_hom{"rho_homomorphism", true, 0, {}};
  NamedCheck rho_inv{"rho_automorphism", true, 0, {}};
  for (std::size_t i = 0; i < perms.size(); ++i) {
    ++rho_section.cases;
    auto q = pi_of(rho[i]);
    if (!q || *q != perms[i])
      fail(rho_section, "pi(rho(" + perms[i].to_string() + ")) != " + perms[i].to_string());
    ++rho_inv.cases;
    auto const &back = rho[perms[i].inverse().rank()];
    if (!rho[i].is_consistent() || !is_identity(compose(rho[i], back)) ||
        !is_identity(compose(back, rho[i])))
      fail(rho_inv, "rho(" + perms[i].to_string() + ") is not inverted by rho of the inverse");
    for (std::size_t j = 0; j < perms.size(); ++j) {
      ++rho_hom.cases;
      if (!same_map(compose(rho[i], rho[j]), rho[(perms[i] * perms[j]).rank()]))
        fail(rho_hom, "rho(" + perms[i].to_string() + ") rho(" + perms[j].to_string() +
                        ") != rho(product)");
    }
  }
  rep.checks.push_back(rho_section);
  rep.checks.push_back(rho_hom);
  rep.checks.push_back(rho_inv);

  // psi on chosen tuples.
  auto tuples = choose_tuples(G.size(), m, g_id, options.tuple_limit, options.seed,
                              rep.tuples_exhaustive);
  rep.tuples_checked = tuples.size();
  auto psi_of = [&](std::vector<std::size_t> const &t, bool inverse) {
    std::vector<SlidingBlockCode const *> g;
    for (std::size_t e : t)
      g.push_back(inverse ? &G.inverses[e] : &G.elements[e]);
    return split.psi(g);
  };
  std::vector<SlidingBlockCode> psi;
  for (auto const &t : tuples)
    psi.push_back(psi_of(t, false));

  NamedCheck psi_aut{"psi_automorphism", true, 0, {}};
  NamedCheck psi_kernel{"psi_image_in_kernel", true, 0, {}};
  NamedCheck psi_inj{"psi_injective", true, 0, {}};
  for (std::size_t k = 0; k < tuples.size(); ++k) {
    ++psi_aut.cases;
    SlidingBlockCode inv = psi_of(tuples[k], true);
    if (!psi[k].is_consistent() || !is_identity(compose(psi[k], inv)) ||
        !is_identity(compose(inv, psi[k])))
      fail(psi_aut, "psi" + tuple_text(tuples[k]) + " is not an automorphism");
    ++psi_kernel.cases;
    auto q = pi_of(psi[k]);
    if (!q || !q->is_identity())
      fail(psi_kernel, "pi(psi" + tuple_text(tuples[k]) + ") != 1");
    ++psi_inj.cases;
    auto back = split.decompose(psi[k]);
    bool same = back.has_value();
    for (std::size_t i = 0; same && i < m; ++i)
      same = same_map((*back)[i], G.elements[tuples[k][i]]);
    if (!same)
      fail(psi_inj, "psi" + tuple_text(tuples[k]) + " does not determine its components");
  }
  rep.checks.push_back(psi_aut);
  rep.checks.push_back(psi_inj);
  rep.checks.push_back(psi_kernel);

  std::mt19937_64 rng(options.seed);
  NamedCheck psi_hom{"psi_homomorphism", true, 0, {}};
  for (std::size_t k = 0; k < options.pair_limit && !tuples.empty(); ++k) {
    std::size_t a = rng() % tuples.size(), b = rng() % tuples.size();
    std::vector<SlidingBlockCode> prodc;
    for (std::size_t i = 0; i < m; ++i)
      prodc.push_back(compose(G.elements[tuples[a][i]], G.elements[tuples[b][i]]));
    std::vector<SlidingBlockCode const *> ptr;
    for (auto const &c : prodc)
      ptr.push_back(&c);
    ++psi_hom.cases;
    if (!same_map(compose(psi[a], psi[b]), split.psi(ptr)))
      fail(psi_hom, "psi" + tuple_text(tuples[a]) + " psi" + tuple_text(tuples[b]) +
                      " != psi(product)");
  }
  rep.checks.push_back(psi_hom);

  // ker pi within A lies in the image of psi.
  NamedCheck kernel{"kernel_in_psi_image", true, 0, {}};
  for (std::size_t a = 0; a < A.size(); ++a) {
    if (!pi[a] || !pi[a]->is_identity())
      continue;
    ++kernel.cases;
    auto parts = split.decompose(A.elements[a]);
    if (!parts) {
      fail(kernel, "A#" + std::to_string(a) + " has a component block outside X_m");
      continue;
    }
    std::vector<SlidingBlockCode const *> ptr;
    for (auto const &c : *parts)
      ptr.push_back(&c);
    if (!same_map(split.psi(ptr), A.elements[a]))
      fail(kernel, "A#" + std::to_string(a) + " != psi of its components");
    rep.psi_table.emplace_back(a, index_tuple(G, *parts));
  }
  rep.checks.push_back(kernel);

  // rho(s)^-1 psi(g) rho(s) = psi(h) with h_i = g_{s(i)}.
  NamedCheck relation{"conjugation_relation", true, 0, {}};
  for (std::size_t k = 0; k < tuples.size(); ++k)
    for (std::size_t si = 0; si < perms.size(); ++si) {
      Permutation const &s = perms[si];
      std::vector<std::size_t> h(m);
      for (std::uint32_t i = 0; i < m; ++i)
        h[i] = tuples[k][s(i)];
      SlidingBlockCode lhs =
        compose(rho[s.inverse().rank()], compose(psi[k], rho[si]));
      ++relation.cases;
      if (!same_map(lhs, psi_of(h, false)))
        fail(relation, "s = " + s.to_string() + ", g = " + tuple_text(tuples[k]));
    }
  rep.checks.push_back(relation);

  // (g, s) -> rho(s) psi(g) is a homomorphism from G wr Sym(m) with
  // (g, s)(h, t) = (g_{t^-1} h, s t).
  NamedCheck wreath_hom{"wreath_homomorphism", true, 0, {}};
  for (std::size_t k = 0; k < options.pair_limit && !tuples.empty(); ++k) {
    std::size_t a = rng() % tuples.size(), b = rng() % tuples.size();
    std::size_t s = rng() % perms.size(), t = rng() % perms.size();
    std::vector<SlidingBlockCode> prodc;
    for (std::uint32_t i = 0; i < m; ++i)
      prodc.push_back(
        compose(G.elements[tuples[a][perms[t](i)]], G.elements[tuples[b][i]]));
    std::vector<SlidingBlockCode const *> ptr;
    for (auto const &c : prodc)
      ptr.push_back(&c);
    SlidingBlockCode lhs = compose(compose(rho[s], psi[a]), compose(rho[t], psi[b]));
    SlidingBlockCode rhs = compose(rho[(perms[s] * perms[t]).rank()], split.psi(ptr));
    ++wreath_hom.cases;
    if (!same_map(lhs, rhs))
      fail(wreath_hom, "(" + tuple_text(tuples[a]) + "," + perms[s].to_string() + ") (" +
                         tuple_text(tuples[b]) + "," + perms[t].to_string() + ")");
  }
  rep.checks.push_back(wreath_hom);

  // Largest composition-closed core of A found greedily; on it pi is a
  // homomorphism of finite groups and the orders must multiply.
  std::vector<char> in_core(A.size(), 1);
  for (std::size_t a = 0; a < A.size(); ++a)
    if (!pi[a])
      in_core[a] = 0;
  for (;;) {
    std::vector<std::size_t> bad(A.size(), 0);
    std::size_t worst = npos;
    for (std::size_t a = 0; a < A.size(); ++a) {
      if (!in_core[a])
        continue;
      for (std::size_t b = 0; b < A.size(); ++b) {
        if (!in_core[b])
          continue;
        std::size_t c = prod[a * A.size() + b];
        if (c == npos || !in_core[c]) {
          ++bad[a];
          ++bad[b];
        }
      }
    }
    for (std::size_t a = 0; a < A.size(); ++a)
      if (bad[a] && (worst == npos || bad[a] >= bad[worst]))
        worst = a;
    if (worst == npos)
      break;
    in_core[worst] = 0;
  }
  std::vector<Permutation> core_image;
  for (std::size_t a = 0; a < A.size(); ++a) {
    if (!in_core[a])
      continue;
    ++rep.core_size;
    if (pi[a]->is_identity())
      ++rep.core_kernel;
    if (std::find(core_image.begin(), core_image.end(), *pi[a]) == core_image.end())
      core_image.push_back(*pi[a]);
  }
  rep.core_image = core_image.size();
  NamedCheck exact{"exactness_on_core", rep.core_size == rep.core_kernel * rep.core_image, 1, ""};
  if (!exact.passed)
    exact.counterexample = std::to_string(rep.core_size) + " != " +
                           std::to_string(rep.core_kernel) + " * " +
                           std::to_string(rep.core_image);
  rep.checks.push_back(exact);

  if (rep.aut_count != rep.kernel_count * rep.image_count)
    rep.notes.push_back("|A| = " + std::to_string(rep.aut_count) + " differs from |ker| * |im| = " +
                        std::to_string(rep.kernel_count) + " * " +
                        std::to_string(rep.image_count) +
                        ": A is radius-truncated and not closed under composition");
  rep.notes.push_back("gamma = sigma^" + std::to_string(split.N) +
                      " has rotation index 0, so the gcd(j, m) < m branch is not exercised");
  if (m > 1 && rep.rotating_elements == 0)
    rep.notes.push_back("no element of A rotates the partition at this radius");
  if (!rep.tuples_exhaustive)
    rep.notes.push_back("psi tuples sampled: " + std::to_string(rep.tuples_checked) + " of " +
                        std::to_string(G.size()) + "^" + std::to_string(m));
  return rep;
}

namespace
{

struct UnionFind
{
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x)
  {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a != b)
      parent[std::max(a, b)] = std::min(a, b);
  }
};

/// Coset of `code` modulo <T^step>: the class of some T^{k step} code in A.
std::optional<std::size_t> find_coset(AutomorphismSet const &A, std::vector<std::size_t> const &cls,
                                      SlidingBlockCode const &code, std::int64_t step,
                                      std::int64_t reach)
{
  for (std::int64_t k = 0; k <= reach; ++k)
    for (std::int64_t sgn : {1, -1}) {
      if (k == 0 && sgn < 0)
        continue;
      SlidingBlockCode c =
        k == 0 ? code : compose(SlidingBlockCode::shift_power(A.context, sgn * k * step), code);
      std::size_t i = A.index_of(c);
      if (i != npos)
        return cls[i];
    }
  return std::nullopt;
}

struct Quotient
{
  QuotientSummary summary;
  std::vector<std::size_t> class_of; ///< element of A -> coset
};

Quotient quotient(AutomorphismSet const &A, std::int64_t step, std::string const &label,
                  QuotientReport &rep)
{
  Quotient out;
  out.summary.enumerated = A.size();
  UnionFind uf(A.size());
  SlidingBlockCode const s = SlidingBlockCode::shift_power(A.context, step);
  for (std::size_t a = 0; a < A.size(); ++a) {
    std::size_t b = A.index_of(compose(s, A.elements[a]));
    if (b != npos)
      uf.unite(a, b);
  }
  std::map<std::size_t, std::size_t> root_to_class;
  out.class_of.resize(A.size());
  for (std::size_t a = 0; a < A.size(); ++a) {
    auto [it, fresh] = root_to_class.emplace(uf.find(a), root_to_class.size());
    if (fresh)
      out.summary.representatives.push_back(a);
    out.class_of[a] = it->second;
  }
  std::size_t const k = out.summary.representatives.size();
  out.summary.order = k;

  auto const reach = static_cast<std::int64_t>(2 * A.radius + 2);
  std::vector<std::size_t> products(A.size() * A.size());
  for (std::size_t a = 0; a < A.size(); ++a)
    for (std::size_t b = 0; b < A.size(); ++b) {
      auto c = find_coset(A, out.class_of, compose(A.elements[a], A.elements[b]), step, reach);
      if (!c) {
        rep.inconclusive = true;
        rep.notes.push_back(label + ": product A#" + std::to_string(a) + " A#" +
                            std::to_string(b) + " leaves the radius bounds");
        return out;
      }
      products[a * A.size() + b] = *c;
    }
  std::vector<Element> table(k * k);
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y)
      table[x * k + y] = static_cast<Element>(
        products[out.summary.representatives[x] * A.size() + out.summary.representatives[y]]);
  // Every choice of representatives must give the same coset.
  for (std::size_t a = 0; a < A.size(); ++a)
    for (std::size_t b = 0; b < A.size(); ++b)
      if (products[a * A.size() + b] != table[out.class_of[a] * k + out.class_of[b]]) {
        rep.inconclusive = true;
        rep.notes.push_back(label + ": coset product depends on representatives");
        return out;
      }
  std::vector<Element> gens(k);
  std::iota(gens.begin(), gens.end(), Element{0});
  try {
    out.summary.group = FiniteGroup(std::move(table), k, std::move(gens));
  } catch (PreconditionError const &e) {
    rep.inconclusive = true;
    rep.notes.push_back(label + ": cosets do not form a group (" + e.what() + ")");
  }
  return out;
}

} // namespace

QuotientReport verify_quotient_isos(EdgeShift const &shift, std::uint64_t m, std::size_t radius,
                                    std::optional<std::size_t> inverse_radius,
                                    Budgets const &budgets)
{
  std::uint64_t const p = period(shift);
  if (m != p)
    throw PreconditionError("verify_quotient_isos: m must equal the period " + std::to_string(p));
  std::size_t const R_inv = inverse_radius.value_or(2 * radius);
  Split const split(ShiftContext::create(shift, budgets), 1, m);

  QuotientReport rep;
  rep.sft_hash = shift.hash();
  rep.m = m;
  rep.radius = radius;
  rep.inverse_radius = R_inv;

  AutomorphismSet const A = enumerate_automorphisms(split.x, 1, radius, R_inv);
  AutomorphismSet const G = enumerate_automorphisms(split.y, 1, radius, R_inv);
  auto const mm = static_cast<std::int64_t>(m);
  Quotient const by_shift = quotient(A, 1, "Aut(T)/<T>", rep);
  Quotient const by_power = quotient(A, mm, "Aut(T)/<T^m>", rep);
  Quotient const comp = quotient(G, 1, "Aut(S)/<S>", rep);
  rep.mod_shift = by_shift.summary;
  rep.mod_shift_power = by_power.summary;
  rep.component = comp.summary;
  if (rep.inconclusive)
    return rep;

  FiniteGroup const &q1 = *by_shift.summary.group;
  FiniteGroup const &qm = *by_power.summary.group;
  FiniteGroup const &qs = *comp.summary.group;
  FiniteGroup const target = direct_product(qs, cyclic_group(m));

  NamedCheck item_ii{"quotient_by_shift_isomorphic", is_isomorphic(q1, qs, budgets).has_value(),
                     1, ""};
  if (!item_ii.passed)
    item_ii.counterexample = "orders " + std::to_string(q1.order()) + " and " +
                             std::to_string(qs.order());
  rep.checks.push_back(item_ii);
  NamedCheck item_i{"quotient_by_power_isomorphic",
                    is_isomorphic(qm, target, budgets).has_value(), 1, ""};
  if (!item_i.passed)
    item_i.counterexample = "orders " + std::to_string(qm.order()) + " and " +
                            std::to_string(target.order());
  rep.checks.push_back(item_i);

  // The explicit map g <T^m> -> (g_0 <S>, l).
  NamedCheck theta{"explicit_quotient_map", true, 0, {}};
  std::vector<Element> map(qm.order());
  auto const reach = static_cast<std::int64_t>(2 * radius + 2);
  Permutation const c = Permutation::rotation(m, 1);
  for (std::size_t k = 0; k < qm.order(); ++k) {
    ++theta.cases;
    SlidingBlockCode const &g = A.elements[by_power.summary.representatives[k]];
    std::size_t l = partition_action(g, split.part)(0);
    SlidingBlockCode g1 = compose(split.rho(c.pow(-static_cast<std::int64_t>(l))), g);
    auto parts = split.decompose(g1);
    std::optional<std::size_t> coset;
    if (parts)
      coset = find_coset(G, comp.class_of, (*parts)[0], 1, reach);
    if (!coset) {
      rep.inconclusive = true;
      rep.notes.push_back("first component of coset " + std::to_string(k) +
                          " lies outside the enumerated component automorphisms");
      return rep;
    }
    map[k] = static_cast<Element>(*coset * m + l);
  }
  if (!is_isomorphism(qm, target, map))
    fail(theta, "g -> (g_0, pi(g)(0)) is not an isomorphism");
  rep.checks.push_back(theta);
  return rep;
}

namespace
{

std::uint64_t wreath_order(std::size_t base, std::uint64_t n, std::uint64_t cap)
{
  double order = static_cast<double>(factorial(n));
  for (std::uint64_t i = 0; i < n; ++i)
    order *= static_cast<double>(base);
  return order > static_cast<double>(cap) ? cap + 1 : static_cast<std::uint64_t>(order);
}

RigidityReport rigidity_from(FiniteGroup const &G, std::uint64_t n, FiniteGroup const &H,
                             std::uint64_t m, FiniteGroup const *GW, FiniteGroup const *HW,
                             Budgets const &budgets)
{
  RigidityReport rep;
  rep.n = n;
  rep.m = m;
  rep.order_g = G.order();
  rep.order_h = H.order();
  rep.hypotheses_hold = n >= 2 && m >= 2 && G.order() > 1 && H.order() > 1;
  rep.wreath_order_g = wreath_order(G.order(), n, budgets.group_order);
  rep.wreath_order_h = wreath_order(H.order(), m, budgets.group_order);
  if (n == m)
    rep.bases_isomorphic = is_isomorphic(G, H, budgets).has_value();
  if (rep.wreath_order_g != rep.wreath_order_h) {
    rep.message = "orders differ; no isomorphism";
    return rep;
  }
  std::optional<WreathGroup> gw, hw;
  if (!GW) {
    gw = wreath_group(G, n, budgets);
    GW = &gw->group;
  }
  if (!HW) {
    hw = wreath_group(H, m, budgets);
    HW = &hw->group;
  }
  rep.wreaths_isomorphic = is_isomorphic(*GW, *HW, budgets).has_value();
  bool const bad = rep.wreaths_isomorphic &&
                   (n != m || (n >= 4 && rep.bases_isomorphic == false));
  rep.violation = rep.hypotheses_hold && bad;
  if (rep.violation)
    rep.message = "THEOREM-VIOLATION: wreath products isomorphic with n = " + std::to_string(n) +
                  ", m = " + std::to_string(m);
  else if (bad)
    rep.message = "isomorphic, outside the theorem's hypotheses";
  else if (rep.wreaths_isomorphic)
    rep.message = "isomorphic; n = m";
  else
    rep.message = "no isomorphism found";
  return rep;
}

} // namespace

RigidityReport check_wreath_rigidity(FiniteGroup const &G, std::uint64_t n, FiniteGroup const &H,
                                     std::uint64_t m, Budgets const &budgets)
{
  if (n == 0 || m == 0)
    throw PreconditionError("check_wreath_rigidity: degrees must be positive");
  return rigidity_from(G, n, H, m, nullptr, nullptr, budgets);
}

RigiditySweep rigidity_sweep(std::uint64_t max_order, std::uint64_t max_degree,
                             Budgets const &budgets)
{
  RigiditySweep sweep;
  sweep.max_order = max_order;
  struct Entry
  {
    std::string name;
    FiniteGroup const *base;
    std::uint64_t degree;
    std::uint64_t order;
  };
  auto const groups = small_groups();
  std::vector<Entry> entries;
  for (auto const &g : groups) {
    if (g.group.order() == 1)
      continue;
    for (std::uint64_t d = 2; d <= max_degree; ++d) {
      std::uint64_t order = wreath_order(g.group.order(), d, max_order);
      if (order <= max_order)
        entries.push_back({g.name, &g.group, d, order});
    }
  }
  std::map<std::pair<std::string, std::uint64_t>, WreathGroup> cache;
  auto wreath = [&](Entry const &e) -> FiniteGroup const & {
    auto key = std::make_pair(e.name, e.degree);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, wreath_group(*e.base, e.degree, budgets)).first;
    return it->second.group;
  };
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i; j < entries.size(); ++j) {
      ++sweep.pairs_considered;
      Entry const &a = entries[i];
      Entry const &b = entries[j];
      if (a.order != b.order)
        continue;
      ++sweep.pairs_materialized;
      RigidityReport rep = rigidity_from(*a.base, a.degree, *b.base, b.degree, &wreath(a),
                                         &wreath(b), budgets);
      if (rep.violation)
        ++sweep.violations;
      sweep.materialized.push_back({a.name + "^" + std::to_string(a.degree),
                                    b.name + "^" + std::to_string(b.degree), rep});
    }
  std::sort(sweep.materialized.begin(), sweep.materialized.end(),
            [](RigiditySweepEntry const &x, RigiditySweepEntry const &y) {
              return std::tie(x.report.wreath_order_g, x.g_name, x.h_name) <
                     std::tie(y.report.wreath_order_g, y.g_name, y.h_name);
            });
  return sweep;
}

EigComparison compare_rational_eigs(EdgeShift const &x, EdgeShift const &y)
{
  EigComparison out;
  out.period_x = period(x);
  out.period_y = period(y);
  out.eig_x = rational_eigs(x);
  out.eig_y = rational_eigs(y);
  out.equal = out.eig_x == out.eig_y;
  return out;
}

long double precise_entropy(EdgeShift const &shift)
{
  EntropyResult e = entropy(shift);
  if (std::uint64_t k = integer_perron_root(shift, e.perron))
    return std::log(static_cast<long double>(k));
  if (shift.state_count() <= 6)
    return std::log(static_cast<long double>(perron_root_from_charpoly(shift)));
  return std::log(static_cast<long double>(e.perron));
}

namespace
{

std::map<std::uint64_t, std::uint64_t> factorize(std::uint64_t x)
{
  std::map<std::uint64_t, std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= x; ++p)
    while (x % p == 0) {
      ++out[p];
      x /= p;
    }
  if (x > 1)
    ++out[x];
  return out;
}

ComponentEntropyCheck component_check(EdgeShift const &shift, long double h)
{
  SmaleDecomposition s = smale(shift);
  ComponentEntropyCheck out;
  out.period = s.period;
  out.component_entropy = entropy(s.component_shift).entropy;
  out.scaled = static_cast<double>(s.period) * static_cast<double>(h);
  out.agrees = std::abs(out.component_entropy - out.scaled) <= 1e-9;
  return out;
}

} // namespace

EntropyRatioReport entropy_ratio(EdgeShift const &x, EdgeShift const &y,
                                 std::uint64_t max_denominator, double tolerance)
{
  if (!is_irreducible(x) || !is_irreducible(y))
    throw ReducibleShift("entropy_ratio needs irreducible shifts");
  if (tolerance < 1e-9)
    throw PreconditionError("entropy_ratio: tolerance must be at least 1e-9");
  if (max_denominator == 0)
    throw PreconditionError("entropy_ratio: max_denominator must be positive");
  EntropyRatioReport rep;
  rep.max_denominator = max_denominator;
  rep.tolerance = tolerance;
  rep.h_x = precise_entropy(x);
  rep.h_y = precise_entropy(y);
  if (rep.h_x <= 1e-15L || rep.h_y <= 1e-15L)
    throw ZeroEntropy("entropy ratio undefined: zero entropy");
  rep.component_x = component_check(x, rep.h_x);
  rep.component_y = component_check(y, rep.h_y);
  rep.ratio = rep.h_x / rep.h_y;

  // Continued-fraction convergents p_k / q_k.
  long double rest = rep.ratio;
  std::uint64_t p0 = 1, q0 = 0, p1 = 0, q1 = 1;
  bool chosen = false;
  for (int step = 0; step < 64; ++step) {
    long double a = std::floor(rest);
    if (a > 1e18L)
      break;
    auto ai = static_cast<std::uint64_t>(a);
    std::uint64_t p2 = ai * p0 + p1, q2 = ai * q0 + q1;
    if (q2 > max_denominator)
      break;
    p1 = p0;
    q1 = q0;
    p0 = p2;
    q0 = q2;
    rep.convergents.emplace_back(p2, q2);
    long double residual = std::abs(rep.ratio - static_cast<long double>(p2) / q2);
    if (!chosen) {
      rep.p = p2;
      rep.q = q2;
      rep.residual = residual;
    }
    if (!chosen && residual <= tolerance) {
      chosen = true;
      rep.rational_within_tolerance = true;
    }
    long double frac = rest - a;
    if (frac < 1e-18L)
      break;
    rest = 1.0L / frac;
  }

  EntropyResult ex = entropy(x), ey = entropy(y);
  rep.perron_x = integer_perron_root(x, ex.perron);
  rep.perron_y = integer_perron_root(y, ey.perron);
  if (rep.perron_x && rep.perron_y) {
    auto fx = factorize(rep.perron_x), fy = factorize(rep.perron_y);
    bool equal = true;
    for (auto const &[prime, e] : fx)
      equal = equal && e * rep.q == (fy.count(prime) ? fy[prime] : 0) * rep.p;
    for (auto const &[prime, e] : fy)
      equal = equal && e * rep.p == (fx.count(prime) ? fx[prime] : 0) * rep.q;
    rep.exact_confirmation = equal;
  }
  return rep;
}

std::vector<SplitInstance> split_instance_matrix()
{
  std::vector<SplitInstance> out;
  auto add = [&](std::string name, std::string matrix, std::uint64_t n, std::uint64_t m,
                 std::size_t r) { out.push_back({std::move(name), std::move(matrix), n, m, r}); };
  add("full2", "2", 1, 1, 1);
  add("full2", "2", 2, 1, 1);
  add("full2", "2", 3, 1, 0);
  for (std::uint64_t n = 1; n <= 3; ++n)
    add("golden", "1 1 / 1 0", n, 1, 1);
  for (std::uint64_t m : {1, 2})
    for (std::uint64_t n : {1, 3})
      add("doubled2", "0 2 / 1 0", n, m, 1);
  for (std::uint64_t m : {1, 3})
    for (std::uint64_t n : {1, 2})
      add("cycle3_doubled", "0 1 0 / 0 0 2 / 1 0 0", n, m, 1);
  return out;
}

} // namespace stabdyn
