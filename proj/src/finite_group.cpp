#include "stabdyn/finite_group.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

/// Closure of `gens` under `mul`, as a membership mask. Generators already in
/// the running closure are skipped, so the BFS is rerun O(log N) times.
template <class Mul>
std::vector<char> closure_mask(std::size_t order, Element identity, std::span<Element const> gens,
                               Mul const &mul)
{
  std::vector<char> in(order, 0);
  in[identity] = 1;
  std::vector<Element> members{identity};
  std::vector<Element> kept;
  for (Element s : gens) {
    if (in[s])
      continue;
    kept.push_back(s);
    // Extend by BFS: every new member times every kept generator.
    std::vector<Element> frontier = members;
    while (!frontier.empty()) {
      std::vector<Element> next;
      for (Element x : frontier)
        for (Element k : kept) {
          Element y = mul(x, k);
          if (!in[y]) {
            in[y] = 1;
            members.push_back(y);
            next.push_back(y);
          }
        }
      frontier = std::move(next);
    }
  }
  return in;
}

std::vector<Element> mask_elements(std::vector<char> const &mask)
{
  std::vector<Element> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i])
      out.push_back(static_cast<Element>(i));
  return out;
}

bool size_then_lex(std::vector<Element> const &a, std::vector<Element> const &b)
{
  if (a.size() != b.size())
    return a.size() < b.size();
  return a < b;
}

/// Closes `seed` under pairwise joins; `join` returns the subgroup generated by two.
template <class Join>
std::vector<std::vector<Element>> join_closure(std::vector<std::vector<Element>> seed,
                                               std::vector<std::vector<Element>> const &atoms,
                                               Join const &join)
{
  std::set<std::vector<Element>> found(seed.begin(), seed.end());
  std::vector<std::vector<Element>> queue(found.begin(), found.end());
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (auto const &atom : atoms) {
      if (std::includes(queue[i].begin(), queue[i].end(), atom.begin(), atom.end()))
        continue;
      auto j = join(queue[i], atom);
      if (found.insert(j).second)
        queue.push_back(std::move(j));
    }
  std::vector<std::vector<Element>> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), size_then_lex);
  return out;
}

} // namespace

FiniteGroup::FiniteGroup(std::vector<Element> table, std::size_t order,
                         std::vector<Element> generators, std::vector<std::string> names)
  : order_(order), table_(std::move(table)), generators_(std::move(generators)),
    names_(std::move(names))
{
  if (order_ == 0)
    throw PreconditionError("group order must be positive");
  if (table_.size() != order_ * order_)
    throw PreconditionError("multiplication table has " + std::to_string(table_.size()) +
                            " entries, expected " + std::to_string(order_ * order_));
  if (!names_.empty() && names_.size() != order_)
    throw PreconditionError("element name count differs from the order");
  for (Element x : table_)
    if (x >= order_)
      throw PreconditionError("table entry out of range");
  for (Element g : generators_)
    if (g >= order_)
      throw PreconditionError("generator out of range");

  bool found = false;
  for (Element e = 0; e < order_ && !found; ++e) {
    bool ok = true;
    for (Element x = 0; x < order_ && ok; ++x)
      ok = mul(e, x) == x && mul(x, e) == x;
    if (ok) {
      identity_ = e;
      found = true;
    }
  }
  if (!found)
    throw PreconditionError("table has no identity");

  inverse_.assign(order_, 0);
  for (Element a = 0; a < order_; ++a) {
    std::vector<char> row(order_, 0);
    bool has_inverse = false;
    for (Element b = 0; b < order_; ++b) {
      Element ab = mul(a, b);
      if (row[ab])
        throw PreconditionError("table row " + std::to_string(a) + " is not a permutation");
      row[ab] = 1;
      if (ab == identity_) {
        if (mul(b, a) != identity_)
          throw PreconditionError("left and right inverses differ");
        inverse_[a] = b;
        has_inverse = true;
      }
    }
    if (!has_inverse)
      throw PreconditionError("element without inverse");
  }

  auto check = [&](Element a, Element b, Element c) {
    if (mul(mul(a, b), c) != mul(a, mul(b, c)))
      throw PreconditionError("table is not associative at (" + std::to_string(a) + ", " +
                              std::to_string(b) + ", " + std::to_string(c) + ")");
  };
  if (order_ <= 64) {
    for (Element a = 0; a < order_; ++a)
      for (Element b = 0; b < order_; ++b)
        for (Element c = 0; c < order_; ++c)
          check(a, b, c);
  } else {
    std::mt19937_64 rng(order_);
    std::uniform_int_distribution<Element> pick(0, static_cast<Element>(order_ - 1));
    for (int i = 0; i < 20000; ++i)
      check(pick(rng), pick(rng), pick(rng));
  }

  if (generate(generators_).size() != order_)
    throw PreconditionError("generators do not generate the group");

  orders_.assign(order_, 1);
  for (Element a = 0; a < order_; ++a) {
    Element x = a;
    while (x != identity_) {
      x = mul(x, a);
      ++orders_[a];
    }
  }
}

Element FiniteGroup::pow(Element a, std::int64_t k) const
{
  if (k < 0) {
    a = inv(a);
    k = -k;
  }
  k %= static_cast<std::int64_t>(orders_[a]);
  Element out = identity_;
  for (std::int64_t i = 0; i < k; ++i)
    out = mul(out, a);
  return out;
}

std::string FiniteGroup::name(Element a) const
{
  return names_.empty() ? std::to_string(a) : names_[a];
}

bool FiniteGroup::is_abelian() const
{
  for (Element a : generators_)
    for (Element b : generators_)
      if (mul(a, b) != mul(b, a))
        return false;
  return true;
}

std::vector<Element> FiniteGroup::generate(std::span<Element const> gens) const
{
  return mask_elements(
      closure_mask(order_, identity_, gens, [this](Element x, Element y) { return mul(x, y); }));
}

std::vector<Element> FiniteGroup::normal_closure(std::span<Element const> gens) const
{
  std::vector<char> seen(order_, 0);
  std::vector<Element> conjugates;
  for (Element s : gens)
    if (!seen[s]) {
      seen[s] = 1;
      conjugates.push_back(s);
    }
  for (std::size_t i = 0; i < conjugates.size(); ++i)
    for (Element g : generators_) {
      Element c = conjugate(conjugates[i], g);
      if (!seen[c]) {
        seen[c] = 1;
        conjugates.push_back(c);
      }
    }
  return generate(conjugates);
}

std::vector<Element> FiniteGroup::center() const
{
  std::vector<Element> out;
  for (Element a = 0; a < order_; ++a) {
    bool central = true;
    for (Element g : generators_)
      central = central && mul(a, g) == mul(g, a);
    if (central)
      out.push_back(a);
  }
  return out;
}

std::vector<Element> FiniteGroup::derived_subgroup() const
{
  std::vector<Element> commutators;
  for (Element a : generators_)
    for (Element b : generators_)
      commutators.push_back(commutator(a, b));
  return normal_closure(commutators);
}

std::vector<std::vector<Element>> FiniteGroup::conjugacy_classes() const
{
  std::vector<char> assigned(order_, 0);
  std::vector<std::vector<Element>> classes;
  for (Element x = 0; x < order_; ++x) {
    if (assigned[x])
      continue;
    std::vector<Element> cls{x};
    assigned[x] = 1;
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (Element g : generators_) {
        Element c = conjugate(cls[i], g);
        if (!assigned[c]) {
          assigned[c] = 1;
          cls.push_back(c);
        }
      }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  return classes;
}

bool FiniteGroup::is_subgroup(std::span<Element const> elements) const
{
  if (!std::binary_search(elements.begin(), elements.end(), identity_))
    return false;
  std::vector<char> in(order_, 0);
  for (Element x : elements)
    in[x] = 1;
  for (Element a : elements)
    for (Element b : elements)
      if (!in[mul(a, b)])
        return false;
  return true;
}

bool FiniteGroup::is_normal(std::span<Element const> elements) const
{
  if (!is_subgroup(elements))
    return false;
  std::vector<char> in(order_, 0);
  for (Element x : elements)
    in[x] = 1;
  for (Element a : elements)
    for (Element g : generators_)
      if (!in[conjugate(a, g)])
        return false;
  return true;
}

FiniteGroup FiniteGroup::subgroup(std::span<Element const> elements) const
{
  if (!std::is_sorted(elements.begin(), elements.end()) || !is_subgroup(elements))
    throw PreconditionError("not a sorted subgroup");
  std::vector<Element> position(order_, 0);
  for (std::size_t i = 0; i < elements.size(); ++i)
    position[elements[i]] = static_cast<Element>(i);
  std::size_t k = elements.size();
  std::vector<Element> table(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      table[i * k + j] = position[mul(elements[i], elements[j])];
  std::vector<Element> gens;
  std::vector<Element> ambient_gens;
  std::vector<char> in(order_, 0);
  in[identity_] = 1;
  for (Element x : elements)
    if (!in[x]) {
      ambient_gens.push_back(x);
      gens.push_back(position[x]);
      in = closure_mask(order_, identity_, ambient_gens,
                        [this](Element a, Element b) { return mul(a, b); });
    }
  std::vector<std::string> names;
  if (!names_.empty())
    for (Element x : elements)
      names.push_back(names_[x]);
  return FiniteGroup(std::move(table), k, std::move(gens), std::move(names));
}

FiniteGroup trivial_group() { return cyclic_group(1); }

FiniteGroup cyclic_group(std::size_t n)
{
  if (n == 0)
    throw PreconditionError("cyclic group of order 0");
  std::vector<Element> table(n * n);
  std::vector<std::string> names;
  for (std::size_t a = 0; a < n; ++a) {
    names.push_back(std::to_string(a));
    for (std::size_t b = 0; b < n; ++b)
      table[a * n + b] = static_cast<Element>((a + b) % n);
  }
  std::vector<Element> gens;
  if (n > 1)
    gens.push_back(1);
  return FiniteGroup(std::move(table), n, std::move(gens), std::move(names));
}

FiniteGroup direct_product(FiniteGroup const &a, FiniteGroup const &b)
{
  std::size_t na = a.order(), nb = b.order(), n = na * nb;
  std::vector<Element> table(n * n);
  std::vector<std::string> names;
  for (std::size_t x = 0; x < n; ++x) {
    names.push_back("(" + a.name(static_cast<Element>(x / nb)) + "," +
                    b.name(static_cast<Element>(x % nb)) + ")");
    for (std::size_t y = 0; y < n; ++y) {
      Element u = a.mul(static_cast<Element>(x / nb), static_cast<Element>(y / nb));
      Element v = b.mul(static_cast<Element>(x % nb), static_cast<Element>(y % nb));
      table[x * n + y] = static_cast<Element>(u * nb + v);
    }
  }
  std::vector<Element> gens;
  for (Element g : a.generators())
    gens.push_back(static_cast<Element>(g * nb + b.identity()));
  for (Element g : b.generators())
    gens.push_back(static_cast<Element>(a.identity() * nb + g));
  return FiniteGroup(std::move(table), n, std::move(gens), std::move(names));
}

FiniteGroup symmetric_group(std::size_t m, Budgets const &budgets)
{
  if (m == 0)
    throw PreconditionError("Sym(0)");
  if (m > budgets.factorial_degree || factorial(m) > budgets.group_order)
    throw BudgetExceeded("Sym(" + std::to_string(m) + ") exceeds the group budget");
  auto perms = all_permutations(m);
  std::size_t n = perms.size();
  std::vector<Element> table(n * n);
  std::vector<std::string> names;
  for (std::size_t a = 0; a < n; ++a) {
    names.push_back(perms[a].to_string());
    for (std::size_t b = 0; b < n; ++b)
      table[a * n + b] = static_cast<Element>((perms[a] * perms[b]).rank());
  }
  std::vector<Element> gens;
  for (std::uint32_t i = 0; i + 1 < m; ++i)
    gens.push_back(static_cast<Element>(Permutation::transposition(m, i, i + 1).rank()));
  return FiniteGroup(std::move(table), n, std::move(gens), std::move(names));
}

PermutationGroup permutation_group(std::vector<Permutation> const &generators,
                                   Budgets const &budgets)
{
  if (generators.empty())
    throw PreconditionError("permutation_group needs at least one generator");
  std::size_t degree = generators.front().degree();
  std::set<Permutation> found{Permutation::identity(degree)};
  std::vector<Permutation> queue(found.begin(), found.end());
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (Permutation const &g : generators) {
      if (g.degree() != degree)
        throw PreconditionError("generators of different degrees");
      Permutation p = queue[i] * g;
      if (found.insert(p).second) {
        queue.push_back(p);
        if (found.size() > budgets.group_order)
          throw BudgetExceeded("permutation group exceeds the group budget");
      }
    }
  std::vector<Permutation> elements(found.begin(), found.end());
  std::map<Permutation, Element> position;
  for (std::size_t i = 0; i < elements.size(); ++i)
    position.emplace(elements[i], static_cast<Element>(i));
  std::size_t n = elements.size();
  std::vector<Element> table(n * n);
  std::vector<std::string> names;
  for (std::size_t a = 0; a < n; ++a) {
    names.push_back(elements[a].to_string());
    for (std::size_t b = 0; b < n; ++b)
      table[a * n + b] = position.at(elements[a] * elements[b]);
  }
  std::vector<Element> gens;
  for (Permutation const &g : generators)
    gens.push_back(position.at(g));
  return {FiniteGroup(std::move(table), n, std::move(gens), std::move(names)), std::move(elements)};
}

FiniteGroup dihedral_group(std::size_t k)
{
  if (k < 2)
    throw PreconditionError("dihedral group needs k >= 2");
  // r^a s^b has index a + k*b; s r s = r^-1.
  std::size_t n = 2 * k;
  std::vector<Element> table(n * n);
  std::vector<std::string> names;
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t a1 = x % k, b1 = x / k;
    names.push_back("r" + std::to_string(a1) + (b1 ? "s" : ""));
    for (std::size_t y = 0; y < n; ++y) {
      std::size_t a2 = y % k, b2 = y / k;
      std::size_t a = b1 ? (a1 + k - a2) % k : (a1 + a2) % k;
      table[x * n + y] = static_cast<Element>(a + k * (b1 ^ b2));
    }
  }
  return FiniteGroup(std::move(table), n, {1, static_cast<Element>(k)}, std::move(names));
}

FiniteGroup quaternion_group()
{
  // Index = 4*sign + unit with units 1, i, j, k.
  static constexpr int unit_sign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  static constexpr int unit_prod[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static char const *unit_name[4] = {"1", "i", "j", "k"};
  std::vector<Element> table(64);
  std::vector<std::string> names;
  for (int x = 0; x < 8; ++x) {
    names.push_back(std::string(x >= 4 ? "-" : "") + unit_name[x % 4]);
    for (int y = 0; y < 8; ++y) {
      int u = x % 4, v = y % 4;
      int sign = (x / 4) ^ (y / 4) ^ unit_sign[u][v];
      table[x * 8 + y] = static_cast<Element>(4 * sign + unit_prod[u][v]);
    }
  }
  return FiniteGroup(std::move(table), 8, {1, 2}, std::move(names));
}

std::vector<NamedGroup> small_groups()
{
  auto z = [](std::size_t n) { return cyclic_group(n); };
  std::vector<NamedGroup> out;
  out.push_back({"Z1", z(1)});
  out.push_back({"Z2", z(2)});
  out.push_back({"Z3", z(3)});
  out.push_back({"Z4", z(4)});
  out.push_back({"Z2xZ2", direct_product(z(2), z(2))});
  out.push_back({"Z5", z(5)});
  out.push_back({"Z6", z(6)});
  out.push_back({"S3", symmetric_group(3)});
  out.push_back({"Z7", z(7)});
  out.push_back({"Z8", z(8)});
  out.push_back({"Z4xZ2", direct_product(z(4), z(2))});
  out.push_back({"Z2^3", direct_product(direct_product(z(2), z(2)), z(2))});
  out.push_back({"D4", dihedral_group(4)});
  out.push_back({"Q8", quaternion_group()});
  out.push_back({"Z9", z(9)});
  out.push_back({"Z3xZ3", direct_product(z(3), z(3))});
  return out;
}

std::vector<Element> centralizer(FiniteGroup const &ambient, std::span<Element const> subset,
                                 Budgets const &budgets)
{
  if (ambient.order() > budgets.group_order)
    throw BudgetExceeded("centralizer: ambient order exceeds the group budget");
  std::vector<Element> out;
  for (Element g = 0; g < ambient.order(); ++g) {
    bool commutes = true;
    for (Element k : subset)
      if (ambient.mul(g, k) != ambient.mul(k, g)) {
        commutes = false;
        break;
      }
    if (commutes)
      out.push_back(g);
  }
  return out;
}

std::vector<std::vector<Element>> normal_subgroups(FiniteGroup const &group)
{
  std::vector<std::vector<Element>> atoms;
  for (auto const &cls : group.conjugacy_classes())
    atoms.push_back(group.normal_closure(cls));
  auto join = [&](std::vector<Element> const &a, std::vector<Element> const &b) {
    std::vector<Element> gens(a);
    gens.insert(gens.end(), b.begin(), b.end());
    return group.generate(gens);
  };
  return join_closure({{group.identity()}}, atoms, join);
}

std::vector<std::vector<Element>> all_subgroups(FiniteGroup const &group)
{
  std::set<std::vector<Element>> cyclic;
  for (Element x = 0; x < group.order(); ++x) {
    Element gen[1] = {x};
    cyclic.insert(group.generate(gen));
  }
  std::vector<std::vector<Element>> atoms(cyclic.begin(), cyclic.end());
  auto join = [&](std::vector<Element> const &a, std::vector<Element> const &b) {
    std::vector<Element> gens(a);
    gens.insert(gens.end(), b.begin(), b.end());
    return group.generate(gens);
  };
  return join_closure({{group.identity()}}, atoms, join);
}

std::vector<std::vector<Permutation>> normal_subgroups_sym(std::size_t m, Budgets const &budgets)
{
  if (m == 0)
    throw PreconditionError("Sym(0)");
  if (m > budgets.factorial_degree)
    throw BudgetExceeded("Sym(" + std::to_string(m) + ") exceeds the factorial budget");
  auto perms = all_permutations(m);
  std::size_t n = perms.size();
  auto mul = [&](Element a, Element b) { return static_cast<Element>((perms[a] * perms[b]).rank()); };
  auto generate = [&](std::span<Element const> gens) {
    return mask_elements(closure_mask(n, 0, gens, mul));
  };

  // Conjugacy classes of Sym(m) are the cycle types.
  std::map<std::vector<std::size_t>, std::vector<Element>> classes;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> type;
    for (auto const &orbit : perms[i].orbits())
      type.push_back(orbit.size());
    std::sort(type.begin(), type.end());
    classes[type].push_back(static_cast<Element>(i));
  }
  std::vector<std::vector<Element>> atoms;
  for (auto const &[type, members] : classes)
    atoms.push_back(generate(members));
  auto join = [&](std::vector<Element> const &a, std::vector<Element> const &b) {
    std::vector<Element> gens(a);
    gens.insert(gens.end(), b.begin(), b.end());
    return generate(gens);
  };
  std::vector<std::vector<Permutation>> out;
  for (auto const &subgroup : join_closure({{0}}, atoms, join)) {
    std::vector<Permutation> members;
    for (Element x : subgroup)
      members.push_back(perms[x]);
    out.push_back(std::move(members));
  }
  return out;
}

} // namespace stabdyn
