#include "stabdyn/isomorphism.hpp"

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

/// (element order, class size) for every element.
std::vector<std::pair<std::uint64_t, std::size_t>> signatures(FiniteGroup const &group)
{
  std::vector<std::pair<std::uint64_t, std::size_t>> out(group.order());
  for (auto const &cls : group.conjugacy_classes())
    for (Element x : cls)
      out[x] = {group.element_order(x), cls.size()};
  return out;
}

class Search
{
public:
  Search(FiniteGroup const &G, FiniteGroup const &H, Budgets const &budgets)
    : G_(G), H_(H), budget_(budgets.search_nodes), gens_(reduced_generators(G))
  {
    auto sg = signatures(G);
    auto sh = signatures(H);
    for (Element x : gens_) {
      std::vector<Element> c;
      for (Element y = 0; y < H.order(); ++y)
        if (sh[y] == sg[x])
          c.push_back(y);
      candidates_.push_back(std::move(c));
    }
  }

  std::optional<std::vector<Element>> first()
  {
    limit_ = 1;
    descend();
    if (found_.empty())
      return std::nullopt;
    return found_.front();
  }

  std::vector<std::vector<Element>> all(std::size_t limit)
  {
    limit_ = limit;
    descend();
    return std::move(found_);
  }

private:
  bool descend()
  {
    if (++nodes_ > budget_)
      throw BudgetExceeded("isomorphism search exceeded " + std::to_string(budget_) + " nodes");
    std::size_t k = images_.size();
    if (!extend(k))
      return false;
    if (k == gens_.size()) {
      found_.push_back(map_);
      return found_.size() >= limit_;
    }
    for (Element y : candidates_[k]) {
      images_.push_back(y);
      bool done = descend();
      images_.pop_back();
      if (done)
        return true;
    }
    return false;
  }

  /// Builds the map on <g_0..g_{k-1}> from the chosen images; false if it is
  /// not a well-defined injective homomorphism.
  bool extend(std::size_t k)
  {
    constexpr Element unset = static_cast<Element>(-1);
    map_.assign(G_.order(), unset);
    std::vector<char> used(H_.order(), 0);
    map_[G_.identity()] = H_.identity();
    used[H_.identity()] = 1;
    std::vector<Element> queue{G_.identity()};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      Element x = queue[q];
      for (std::size_t i = 0; i < k; ++i) {
        Element y = G_.mul(x, gens_[i]);
        Element image = H_.mul(map_[x], images_[i]);
        if (map_[y] == unset) {
          if (used[image])
            return false;
          used[image] = 1;
          map_[y] = image;
          queue.push_back(y);
        } else if (map_[y] != image) {
          return false;
        }
      }
    }
    return true;
  }

  FiniteGroup const &G_;
  FiniteGroup const &H_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<Element> gens_;
  std::vector<std::vector<Element>> candidates_;
  std::vector<Element> images_;
  std::vector<Element> map_;
  std::vector<std::vector<Element>> found_;
  std::size_t limit_ = 1;
};

} // namespace

GroupInvariants invariants(FiniteGroup const &group)
{
  GroupInvariants inv;
  inv.order = group.order();
  inv.center_order = group.center().size();
  inv.derived_order = group.derived_subgroup().size();
  for (auto const &sig : signatures(group))
    ++inv.element_profile[sig];
  return inv;
}

std::vector<Element> reduced_generators(FiniteGroup const &group)
{
  std::vector<Element> kept;
  std::size_t reached = 1;
  for (Element g : group.generators()) {
    if (reached == group.order())
      break;
    kept.push_back(g);
    std::size_t now = group.generate(kept).size();
    if (now == reached)
      kept.pop_back();
    reached = now;
  }
  return kept;
}

bool is_isomorphism(FiniteGroup const &G, FiniteGroup const &H, std::vector<Element> const &map)
{
  if (G.order() != H.order() || map.size() != G.order())
    return false;
  std::vector<char> used(H.order(), 0);
  for (Element y : map) {
    if (y >= H.order() || used[y])
      return false;
    used[y] = 1;
  }
  for (Element a = 0; a < G.order(); ++a)
    for (Element b = 0; b < G.order(); ++b)
      if (map[G.mul(a, b)] != H.mul(map[a], map[b]))
        return false;
  return true;
}

std::optional<std::vector<Element>> is_isomorphic(FiniteGroup const &G, FiniteGroup const &H,
                                                  Budgets const &budgets)
{
  if (G.order() > budgets.group_order || H.order() > budgets.group_order)
    throw BudgetExceeded("is_isomorphic: group order exceeds the budget");
  if (G.order() != H.order())
    return std::nullopt;
  if (!(invariants(G) == invariants(H)))
    return std::nullopt;
  return Search(G, H, budgets).first();
}

std::vector<std::vector<Element>> all_isomorphisms(FiniteGroup const &G, FiniteGroup const &H,
                                                   std::size_t limit, Budgets const &budgets)
{
  if (G.order() > budgets.group_order || H.order() > budgets.group_order)
    throw BudgetExceeded("all_isomorphisms: group order exceeds the budget");
  if (G.order() != H.order() || !(invariants(G) == invariants(H)))
    return {};
  return Search(G, H, budgets).all(limit);
}

} // namespace stabdyn
