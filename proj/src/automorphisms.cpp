#include "stabdyn/automorphisms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

/// A periodic point given by a closed path; its image is fixed once every
/// (phase, window) variable it reads is assigned.
struct PeriodicPoint
{
  std::size_t slot;                   ///< index of its period length
  std::vector<std::size_t> variables; ///< variable read at coordinate t
};

struct Constraint
{
  std::size_t other;  ///< an earlier variable (or the variable itself)
  bool other_first;   ///< head(other) == tail(this), else head(this) == tail(other)
};

struct Blocks
{
  std::size_t length = 0;
  std::map<Word, double> targets;               ///< admissible words and their measure
  std::vector<std::vector<std::size_t>> sources; ///< window indices read by each preimage word
  std::vector<double> weights;                  ///< measure of each preimage word
};

class Search
{
public:
  Search(ShiftHandle context, std::uint64_t n, std::size_t radius, std::size_t inverse_radius,
         EnumerationOptions const &options)
    : context_(std::move(context)), shift_(context_->shift()), n_(n), radius_(radius),
      inverse_radius_(inverse_radius), windows_(context_->windows(2 * radius + 1))
  {
    std::size_t const w = windows_.size();
    variables_ = static_cast<std::size_t>(n_) * w;
    constraints_.resize(variables_);

    WindowIndex const &longer = context_->windows(2 * radius_ + 2);
    for (Word const &word : longer.words()) {
      std::size_t a = windows_.find(std::span(word).first(2 * radius_ + 1));
      std::size_t b = windows_.find(std::span(word).last(2 * radius_ + 1));
      for (std::size_t j = 0; j < n_; ++j) {
        std::size_t u = j * w + a;
        std::size_t v = ((j + 1) % n_) * w + b;
        if (u <= v)
          constraints_[v].push_back({u, true});
        else
          constraints_[u].push_back({v, false});
      }
    }
    for (auto &list : constraints_) {
      std::ranges::sort(list, {}, &Constraint::other);
      auto dup = std::ranges::unique(list, [](Constraint const &x, Constraint const &y) {
        return x.other == y.other && x.other_first == y.other_first;
      });
      list.erase(dup.begin(), dup.end());
    }

    build_periodic_points(options.periodic_point_limit);
    if (is_irreducible(shift_))
      build_measure(options.balance_length);
  }

  std::size_t variables() const { return variables_; }

  /// Explores the subtree with variable 0 fixed to `first`.
  std::vector<SlidingBlockCode> run(EdgeId first, std::atomic<std::uint64_t> &nodes,
                                    std::uint64_t node_budget)
  {
    nodes_ = &nodes;
    node_budget_ = node_budget;
    rules_.assign(variables_, 0);
    images_.assign(periods_.size(), {});
    std::ranges::fill(sums_, 0.0);
    found_.clear();
    if (admissible(0, first))
      descend(0, first);
    return std::move(found_);
  }

  std::vector<EdgeId> candidates() const
  {
    std::vector<EdgeId> out(shift_.edge_count());
    std::iota(out.begin(), out.end(), EdgeId{0});
    return out;
  }

private:
  void build_periodic_points(std::size_t limit)
  {
    std::size_t const w = windows_.size();
    points_by_last_.assign(variables_, {});
    std::size_t total = 0;
    for (std::size_t p = static_cast<std::size_t>(n_); p <= 24; p += static_cast<std::size_t>(n_)) {
      std::size_t const span_len = 2 * radius_ + 1;
      Matrix ap = matrix_power(shift_.adjacency(), p);
      std::uint64_t trace = 0;
      for (std::size_t s = 0; s < ap.size(); ++s)
        trace += ap[s][s];
      if (trace == 0)
        continue;
      if (total + trace > limit)
        break;
      total += trace;
      std::size_t const slot = periods_.size();
      periods_.push_back(p);

      for (Word const &path : words_of_length(shift_, p, context_->budgets())) {
        if (shift_.edge(path.back()).head != shift_.edge(path.front()).tail)
          continue;
        PeriodicPoint point{slot, {}};
        Word window(span_len);
        std::size_t last = 0;
        for (std::size_t t = 0; t < p; ++t) {
          for (std::size_t k = 0; k < span_len; ++k)
            window[k] = path[(t + p * span_len + k - radius_) % p];
          std::size_t var = (t % n_) * w + windows_.find(window);
          point.variables.push_back(var);
          last = std::max(last, var);
        }
        points_by_last_[last].push_back(points_.size());
        points_.push_back(std::move(point));
      }
    }
  }

  /// Parry measure of cylinders. Every automorphism of sigma^n on an
  /// irreducible shift preserves it, so the preimage of each cylinder must
  /// carry exactly its measure.
  void build_measure(std::size_t balance_length)
  {
    std::size_t const d = shift_.state_count();
    std::vector<double> left(d, 1.0), right(d, 1.0);
    double lambda = 1.0;
    for (int it = 0; it < 200000; ++it) {
      std::vector<double> nl(left), nr(right);
      for (Edge const &e : shift_.edges()) {
        nl[e.head] += left[e.tail];
        nr[e.tail] += right[e.head];
      }
      double sl = 0, sr = 0;
      for (std::size_t s = 0; s < d; ++s) {
        sl += nl[s];
        sr += nr[s];
      }
      double delta = 0;
      for (std::size_t s = 0; s < d; ++s) {
        nl[s] /= sl;
        nr[s] /= sr;
        delta = std::max({delta, std::abs(nl[s] - left[s]), std::abs(nr[s] - right[s])});
      }
      left.swap(nl);
      right.swap(nr);
      if (delta < 1e-15)
        break;
    }
    std::vector<double> ar(d, 0.0);
    for (Edge const &e : shift_.edges())
      ar[e.tail] += right[e.head];
    double num = 0, den = 0, norm = 0;
    for (std::size_t s = 0; s < d; ++s) {
      num += ar[s];
      den += right[s];
      norm += left[s] * right[s];
    }
    lambda = num / den;
    auto mu = [&, lambda, norm](std::span<EdgeId const> w) {
      return left[shift_.edge(w.front()).tail] * right[shift_.edge(w.back()).head] /
             (norm * std::pow(lambda, static_cast<double>(w.size())));
    };

    for (EdgeId e = 0; e < shift_.edge_count(); ++e)
      mu_edge_.push_back(mu(std::span<EdgeId const>(&e, 1)));
    for (Word const &w : windows_.words())
      mu_window_.push_back(mu(w));
    for (std::size_t len = 2; len <= balance_length; ++len) {
      Blocks blocks;
      blocks.length = len;
      for (Word const &target : words_of_length(shift_, len, context_->budgets()))
        blocks.targets.emplace(target, mu(target));
      for (Word const &w : words_of_length(shift_, len + 2 * radius_, context_->budgets())) {
        std::vector<std::size_t> sub;
        for (std::size_t t = 0; t < len; ++t)
          sub.push_back(windows_.find(std::span(w).subspan(t, 2 * radius_ + 1)));
        blocks.sources.push_back(std::move(sub));
        blocks.weights.push_back(mu(w));
      }
      blocks_.push_back(std::move(blocks));
    }
    sums_.assign(static_cast<std::size_t>(n_) * shift_.edge_count(), 0.0);
    measure_ = true;
  }

  static bool close(double a, double b)
  {
    return std::abs(a - b) <= 1e-9 * std::max(a, b) + 1e-15;
  }

  /// Preimages of blocks read at phases s, s + 1, ... carry their measure.
  bool balanced(Blocks const &blocks, std::size_t s) const
  {
    std::size_t const w = windows_.size();
    std::map<Word, double> acc;
    Word image(blocks.length);
    for (std::size_t k = 0; k < blocks.sources.size(); ++k) {
      for (std::size_t t = 0; t < blocks.length; ++t)
        image[t] = rules_[((s + t) % n_) * w + blocks.sources[k][t]];
      acc[image] += blocks.weights[k];
    }
    if (acc.size() != blocks.targets.size())
      return false;
    for (auto const &[word, weight] : acc) {
      auto it = blocks.targets.find(word);
      if (it == blocks.targets.end() || !close(weight, it->second))
        return false;
    }
    return true;
  }

  /// Checks run once every window at phase j is assigned.
  bool phase_complete(std::size_t j) const
  {
    std::size_t const alphabet = shift_.edge_count();
    for (std::size_t e = 0; e < alphabet; ++e) {
      if (!close(sums_[j * alphabet + e], mu_edge_[e]))
        return false;
    }
    auto const n = static_cast<std::size_t>(n_);
    for (Blocks const &blocks : blocks_) {
      std::size_t const len = blocks.length;
      if (j + 1 >= len && !balanced(blocks, j + 1 - len))
        return false;
      if (j + 1 == n) {
        for (std::size_t s = 0; s < n; ++s) {
          if (s + len > n && !balanced(blocks, s))
            return false;
        }
      }
    }
    return true;
  }

  bool admissible(std::size_t v, EdgeId e) const
  {
    Edge const &edge = shift_.edge(e);
    for (Constraint const &c : constraints_[v]) {
      Edge const &other = shift_.edge(c.other == v ? e : rules_[c.other]);
      if (c.other_first ? other.head != edge.tail : edge.head != other.tail)
        return false;
    }
    return true;
  }

  /// Records images of points completed by v; false on a collision.
  bool record_images(std::size_t v, std::vector<std::pair<std::size_t, Word>> &added)
  {
    for (std::size_t idx : points_by_last_[v]) {
      PeriodicPoint const &point = points_[idx];
      Word image;
      image.reserve(point.variables.size());
      for (std::size_t var : point.variables)
        image.push_back(rules_[var]);
      auto [it, inserted] = images_[point.slot].insert(std::move(image));
      if (!inserted)
        return false;
      added.emplace_back(point.slot, *it);
    }
    return true;
  }

  void descend(std::size_t v, EdgeId e)
  {
    if (nodes_->fetch_add(1, std::memory_order_relaxed) >= node_budget_)
      throw BudgetExceeded("automorphism search exceeded " + std::to_string(node_budget_) +
                           " nodes; lower the radius or raise search_nodes");
    rules_[v] = e;
    std::size_t const w = windows_.size();
    std::size_t const phase = v / w;
    std::size_t const window = v % w;
    double *sum = measure_ ? &sums_[phase * shift_.edge_count() + e] : nullptr;
    if (sum)
      *sum += mu_window_[window];
    std::vector<std::pair<std::size_t, Word>> added;
    bool ok = (!sum || *sum <= mu_edge_[e] * (1 + 1e-9)) && record_images(v, added);
    if (ok && measure_ && window + 1 == w)
      ok = phase_complete(phase);
    if (ok) {
      if (v + 1 == variables_) {
        leaf();
      } else {
        for (EdgeId next = 0; next < shift_.edge_count(); ++next) {
          if (admissible(v + 1, next))
            descend(v + 1, next);
        }
      }
    }
    for (auto const &[slot, image] : added)
      images_[slot].erase(image);
    if (sum)
      *sum -= mu_window_[window];
  }

  void leaf()
  {
    SlidingBlockCode code(context_, radius_, static_cast<std::size_t>(n_), rules_);
    if (inverse_code(code, inverse_radius_))
      found_.push_back(code.canonical());
  }

  ShiftHandle context_;
  EdgeShift const &shift_;
  std::uint64_t n_;
  std::size_t radius_;
  std::size_t inverse_radius_;
  WindowIndex const &windows_;
  std::size_t variables_ = 0;
  std::vector<std::vector<Constraint>> constraints_;
  std::vector<std::size_t> periods_;
  std::vector<PeriodicPoint> points_;
  std::vector<std::vector<std::size_t>> points_by_last_;

  bool measure_ = false;
  std::vector<double> mu_edge_;
  std::vector<double> mu_window_;
  std::vector<Blocks> blocks_;

  std::vector<EdgeId> rules_;
  std::vector<std::set<Word>> images_;
  std::vector<double> sums_;
  std::vector<SlidingBlockCode> found_;
  std::atomic<std::uint64_t> *nodes_ = nullptr;
  std::uint64_t node_budget_ = 0;
};

} // namespace

std::size_t AutomorphismSet::index_of(SlidingBlockCode const &code) const
{
  SlidingBlockCode c = code.canonical();
  auto it = std::ranges::lower_bound(elements, c);
  if (it != elements.end() && *it == c)
    return static_cast<std::size_t>(it - elements.begin());
  return npos;
}

AutomorphismSet enumerate_automorphisms(ShiftHandle const &context, std::uint64_t n,
                                        std::size_t radius, std::size_t inverse_radius,
                                        EnumerationOptions const &options)
{
  if (n == 0)
    throw PreconditionError("shift power must be positive");
  Budgets const &budgets = context->budgets();
  WindowIndex const &windows = context->windows(2 * radius + 1);
  std::uint64_t table = windows.size() * context->shift().edge_count() * n;
  if (table > budgets.words)
    throw BudgetExceeded("rule table of " + std::to_string(table) + " entries exceeds budget");

  Search prototype(context, n, radius, inverse_radius, options);
  std::atomic<std::uint64_t> nodes{0};
  std::vector<EdgeId> firsts = prototype.candidates();

  std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, firsts.size());

  std::vector<std::vector<SlidingBlockCode>> parts(firsts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    Search search = prototype;
    for (std::size_t i = next++; i < firsts.size(); i = next++)
      parts[i] = search.run(firsts[i], nodes, budgets.search_nodes);
  };
  std::vector<std::future<void>> pool;
  for (std::size_t t = 1; t < threads; ++t)
    pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto &f : pool)
    f.get();

  AutomorphismSet set;
  set.context = context;
  set.power = n;
  set.radius = radius;
  set.inverse_radius = inverse_radius;
  set.search_nodes = nodes.load();
  for (auto &part : parts) {
    for (auto &code : part)
      set.elements.push_back(std::move(code));
  }
  std::ranges::sort(set.elements);
  for (SlidingBlockCode const &code : set.elements)
    set.inverses.push_back(*inverse_code(code, inverse_radius));
  return set;
}

AutomorphismSet enumerate_automorphisms(EdgeShift const &shift, std::uint64_t n,
                                        std::size_t radius,
                                        std::optional<std::size_t> inverse_radius,
                                        Budgets const &budgets)
{
  return enumerate_automorphisms(ShiftContext::create(shift, budgets), n, radius,
                                 inverse_radius.value_or(2 * radius));
}

std::string GroupLawReport::summary() const
{
  return "identity " + std::string(identity_present ? "present" : "absent") +
         ", inverse failures " + std::to_string(inverse_failures) + ", inverses missing " +
         std::to_string(inverse_missing) + ", closure failures " +
         std::to_string(closure_failures) + ", products missing " +
         std::to_string(closure_missing) + " (" + std::to_string(products_checked) +
         " products)";
}

GroupLawReport check_group_laws(AutomorphismSet const &set)
{
  GroupLawReport report;
  report.identity_present = set.contains(SlidingBlockCode::identity(set.context));
  auto fits = [&](SlidingBlockCode const &code, SlidingBlockCode const &inverse) {
    return code.radius() <= set.radius && inverse.radius() <= set.inverse_radius &&
           set.power % code.period() == 0;
  };
  for (std::size_t i = 0; i < set.size(); ++i) {
    SlidingBlockCode const &a = set.elements[i];
    SlidingBlockCode const &inv = set.inverses[i];
    if (!is_identity(compose(a, inv)) || !is_identity(compose(inv, a)))
      ++report.inverse_failures;
    else if (fits(inv, a) && !set.contains(inv))
      ++report.inverse_missing;
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = 0; j < set.size(); ++j) {
      SlidingBlockCode product = compose(set.elements[i], set.elements[j]);
      SlidingBlockCode reversed = compose(set.inverses[j], set.inverses[i]);
      ++report.products_checked;
      if (!is_identity(compose(product, reversed)))
        ++report.closure_failures;
      else if (fits(product, reversed) && !set.contains(product))
        ++report.closure_missing;
    }
  }
  return report;
}

Permutation partition_action(SlidingBlockCode const &code, CyclicPartition const &part)
{
  EdgeShift const &shift = code.shift();
  if (part.class_of.size() != shift.state_count())
    throw PreconditionError("partition does not belong to this shift");
  constexpr std::uint32_t unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> images(part.size, unset);
  WindowIndex const &windows = code.windows();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    Word const &w = windows.word(i);
    std::size_t from = part.class_of[shift.edge(w[code.radius()]).tail];
    auto to = static_cast<std::uint32_t>(part.class_of[shift.edge(code.output(0, i)).tail]);
    if (images[from] == unset) {
      images[from] = to;
    } else if (images[from] != to) {
      throw ImageSplitsClasses("class " + std::to_string(from) + " is carried into classes " +
                               std::to_string(images[from]) + " and " + std::to_string(to));
    }
  }
  std::vector<bool> hit(part.size, false);
  for (std::uint32_t x : images) {
    if (x == unset || hit[x])
      throw ImageSplitsClasses("code does not permute the partition classes");
    hit[x] = true;
  }
  return Permutation(std::move(images));
}

std::size_t rotation_index(SlidingBlockCode const &code, CyclicPartition const &part)
{
  Permutation pi = partition_action(code, part);
  std::size_t j = pi(0);
  if (pi != Permutation::rotation(part.size, j))
    throw PreconditionError("partition action " + pi.to_string() + " is not a rotation");
  return j;
}

} // namespace stabdyn
