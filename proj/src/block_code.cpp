#include "stabdyn/block_code.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "stabdyn/errors.hpp"
#include "stabdyn/spectral.hpp"

namespace stabdyn
{

WindowIndex::WindowIndex(EdgeShift const &shift, std::size_t length, Budgets const &budgets)
  : alphabet_(shift.edge_count()), length_(length), words_(words_of_length(shift, length, budgets))
{
  trie_.assign(alphabet_, 0);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::size_t node = 0;
    for (std::size_t k = 0; k < length_; ++k) {
      std::size_t slot = node * alphabet_ + words_[i][k];
      if (k + 1 == length_) {
        trie_[slot] = static_cast<std::uint32_t>(i + 1);
        break;
      }
      if (trie_[slot] == 0) {
        std::size_t child = trie_.size() / alphabet_;
        trie_[slot] = static_cast<std::uint32_t>(child);
        trie_.resize(trie_.size() + alphabet_, 0);
      }
      node = trie_[slot];
    }
  }
}

std::size_t WindowIndex::find(std::span<EdgeId const> w) const
{
  if (w.size() != length_)
    return npos;
  if (length_ == 0)
    return words_.empty() ? npos : 0;
  std::size_t node = 0;
  for (std::size_t k = 0; k < length_; ++k) {
    if (w[k] >= alphabet_)
      return npos;
    std::uint32_t next = trie_[node * alphabet_ + w[k]];
    if (next == 0)
      return npos;
    if (k + 1 == length_)
      return next - 1;
    node = next;
  }
  return npos;
}

std::shared_ptr<ShiftContext const> ShiftContext::create(EdgeShift shift, Budgets budgets)
{
  return std::make_shared<ShiftContext const>(std::move(shift), budgets);
}

WindowIndex const &ShiftContext::windows(std::size_t length) const
{
  std::lock_guard lock(mutex_);
  auto &slot = cache_[length];
  if (!slot)
    slot = std::make_unique<WindowIndex>(shift_, length, budgets_);
  return *slot;
}

SlidingBlockCode::SlidingBlockCode(ShiftHandle context, std::size_t radius, std::size_t period,
                                   std::vector<EdgeId> rules)
  : context_(std::move(context)), radius_(radius), period_(period), rules_(std::move(rules))
{
  if (!context_)
    throw PreconditionError("block code without a shift");
  if (period_ == 0)
    throw PreconditionError("block code period must be positive");
  window_count_ = windows().size();
  if (rules_.size() != period_ * window_count_)
    throw PreconditionError("rule table has " + std::to_string(rules_.size()) +
                            " entries, expected " + std::to_string(period_ * window_count_));
  std::size_t const alphabet = shift().edge_count();
  for (EdgeId e : rules_) {
    if (e >= alphabet)
      throw PreconditionError("rule output " + std::to_string(e) + " is not an edge");
  }
}

SlidingBlockCode SlidingBlockCode::identity(ShiftHandle context)
{
  std::vector<EdgeId> images(context->shift().edge_count());
  std::iota(images.begin(), images.end(), EdgeId{0});
  return symbol_map(std::move(context), std::move(images));
}

SlidingBlockCode SlidingBlockCode::shift_power(ShiftHandle context, std::int64_t k)
{
  auto r = static_cast<std::size_t>(std::llabs(k));
  return from_evaluator(std::move(context), r, 1,
                        [r, k](std::size_t, std::span<EdgeId const> w) {
                          return w[static_cast<std::size_t>(static_cast<std::int64_t>(r) + k)];
                        });
}

SlidingBlockCode SlidingBlockCode::symbol_map(ShiftHandle context, std::vector<EdgeId> images)
{
  if (images.size() != context->shift().edge_count())
    throw PreconditionError("symbol map must list one image per edge");
  return SlidingBlockCode(std::move(context), 0, 1, std::move(images));
}

SlidingBlockCode SlidingBlockCode::from_evaluator(ShiftHandle context, std::size_t radius,
                                                  std::size_t period, Evaluator const &eval)
{
  WindowIndex const &index = context->windows(2 * radius + 1);
  std::vector<EdgeId> rules;
  rules.reserve(period * index.size());
  for (std::size_t j = 0; j < period; ++j) {
    for (Word const &w : index.words())
      rules.push_back(eval(j, w));
  }
  return SlidingBlockCode(std::move(context), radius, period, std::move(rules));
}

EdgeId SlidingBlockCode::evaluate(std::int64_t coordinate, std::span<EdgeId const> window) const
{
  std::size_t idx = windows().find(window);
  if (idx == WindowIndex::npos)
    throw PreconditionError("window " + shift().format_word(window) + " is not admissible");
  auto p = static_cast<std::int64_t>(period_);
  auto phase = static_cast<std::size_t>(((coordinate % p) + p) % p);
  return output(phase, idx);
}

SlidingBlockCode SlidingBlockCode::canonical() const
{
  std::size_t r = radius_;
  std::vector<EdgeId> rules = rules_;
  while (r > 0) {
    WindowIndex const &outer = context_->windows(2 * r + 1);
    WindowIndex const &inner = context_->windows(2 * r - 1);
    constexpr EdgeId unset = static_cast<EdgeId>(-1);
    std::vector<EdgeId> reduced(period_ * inner.size(), unset);
    bool ok = true;
    for (std::size_t j = 0; j < period_ && ok; ++j) {
      for (std::size_t i = 0; i < outer.size(); ++i) {
        Word const &w = outer.word(i);
        std::size_t k = inner.find(std::span(w).subspan(1, 2 * r - 1));
        EdgeId out = rules[j * outer.size() + i];
        EdgeId &slot = reduced[j * inner.size() + k];
        if (slot == unset) {
          slot = out;
        } else if (slot != out) {
          ok = false;
          break;
        }
      }
    }
    if (!ok)
      break;
    rules = std::move(reduced);
    --r;
  }

  std::size_t const count = context_->windows(2 * r + 1).size();
  for (std::uint64_t d : divisors(period_)) {
    bool periodic = true;
    for (std::size_t j = d; j < period_ && periodic; ++j) {
      periodic = std::equal(rules.begin() + j * count, rules.begin() + (j + 1) * count,
                            rules.begin() + (j % d) * count);
    }
    if (periodic) {
      rules.resize(d * count);
      return SlidingBlockCode(context_, r, d, std::move(rules));
    }
  }
  return SlidingBlockCode(context_, r, period_, std::move(rules));
}

SlidingBlockCode SlidingBlockCode::expanded(std::size_t radius, std::size_t period) const
{
  if (radius < radius_ || period % period_ != 0)
    throw PreconditionError("expansion must not shrink radius or period");
  std::size_t const offset = radius - radius_;
  WindowIndex const &inner = windows();
  return from_evaluator(context_, radius, period,
                        [&](std::size_t j, std::span<EdgeId const> w) {
                          return output(j % period_,
                                        inner.find(w.subspan(offset, window_length())));
                        });
}

bool SlidingBlockCode::is_consistent() const
{
  // Images of (2r + 2)-words are admissible iff consecutive outputs compose.
  WindowIndex const &longer = context_->windows(2 * radius_ + 2);
  WindowIndex const &index = windows();
  for (Word const &w : longer.words()) {
    std::size_t a = index.find(std::span(w).first(2 * radius_ + 1));
    std::size_t b = index.find(std::span(w).last(2 * radius_ + 1));
    for (std::size_t j = 0; j < period_; ++j) {
      EdgeId x = output(j, a);
      EdgeId y = output((j + 1) % period_, b);
      if (shift().edge(x).head != shift().edge(y).tail)
        return false;
    }
  }
  return true;
}

bool operator==(SlidingBlockCode const &a, SlidingBlockCode const &b)
{
  return same_shift(a, b) && a.radius_ == b.radius_ && a.period_ == b.period_ &&
         a.rules_ == b.rules_;
}

std::strong_ordering operator<=>(SlidingBlockCode const &a, SlidingBlockCode const &b)
{
  if (auto c = a.radius_ <=> b.radius_; c != 0)
    return c;
  if (auto c = a.period_ <=> b.period_; c != 0)
    return c;
  return a.rules_ <=> b.rules_;
}

bool same_shift(SlidingBlockCode const &a, SlidingBlockCode const &b)
{
  return a.context() == b.context() || a.shift() == b.shift();
}

bool same_map(SlidingBlockCode const &a, SlidingBlockCode const &b)
{
  return a.canonical() == b.canonical();
}

bool is_identity(SlidingBlockCode const &code)
{
  SlidingBlockCode c = code.canonical();
  if (c.radius() != 0 || c.period() != 1)
    return false;
  for (std::size_t e = 0; e < c.rules().size(); ++e) {
    if (c.rules()[e] != e)
      return false;
  }
  return true;
}

Word apply_code(SlidingBlockCode const &code, std::span<EdgeId const> word, std::int64_t offset)
{
  std::size_t const len = code.window_length();
  if (word.size() < len)
    throw PreconditionError("word of length " + std::to_string(word.size()) +
                            " is shorter than the code window " + std::to_string(len));
  Word out;
  out.reserve(word.size() - len + 1);
  auto const r = static_cast<std::int64_t>(code.radius());
  for (std::size_t k = 0; k + len <= word.size(); ++k)
    out.push_back(code.evaluate(offset + r + static_cast<std::int64_t>(k), word.subspan(k, len)));
  return out;
}

SlidingBlockCode compose(SlidingBlockCode const &f, SlidingBlockCode const &g)
{
  if (!same_shift(f, g))
    throw PreconditionError("cannot compose codes over different shifts");
  std::size_t const radius = f.radius() + g.radius();
  std::size_t const period = std::lcm(f.period(), g.period());
  SlidingBlockCode raw = SlidingBlockCode::from_evaluator(
    g.context(), radius, period, [&](std::size_t j, std::span<EdgeId const> w) {
      auto centre = static_cast<std::int64_t>(j);
      Word mid = apply_code(g, w, centre - static_cast<std::int64_t>(radius));
      return f.evaluate(centre, mid);
    });
  return raw.canonical();
}

bool commutes_with_power(SlidingBlockCode const &code, std::uint64_t n, std::size_t length)
{
  std::size_t const len = code.window_length();
  if (length < len + n)
    throw PreconditionError("commutation check needs words of length >= 2r + n + 1");
  // code(sigma^n x)_i = F_i(x_{[i+n-r, i+n+r]}) and (sigma^n code(x))_i =
  // F_{i+n}(x_{[i+n-r, i+n+r]}): the rules must agree at phases j and j + n.
  WindowIndex const &index = code.context()->windows(length);
  auto const nn = static_cast<std::int64_t>(n);
  for (Word const &w : index.words()) {
    for (std::size_t j = 0; j < code.period(); ++j) {
      auto shifted = static_cast<std::int64_t>(j);
      Word a = apply_code(code, w, shifted);
      Word b = apply_code(code, w, shifted - nn);
      if (a != b)
        return false;
    }
  }
  return true;
}

std::optional<SlidingBlockCode> inverse_code(SlidingBlockCode const &code,
                                             std::size_t inverse_radius)
{
  ShiftHandle const &ctx = code.context();
  std::size_t const r = code.radius();
  std::size_t const big = inverse_radius + r;
  WindowIndex const &sources = ctx->windows(2 * big + 1);
  WindowIndex const &targets = ctx->windows(2 * inverse_radius + 1);
  constexpr EdgeId unset = static_cast<EdgeId>(-1);
  std::size_t const period = code.period();
  std::vector<EdgeId> table(period * targets.size(), unset);

  for (std::size_t j = 0; j < period; ++j) {
    auto start = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(big);
    for (Word const &u : sources.words()) {
      Word v = apply_code(code, u, start);
      std::size_t vi = targets.find(v);
      if (vi == WindowIndex::npos)
        return std::nullopt;
      EdgeId &slot = table[j * targets.size() + vi];
      if (slot == unset)
        slot = u[big];
      else if (slot != u[big])
        return std::nullopt;
    }
  }
  if (std::ranges::find(table, unset) != table.end())
    return std::nullopt;

  SlidingBlockCode inv = SlidingBlockCode(ctx, inverse_radius, period, std::move(table)).canonical();
  if (!inv.is_consistent() || !is_identity(compose(inv, code)) || !is_identity(compose(code, inv)))
    return std::nullopt;
  return inv;
}

} // namespace stabdyn
