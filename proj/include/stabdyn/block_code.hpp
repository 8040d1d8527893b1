#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stabdyn/budget.hpp"
#include "stabdyn/sft.hpp"

namespace stabdyn
{

/// The admissible words of one length, numbered lexicographically, with a
/// trie for lookup.
class WindowIndex
{
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  WindowIndex(EdgeShift const &shift, std::size_t length, Budgets const &budgets);

  std::size_t length() const { return length_; }
  std::size_t size() const { return words_.size(); }
  Word const &word(std::size_t i) const { return words_[i]; }
  std::vector<Word> const &words() const { return words_; }

  /// Index of `w`, or npos if it is not an admissible word of this length.
  std::size_t find(std::span<EdgeId const> w) const;

private:
  std::size_t alphabet_;
  std::size_t length_;
  std::vector<Word> words_;
  std::vector<std::uint32_t> trie_; // node * alphabet + edge -> child + 1
};

/// An edge shift together with lazily built window indices, shared by every
/// code over that shift.
class ShiftContext
{
public:
  static std::shared_ptr<ShiftContext const> create(EdgeShift shift,
                                                    Budgets budgets = default_budgets());

  EdgeShift const &shift() const { return shift_; }
  Budgets const &budgets() const { return budgets_; }

  /// Thread safe; the reference stays valid for the context's lifetime.
  WindowIndex const &windows(std::size_t length) const;

  explicit ShiftContext(EdgeShift shift, Budgets budgets)
    : shift_(std::move(shift)), budgets_(budgets)
  {}

private:
  EdgeShift shift_;
  Budgets budgets_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<WindowIndex>> cache_;
};

using ShiftHandle = std::shared_ptr<ShiftContext const>;

/**
 * A p-periodic sliding block code of radius r on an edge shift:
 *
 *   y_i = F_{i mod p}(x_{i-r} ... x_{i+r}).
 *
 * Codes with period dividing n are exactly the continuous maps commuting with
 * sigma^n. Rules are stored per phase, indexed by WindowIndex(2r + 1).
 */
class SlidingBlockCode
{
public:
  using Evaluator = std::function<EdgeId(std::size_t phase, std::span<EdgeId const> window)>;

  SlidingBlockCode(ShiftHandle context, std::size_t radius, std::size_t period,
                   std::vector<EdgeId> rules);

  static SlidingBlockCode identity(ShiftHandle context);
  /// sigma^k; negative k shifts right.
  static SlidingBlockCode shift_power(ShiftHandle context, std::int64_t k);
  /// Radius-0, period-1 code replacing edge e by images[e].
  static SlidingBlockCode symbol_map(ShiftHandle context, std::vector<EdgeId> images);
  /// Tabulates `eval` on every admissible window at every phase.
  static SlidingBlockCode from_evaluator(ShiftHandle context, std::size_t radius,
                                         std::size_t period, Evaluator const &eval);

  ShiftHandle const &context() const { return context_; }
  EdgeShift const &shift() const { return context_->shift(); }
  std::size_t radius() const { return radius_; }
  std::size_t period() const { return period_; }
  std::size_t window_length() const { return 2 * radius_ + 1; }
  WindowIndex const &windows() const { return context_->windows(window_length()); }
  std::vector<EdgeId> const &rules() const { return rules_; }

  EdgeId output(std::size_t phase, std::size_t window) const
  {
    return rules_[phase * window_count_ + window];
  }

  /// Output at `coordinate` given the window centred there.
  EdgeId evaluate(std::int64_t coordinate, std::span<EdgeId const> window) const;

  /// Minimal radius, then minimal period.
  SlidingBlockCode canonical() const;

  /// The same map written with a larger radius and a multiple of the period.
  SlidingBlockCode expanded(std::size_t radius, std::size_t period) const;

  /// Images of admissible words are admissible.
  bool is_consistent() const;

  /// Structural equality; compare canonical() forms to compare maps.
  friend bool operator==(SlidingBlockCode const &a, SlidingBlockCode const &b);
  friend std::strong_ordering operator<=>(SlidingBlockCode const &a,
                                          SlidingBlockCode const &b);

private:
  ShiftHandle context_;
  std::size_t radius_;
  std::size_t period_;
  std::size_t window_count_;
  std::vector<EdgeId> rules_;
};

bool same_shift(SlidingBlockCode const &a, SlidingBlockCode const &b);

/// Equality of the induced maps.
bool same_map(SlidingBlockCode const &a, SlidingBlockCode const &b);

bool is_identity(SlidingBlockCode const &code);

/// Slides the code over `word`, whose first symbol sits at `offset`.
/// The result starts at coordinate offset + radius.
Word apply_code(SlidingBlockCode const &code, std::span<EdgeId const> word,
                std::int64_t offset = 0);

/// f after g, canonicalized.
SlidingBlockCode compose(SlidingBlockCode const &f, SlidingBlockCode const &g);

/// code o sigma^n == sigma^n o code on every admissible word of length L.
bool commutes_with_power(SlidingBlockCode const &code, std::uint64_t n, std::size_t length);

/// The inverse as a code of radius <= inverse_radius, if one exists.
std::optional<SlidingBlockCode> inverse_code(SlidingBlockCode const &code,
                                             std::size_t inverse_radius);

} // namespace stabdyn
