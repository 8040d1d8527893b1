#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabdyn/automorphisms.hpp"
#include "stabdyn/finite_group.hpp"
#include "stabdyn/spectral.hpp"

namespace stabdyn
{

/// One named verification step. `cases` counts the instances examined;
/// `counterexample` is empty when the check passed.
struct NamedCheck
{
  std::string name;
  bool passed = true;
  std::uint64_t cases = 0;
  std::string counterexample;
};

struct SplitOptions
{
  std::size_t tuple_limit = 96;  ///< psi tuples examined; exhaustive when |G|^m fits
  std::size_t pair_limit = 128;  ///< sampled pairs for homomorphism laws
  std::uint64_t seed = 1;
  EnumerationOptions enumeration{};
};

/**
 * The split exact sequence 1 -> G^m -> Aut(sigma^{nm}) -> Sym(m) -> 1 checked
 * on the radius-bounded automorphism set A, with G = Aut((sigma^m)^n | X_m).
 *
 *   rho(s)(T^i x) = T^{s(i)} x,  psi(g)(T^i x) = T^i g_i(x),  x in X_m.
 *
 * rho and psi are built as explicit periodic block codes; pi is the action on
 * the cyclic partition.
 */
struct WreathDecompositionReport
{
  std::string sft_hash;
  std::string matrix;
  std::uint64_t n = 1, m = 1;
  std::size_t radius = 0, inverse_radius = 0;

  std::size_t aut_count = 0;           ///< |A|
  std::size_t component_aut_count = 0; ///< |G| at the same radii
  std::size_t kernel_count = 0;        ///< |ker pi within A|
  std::size_t image_count = 0;         ///< |pi(A)|
  std::size_t core_size = 0;           ///< composition-closed core C of A
  std::size_t core_kernel = 0;
  std::size_t core_image = 0;
  std::size_t rotating_elements = 0;   ///< a in A acting as a nontrivial rotation
  std::size_t tuples_checked = 0;
  bool tuples_exhaustive = false;

  /// pi_table[a] = pi(A[a]) in one-line notation.
  std::vector<std::vector<std::uint32_t>> pi_table;
  /// rho_table[rank(s)] = index of rho(s) in A, or -1 when its radius exceeds A's.
  std::vector<std::int64_t> rho_table;
  /// For each kernel element: (index in A, component indices in G or -1).
  std::vector<std::pair<std::size_t, std::vector<std::int64_t>>> psi_table;

  std::vector<NamedCheck> checks;
  std::vector<std::string> notes;

  bool passed() const;
};

/// Throws NoSuchEigenvalue unless m divides the period and PreconditionError
/// unless gcd(n, period) = 1.
WreathDecompositionReport verify_split_sequence(EdgeShift const &shift, std::uint64_t n,
                                                std::uint64_t m, std::size_t radius,
                                                std::optional<std::size_t> inverse_radius = {},
                                                SplitOptions const &options = {},
                                                Budgets const &budgets = default_budgets());

/// A desk-scale instance of verify_split_sequence.
struct SplitInstance
{
  std::string name;
  std::string matrix;
  std::uint64_t n = 1, m = 1;
  std::size_t radius = 1;
};

/// Periods 1 to 3, every m dividing the period, n <= 3 coprime to it, r <= 1.
/// full2 at n = 3 uses r = 0: at r = 1 its enumeration takes minutes.
std::vector<SplitInstance> split_instance_matrix();

/// rho(s) on the shift of `context`, for m dividing the period.
SlidingBlockCode split_rho(ShiftHandle const &context, std::uint64_t m, Permutation const &s);

/// psi(g) as a period-nm code, where g_i are period-n codes on the component
/// shift of component_system(shift, m).
SlidingBlockCode split_psi(ShiftHandle const &context, std::uint64_t n, std::uint64_t m,
                           std::vector<SlidingBlockCode> const &g);

/// The components g_i = T^-i a T^i restricted to X_m, as period-n codes on
/// `component`; nullopt if a does not fix every class.
std::optional<std::vector<SlidingBlockCode>> split_components(ShiftHandle const &context,
                                                              ShiftHandle const &component,
                                                              std::uint64_t n, std::uint64_t m,
                                                              SlidingBlockCode const &a);

/// A finite quotient of an enumerated automorphism set by a shift power.
struct QuotientSummary
{
  std::size_t enumerated = 0; ///< |A|
  std::size_t order = 0;      ///< number of cosets
  std::vector<std::size_t> representatives;
  std::optional<FiniteGroup> group;
};

struct QuotientReport
{
  std::string sft_hash;
  std::uint64_t m = 1;
  std::size_t radius = 0, inverse_radius = 0;

  QuotientSummary mod_shift;       ///< Aut(T) / <T>
  QuotientSummary mod_shift_power; ///< Aut(T) / <T^m>
  QuotientSummary component;       ///< Aut(S) / <S>, S = T^m on X_m

  bool inconclusive = false;
  std::vector<NamedCheck> checks;
  std::vector<std::string> notes;

  /// All checks passed; an inconclusive report has no failing check.
  bool passed() const;
};

/**
 * Aut(T)/<T> against Aut(S)/<S>, and Aut(T)/<T^m> against Aut(S)/<S> x Z/m,
 * both by is_isomorphic and through the explicit map g -> (g_0 <S>, l) with
 * l = pi(g)(0) and g_0 the first component of rho(c)^-l g. A product that
 * leaves the radius bounds makes the report inconclusive.
 */
QuotientReport verify_quotient_isos(EdgeShift const &shift, std::uint64_t m, std::size_t radius,
                                    std::optional<std::size_t> inverse_radius = {},
                                    Budgets const &budgets = default_budgets());

struct RigidityReport
{
  std::uint64_t n = 0, m = 0;
  std::size_t order_g = 0, order_h = 0;
  std::uint64_t wreath_order_g = 0, wreath_order_h = 0;
  bool hypotheses_hold = false; ///< n, m >= 2 and G, H nontrivial
  bool wreaths_isomorphic = false;
  std::optional<bool> bases_isomorphic; ///< decided when n = m
  bool violation = false;
  std::string message;
};

/// Materializes G wr Sym(n) and H wr Sym(m) when their orders agree and
/// searches for an isomorphism.
RigidityReport check_wreath_rigidity(FiniteGroup const &G, std::uint64_t n, FiniteGroup const &H,
                                     std::uint64_t m, Budgets const &budgets = default_budgets());

struct RigiditySweepEntry
{
  std::string g_name, h_name;
  RigidityReport report;
};

struct RigiditySweep
{
  std::uint64_t max_order = 2000;
  std::size_t pairs_considered = 0;
  std::size_t pairs_materialized = 0;
  std::size_t violations = 0;
  std::vector<RigiditySweepEntry> materialized; ///< equal-order pairs, sorted by names
};

/// All pairs from small_groups() (nontrivial) with n, m in [2, max_degree] and
/// wreath order <= max_order.
RigiditySweep rigidity_sweep(std::uint64_t max_order = 2000, std::uint64_t max_degree = 4,
                             Budgets const &budgets = default_budgets());

struct EigComparison
{
  std::uint64_t period_x = 0, period_y = 0;
  std::vector<std::uint64_t> eig_x, eig_y;
  bool equal = false;
};

EigComparison compare_rational_eigs(EdgeShift const &x, EdgeShift const &y);

struct ComponentEntropyCheck
{
  std::uint64_t period = 1;
  double component_entropy = 0.0; ///< h(sigma^p on X_p)
  double scaled = 0.0;            ///< p * h(sigma)
  bool agrees = false;            ///< within 1e-9
};

struct EntropyRatioReport
{
  long double h_x = 0, h_y = 0;
  long double ratio = 0;
  std::uint64_t p = 0, q = 1;
  long double residual = 0;
  std::uint64_t max_denominator = 0;
  double tolerance = 0;
  bool rational_within_tolerance = false; ///< otherwise the verdict is inconclusive
  std::vector<std::pair<std::uint64_t, std::uint64_t>> convergents;
  ComponentEntropyCheck component_x, component_y;
  /// Set when both Perron roots are integers: lambda_x^q == lambda_y^p exactly.
  std::optional<bool> exact_confirmation;
  std::uint64_t perron_x = 0, perron_y = 0; ///< 0 when not an integer

  std::string verdict() const
  {
    return rational_within_tolerance ? "rational-within-tolerance" : "inconclusive";
  }
};

/// Throws ZeroEntropy if either entropy vanishes, PreconditionError if tol < 1e-9.
EntropyRatioReport entropy_ratio(EdgeShift const &x, EdgeShift const &y,
                                 std::uint64_t max_denominator = 50, double tolerance = 1e-9);

/// log of the Perron root in long double: exact integer roots are used when
/// available, else the characteristic polynomial root (<= 6 states), else
/// power iteration.
long double precise_entropy(EdgeShift const &shift);

} // namespace stabdyn
