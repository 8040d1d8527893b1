#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "stabdyn/errors.hpp"
#include "stabdyn/stab_verify.hpp"
#include "stabdyn/wreath.hpp"
#include "test_graphs.hpp"

using namespace stabdyn;
using stabdyn::testing::graph;

namespace
{

EdgeShift doubled2() { return graph("0 2 / 1 0"); }
EdgeShift cycle3_doubled() { return graph("0 1 0 / 0 0 2 / 1 0 0"); }

void expect_all_pass(WreathDecompositionReport const &rep)
{
  for (auto const &c : rep.checks)
    EXPECT_TRUE(c.passed) << c.name << ": " << c.counterexample;
  EXPECT_TRUE(rep.passed());
}

/// A random path of `length` edges starting at a state of class 0.
Word random_path(EdgeShift const &shift, CyclicPartition const &part, std::size_t length,
                 std::mt19937 &rng)
{
  StateId s = part.classes[0][rng() % part.classes[0].size()];
  Word w;
  for (std::size_t i = 0; i < length; ++i) {
    auto const &out = shift.out_edges(s);
    EdgeId e = out[rng() % out.size()];
    w.push_back(e);
    s = shift.edge(e).head;
  }
  return w;
}

} // namespace

TEST(SplitSequence, DoubledLoopPeriodTwo)
{
  auto rep = verify_split_sequence(doubled2(), 1, 2, 1);
  expect_all_pass(rep);
  EXPECT_EQ(rep.image_count, 2u);
  EXPECT_GT(rep.aut_count, 0u);
  EXPECT_EQ(rep.rho_table.size(), 2u);
  EXPECT_GE(rep.rho_table[1], 0); // rho of the swap has radius 1
  EXPECT_EQ(rep.core_size, rep.core_kernel * rep.core_image);
  EXPECT_EQ(rep.psi_table.size(), rep.kernel_count);
}

TEST(SplitSequence, MixingDegenerates)
{
  for (auto text : {"2", "1 1 / 1 0"}) {
    auto rep = verify_split_sequence(graph(text), 1, 1, 1);
    expect_all_pass(rep);
    EXPECT_EQ(rep.image_count, 1u);
    EXPECT_EQ(rep.kernel_count, rep.aut_count);
    // psi is the identity embedding: every kernel element is its own component.
    for (auto const &[a, parts] : rep.psi_table)
      EXPECT_EQ(parts, std::vector<std::int64_t>{static_cast<std::int64_t>(a)});
  }
}

TEST(SplitSequence, Preconditions)
{
  EXPECT_THROW(verify_split_sequence(doubled2(), 1, 3, 0), NoSuchEigenvalue);
  EXPECT_THROW(verify_split_sequence(doubled2(), 2, 2, 0), PreconditionError);
  EXPECT_THROW(verify_split_sequence(graph("2"), 1, 2, 0), NoSuchEigenvalue);
}

TEST(SplitSequence, PeriodThreeAndPowers)
{
  expect_all_pass(verify_split_sequence(cycle3_doubled(), 1, 3, 1));
  expect_all_pass(verify_split_sequence(cycle3_doubled(), 2, 1, 0));
  expect_all_pass(verify_split_sequence(graph("2"), 2, 1, 1));
  expect_all_pass(verify_split_sequence(graph("1 1 / 1 0"), 2, 1, 1));
}

TEST(SplitMaps, RhoMovesClassesAsPrescribed)
{
  // rho(s)(T^i x) = T^{s(i)} x, checked on explicit points of X_m.
  std::mt19937 rng(7);
  for (auto const &[shift, m] : {std::pair{doubled2(), 2u}, std::pair{cycle3_doubled(), 3u}}) {
    auto ctx = ShiftContext::create(shift);
    auto part = cyclic_partition(shift, m);
    for (auto const &s : all_permutations(m)) {
      SlidingBlockCode rho = split_rho(ctx, m, s);
      for (int trial = 0; trial < 20; ++trial) {
        Word x = random_path(shift, part, 40, rng);
        for (std::uint32_t i = 0; i < m; ++i) {
          // T^i x starts at x_i; the image starts at coordinate radius.
          std::span<EdgeId const> y(x.data() + i, 30);
          Word out = apply_code(rho, y, 0);
          std::size_t r = rho.radius();
          for (std::size_t j = 0; j < out.size(); ++j)
            ASSERT_EQ(out[j], x[s(i) + r + j]) << "s=" << s.to_string() << " i=" << i;
        }
      }
    }
  }
}

TEST(SplitMaps, PsiActsComponentwise)
{
  // psi(g)(T^i x) = T^i g_i(x), with g_i applied to x read as a component word.
  std::mt19937 rng(11);
  for (auto const &[shift, m, n] :
       {std::tuple{doubled2(), 2u, 1u}, std::tuple{doubled2(), 2u, 3u},
        std::tuple{cycle3_doubled(), 3u, 1u}}) {
    auto ctx = ShiftContext::create(shift);
    auto part = cyclic_partition(shift, m);
    auto comp = component_system(shift, m);
    auto yctx = ShiftContext::create(comp.component_shift);
    auto G = enumerate_automorphisms(yctx, n, 1, 2);
    ASSERT_GT(G.size(), 1u);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<SlidingBlockCode> g;
      for (std::uint32_t i = 0; i < m; ++i)
        g.push_back(G.elements[rng() % G.size()]);
      SlidingBlockCode psi = split_psi(ctx, n, m, g);
      Word x = random_path(shift, part, 24 * m, rng);
      // Component word u with u_s = x_[sm, sm+m).
      Word u;
      for (std::size_t s = 0; s < x.size() / m; ++s)
        for (EdgeId e = 0; e < comp.path_dictionary.size(); ++e)
          if (std::equal(comp.path_dictionary[e].begin(), comp.path_dictionary[e].end(),
                         x.begin() + static_cast<std::ptrdiff_t>(s * m)))
            u.push_back(e);
      ASSERT_EQ(u.size(), x.size() / m);
      for (std::uint32_t i = 0; i < m; ++i) {
        Word gu = apply_code(g[i], u, 0); // starts at component coordinate radius
        Word gx;
        for (EdgeId e : gu)
          gx.insert(gx.end(), comp.path_dictionary[e].begin(), comp.path_dictionary[e].end());
        std::size_t gx_start = g[i].radius() * m; // X coordinate of gx[0]
        std::span<EdgeId const> y(x.data() + i, x.size() - m);
        Word out = apply_code(psi, y, 0);
        for (std::size_t j = 0; j < out.size(); ++j) {
          std::size_t coord = psi.radius() + j + i; // coordinate of x
          if (coord < gx_start || coord - gx_start >= gx.size())
            continue;
          ASSERT_EQ(out[j], gx[coord - gx_start]) << "i=" << i << " j=" << j;
        }
      }
      auto back = split_components(ctx, yctx, n, m, psi);
      ASSERT_TRUE(back.has_value());
      for (std::uint32_t i = 0; i < m; ++i)
        EXPECT_TRUE(same_map((*back)[i], g[i]));
    }
  }
}

TEST(SplitMaps, ComponentsRejectClassPermutingCodes)
{
  auto shift = doubled2();
  auto ctx = ShiftContext::create(shift);
  auto comp = component_system(shift, 2);
  auto yctx = ShiftContext::create(comp.component_shift);
  auto swap = split_rho(ctx, 2, Permutation::transposition(2, 0, 1));
  EXPECT_FALSE(split_components(ctx, yctx, 1, 2, swap).has_value());
  EXPECT_TRUE(split_components(ctx, yctx, 1, 2, SlidingBlockCode::identity(ctx)).has_value());
}

TEST(QuotientIsos, FullTwoShift)
{
  auto rep = verify_quotient_isos(graph("2"), 1, 0);
  EXPECT_FALSE(rep.inconclusive);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.mod_shift.order, 2u);
  EXPECT_EQ(rep.component.order, 2u);
}

TEST(QuotientIsos, DoubledLoop)
{
  auto rep = verify_quotient_isos(doubled2(), 2, 1);
  EXPECT_FALSE(rep.inconclusive);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.mod_shift_power.order, rep.component.order * 2);
  EXPECT_EQ(rep.mod_shift.order, rep.component.order);
  EXPECT_EQ(rep.checks.size(), 3u);
}

TEST(QuotientIsos, ThreeCycle)
{
  auto rep = verify_quotient_isos(graph("0 1 0 / 0 0 1 / 1 0 0"), 3, 1);
  EXPECT_FALSE(rep.inconclusive);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.mod_shift.order, 1u);
  EXPECT_EQ(rep.component.order, 1u);
  EXPECT_EQ(rep.mod_shift_power.order, 3u);
}

TEST(QuotientIsos, RequiresThePeriod)
{
  EXPECT_THROW(verify_quotient_isos(doubled2(), 1, 0), PreconditionError);
}

TEST(Rigidity, Examples)
{
  auto z9 = cyclic_group(9), z3 = cyclic_group(3), z2 = cyclic_group(2);
  auto rep = check_wreath_rigidity(z9, 2, z3, 3);
  EXPECT_EQ(rep.wreath_order_g, 162u);
  EXPECT_EQ(rep.wreath_order_h, 162u);
  EXPECT_FALSE(rep.wreaths_isomorphic);
  EXPECT_FALSE(rep.violation);
  EXPECT_EQ(rep.message, "no isomorphism found");

  auto same = check_wreath_rigidity(z3, 3, z3, 3);
  EXPECT_TRUE(same.wreaths_isomorphic);
  EXPECT_FALSE(same.violation);

  // Z2 with a relabelled table.
  FiniteGroup relabelled({1, 0, 0, 1}, 2, {0});
  auto z2r = check_wreath_rigidity(z2, 2, relabelled, 2);
  EXPECT_TRUE(z2r.wreaths_isomorphic);
  EXPECT_TRUE(z2r.bases_isomorphic.value());
  EXPECT_FALSE(z2r.violation);
}

TEST(Rigidity, OutsideHypothesesIsNotAViolation)
{
  // S3 wr Sym(1) = S3 = 1 wr Sym(3).
  FiniteGroup s3 = symmetric_group(3);
  auto rep = check_wreath_rigidity(s3, 1, trivial_group(), 3);
  EXPECT_TRUE(rep.wreaths_isomorphic);
  EXPECT_FALSE(rep.hypotheses_hold);
  EXPECT_FALSE(rep.violation);
}

TEST(Rigidity, Sweep)
{
  auto sweep = rigidity_sweep(2000, 4);
  EXPECT_EQ(sweep.violations, 0u);
  bool saw_162 = false;
  std::size_t unequal_degree = 0;
  for (auto const &e : sweep.materialized) {
    EXPECT_FALSE(e.report.violation) << e.g_name << " vs " << e.h_name;
    if (e.report.n != e.report.m) {
      ++unequal_degree;
      EXPECT_FALSE(e.report.wreaths_isomorphic) << e.g_name << " vs " << e.h_name;
    }
    if ((e.g_name == "Z9^2" && e.h_name == "Z3^3") || (e.g_name == "Z3^3" && e.h_name == "Z9^2"))
      saw_162 = true;
    if (e.g_name == e.h_name)
      EXPECT_TRUE(e.report.wreaths_isomorphic);
  }
  EXPECT_TRUE(saw_162);
  // 162: Z9, Z3xZ3 (n=2) vs Z3 (n=3); 384: Z4, Z2xZ2 (n=3) vs Z2 (n=4).
  EXPECT_EQ(unequal_degree, 4u);
}

TEST(CompareEigs, Examples)
{
  auto a = compare_rational_eigs(graph("0 1 / 1 0"), doubled2());
  EXPECT_TRUE(a.equal);
  EXPECT_EQ(a.eig_x, (std::vector<std::uint64_t>{1, 2}));
  auto period4 = stabdyn::testing::catalog()[9].shift;
  auto b = compare_rational_eigs(doubled2(), period4);
  EXPECT_FALSE(b.equal);
  EXPECT_EQ(b.period_y, 4u);
  EXPECT_EQ(b.eig_y, (std::vector<std::uint64_t>{1, 2, 4}));
  for (auto const &g : stabdyn::testing::catalog())
    EXPECT_TRUE(compare_rational_eigs(g.shift, g.shift).equal);
}

TEST(EntropyRatio, FullShifts)
{
  auto half = entropy_ratio(graph("2"), graph("4"));
  EXPECT_EQ(half.p, 1u);
  EXPECT_EQ(half.q, 2u);
  EXPECT_LT(half.residual, 1e-12L);
  EXPECT_EQ(half.verdict(), "rational-within-tolerance");
  EXPECT_TRUE(half.exact_confirmation.value());

  auto third = entropy_ratio(graph("2"), graph("8"));
  EXPECT_EQ(third.p, 1u);
  EXPECT_EQ(third.q, 3u);
  EXPECT_TRUE(third.exact_confirmation.value());

  auto two_thirds = entropy_ratio(graph("4"), graph("8"));
  EXPECT_EQ(two_thirds.p, 2u);
  EXPECT_EQ(two_thirds.q, 3u);
}

TEST(EntropyRatio, GoldenMeanIsInconclusive)
{
  auto rep = entropy_ratio(graph("1 1 / 1 0"), graph("2"), 50, 1e-9);
  EXPECT_EQ(rep.verdict(), "inconclusive");
  EXPECT_LE(rep.q, 50u);
  long double expected = std::log((1.0L + std::sqrt(5.0L)) / 2.0L) / std::log(2.0L);
  EXPECT_NEAR(static_cast<double>(rep.ratio), static_cast<double>(expected), 1e-15);
  EXPECT_NEAR(static_cast<double>(rep.residual),
              std::abs(static_cast<double>(expected) - double(rep.p) / double(rep.q)), 1e-15);
  EXPECT_GT(rep.residual, 1e-9L);
  EXPECT_FALSE(rep.exact_confirmation.has_value());
}

TEST(EntropyRatio, SelfRatioIsOne)
{
  for (auto const &g : stabdyn::testing::all_test_graphs()) {
    if (entropy(g.shift).entropy < 1e-9)
      continue;
    auto rep = entropy_ratio(g.shift, g.shift);
    EXPECT_EQ(rep.p, 1u) << g.name;
    EXPECT_EQ(rep.q, 1u) << g.name;
    EXPECT_LT(rep.residual, 1e-12L) << g.name;
    EXPECT_TRUE(rep.component_x.agrees) << g.name;
  }
}

TEST(EntropyRatio, Errors)
{
  EXPECT_THROW(entropy_ratio(graph("0 1 / 1 0"), graph("2")), ZeroEntropy);
  EXPECT_THROW(entropy_ratio(graph("2"), graph("2"), 50, 1e-12), PreconditionError);
}

TEST(EntropyRatio, ComponentEntropyScalesWithPeriod)
{
  auto rep = entropy_ratio(doubled2(), cycle3_doubled());
  EXPECT_EQ(rep.component_x.period, 2u);
  EXPECT_EQ(rep.component_y.period, 3u);
  EXPECT_TRUE(rep.component_x.agrees);
  EXPECT_TRUE(rep.component_y.agrees);
  // Both have Perron root with lambda^p = 2: h = log2 / p, ratio 3/2.
  EXPECT_EQ(rep.p, 3u);
  EXPECT_EQ(rep.q, 2u);
}
