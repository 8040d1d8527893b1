#include <cmath>
#include <numeric>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "stabdyn/errors.hpp"
#include "stabdyn/spectral.hpp"
#include "test_graphs.hpp"

using namespace stabdyn;
using stabdyn::testing::all_test_graphs;
using stabdyn::testing::graph;

namespace
{

/// Whether some assignment of states to m classes sends every edge from class
/// k to class k + 1 (mod m). Exhaustive over all m^states labelings.
bool partition_exists(EdgeShift const &shift, std::size_t m)
{
  std::size_t const n = shift.state_count();
  std::vector<std::size_t> label(n, 0);
  while (true) {
    bool ok = true;
    for (Edge const &e : shift.edges()) {
      if (label[e.head] != (label[e.tail] + 1) % m) {
        ok = false;
        break;
      }
    }
    if (ok)
      return true;
    std::size_t i = 0;
    while (i < n && ++label[i] == m)
      label[i++] = 0;
    if (i == n)
      return false;
  }
}

} // namespace

TEST(RationalEigs, Examples)
{
  EXPECT_THAT(rational_eigs(graph("2")), ::testing::ElementsAre(1u));
  EXPECT_THAT(rational_eigs(graph("0 1 / 1 0")), ::testing::ElementsAre(1u, 2u));
  EdgeShift c6 = stabdyn::testing::catalog()[11].shift;
  EXPECT_THAT(rational_eigs(c6), ::testing::ElementsAre(1u, 2u, 3u, 6u));
}

TEST(RationalEigs, MatchExhaustivePartitionSearch)
{
  for (auto const &[name, x] : all_test_graphs()) {
    auto eig = rational_eigs(x);
    for (std::size_t m = 1; m <= 6; ++m) {
      bool in_eig = std::find(eig.begin(), eig.end(), m) != eig.end();
      EXPECT_EQ(in_eig, partition_exists(x, m)) << name << " m=" << m;
      if (in_eig) {
        auto part = cyclic_partition(x, m);
        EXPECT_TRUE(is_cyclic_partition(x, part)) << name << " m=" << m;
      } else {
        EXPECT_THROW(cyclic_partition(x, m), NoSuchEigenvalue) << name << " m=" << m;
      }
    }
  }
}

TEST(RationalEigs, LatticeLaws)
{
  for (auto const &[name, x] : all_test_graphs()) {
    auto eig = rational_eigs(x);
    auto has = [&](std::uint64_t q) { return std::find(eig.begin(), eig.end(), q) != eig.end(); };
    for (auto p : eig) {
      for (auto q : eig)
        EXPECT_TRUE(has(std::lcm(p, q))) << name;
      for (auto d : divisors(p))
        EXPECT_TRUE(has(d)) << name;
    }
  }
}

TEST(RationalEigs, InductionLaw)
{
  for (auto const &[name, x] : all_test_graphs()) {
    auto eig = rational_eigs(x);
    for (auto q : eig) {
      auto component = component_system(x, q).component_shift;
      auto sub = rational_eigs(component);
      for (std::uint64_t p = 1; p <= 6; ++p) {
        bool lhs = std::find(sub.begin(), sub.end(), p) != sub.end();
        bool rhs = std::find(eig.begin(), eig.end(), p * q) != eig.end();
        EXPECT_EQ(lhs, rhs) << name << " q=" << q << " p=" << p;
      }
    }
  }
}

TEST(CyclicPartition, Examples)
{
  auto part = cyclic_partition(graph("0 1 / 1 0"), 2);
  EXPECT_THAT(part.classes, ::testing::ElementsAre(::testing::ElementsAre(0u),
                                                   ::testing::ElementsAre(1u)));
  auto one = cyclic_partition(graph("1 1 / 1 0"), 1);
  EXPECT_THAT(one.classes, ::testing::ElementsAre(::testing::ElementsAre(0u, 1u)));
  EXPECT_THROW(cyclic_partition(graph("1 1 / 1 0"), 2), NoSuchEigenvalue);
}

TEST(CoarsenPartition, Examples)
{
  EdgeShift c6 = stabdyn::testing::catalog()[11].shift;
  auto six = cyclic_partition(c6, 6);
  auto three = coarsen_partition(six, 3);
  EXPECT_EQ(three.size, 3u);
  for (auto const &cls : three.classes)
    EXPECT_EQ(cls.size(), 2u);
  EXPECT_EQ(three, cyclic_partition(c6, 3));
  EXPECT_EQ(coarsen_partition(six, 6), six);
  EXPECT_THROW(coarsen_partition(six, 4), PreconditionError);
}

TEST(CoarsenPartition, AgreesWithDirectPartition)
{
  for (auto const &[name, x] : all_test_graphs()) {
    std::uint64_t p = period(x);
    auto full = cyclic_partition(x, p);
    for (auto d : divisors(p))
      EXPECT_EQ(coarsen_partition(full, d), cyclic_partition(x, d)) << name << " d=" << d;
  }
}

TEST(Smale, Examples)
{
  auto full = smale(graph("2"));
  EXPECT_EQ(full.period, 1u);
  EXPECT_EQ(full.component_shift, graph("2"));

  auto cycle = smale(graph("0 1 / 1 0"));
  EXPECT_EQ(cycle.period, 2u);
  EXPECT_EQ(cycle.component_shift.adjacency(), (Matrix{{1}}));
  EXPECT_NEAR(entropy(cycle.component_shift).entropy, 0.0, 1e-12);

  auto doubled = smale(graph("0 2 / 1 0"));
  EXPECT_EQ(doubled.period, 2u);
  EXPECT_EQ(doubled.component_shift.adjacency(), (Matrix{{2}}));

  EXPECT_THROW(smale(graph("1 0 / 0 1")), ReducibleShift);
}

TEST(Smale, ComponentIsMixingWithScaledEntropy)
{
  for (auto const &[name, x] : all_test_graphs()) {
    auto s = smale(x);
    EXPECT_TRUE(is_mixing(s.component_shift)) << name;
    EXPECT_NEAR(entropy(s.component_shift).entropy, s.period * entropy(x).entropy, 1e-9) << name;
    ASSERT_EQ(s.path_dictionary.size(), s.component_shift.edge_count());
    for (Word const &path : s.path_dictionary) {
      EXPECT_EQ(path.size(), s.period);
      EXPECT_TRUE(x.is_admissible(path));
      EXPECT_EQ(s.partition.class_of[x.edge(path.front()).tail], 0u);
    }
  }
}

TEST(PowerTransitivity, Examples)
{
  EXPECT_FALSE(is_power_transitive(graph("0 1 / 1 0"), 2));
  EXPECT_TRUE(is_power_transitive(graph("0 1 / 1 0"), 3));
  EXPECT_TRUE(is_power_transitive(graph("1 1 / 1 0"), 7));
}

TEST(PowerTransitivity, FormulaMatchesConnectivity)
{
  for (auto const &[name, x] : all_test_graphs()) {
    for (std::uint64_t n = 1; n <= 12; ++n)
      EXPECT_EQ(is_power_transitive(x, n), is_power_transitive_by_connectivity(x, n))
        << name << " n=" << n;
  }
}

TEST(DecomposePower, Examples)
{
  EXPECT_EQ(decompose_power(graph("0 1 / 1 0"), 6), (PowerDecomposition{6, 3, 2}));
  EXPECT_EQ(decompose_power(graph("2"), 5), (PowerDecomposition{5, 5, 1}));
  EdgeShift p4 = stabdyn::testing::catalog()[9].shift;
  ASSERT_EQ(period(p4), 4u);
  EXPECT_EQ(decompose_power(p4, 4), (PowerDecomposition{4, 1, 4}));
}

TEST(DecomposePower, UniqueFactorization)
{
  for (auto const &[name, x] : all_test_graphs()) {
    std::uint64_t p = period(x);
    for (std::uint64_t n = 1; n <= 12; ++n) {
      std::vector<PowerDecomposition> found;
      for (std::uint64_t l = 1; l <= n; ++l) {
        if (n % l == 0 && p % l == 0 && std::gcd(n / l, p) == 1)
          found.push_back({n, n / l, l});
      }
      ASSERT_LE(found.size(), 1u) << name << " n=" << n;
      if (found.empty()) {
        EXPECT_THROW(decompose_power(x, n), PreconditionError) << name << " n=" << n;
        continue;
      }
      auto d = decompose_power(x, n);
      EXPECT_EQ(d.n, d.k * d.l);
      EXPECT_EQ(d, found.front()) << name << " n=" << n;
    }
  }
}

TEST(DecomposePower, NoFactorizationForSquareOfPeriodTwo)
{
  EXPECT_THROW(decompose_power(graph("0 1 / 1 0"), 4), PreconditionError);
}

TEST(RestrictedTransitivity, Examples)
{
  EXPECT_TRUE(restricted_transitivity(graph("0 1 / 1 0"), 2, 1));
  EdgeShift p4 = stabdyn::testing::catalog()[9].shift;
  EXPECT_FALSE(restricted_transitivity(p4, 2, 2));
  EXPECT_TRUE(restricted_transitivity(p4, 4, 5));
  EXPECT_THROW(restricted_transitivity(graph("1 1 / 1 0"), 2, 1), NoSuchEigenvalue);
}

TEST(RestrictedTransitivity, FormulaMatchesConnectivity)
{
  for (auto const &[name, x] : all_test_graphs()) {
    for (auto m : rational_eigs(x)) {
      for (std::uint64_t n = 1; n * m <= 12; ++n)
        EXPECT_EQ(restricted_transitivity(x, m, n),
                  restricted_transitivity_by_connectivity(x, m, n))
          << name << " m=" << m << " n=" << n;
    }
  }
}

TEST(RestrictedTransitivity, PowerTransitiveSetsGrow)
{
  for (auto const &[name, x] : all_test_graphs()) {
    for (auto q : rational_eigs(x)) {
      EdgeShift s = component_system(x, q).component_shift;
      for (std::uint64_t n = 1; n <= 12; ++n) {
        if (is_power_transitive(x, n))
          EXPECT_TRUE(is_power_transitive_by_connectivity(s, n)) << name << " q=" << q;
      }
    }
  }
}
