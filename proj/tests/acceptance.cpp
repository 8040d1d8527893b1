// Acceptance run: one PASS/FAIL line per criterion, tolerances and time
// limits fixed below. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "stabdyn/automorphisms.hpp"
#include "stabdyn/finite_group.hpp"
#include "stabdyn/seq_examples.hpp"
#include "stabdyn/spectral.hpp"
#include "stabdyn/stab_verify.hpp"
#include "stabdyn/wreath.hpp"
#include "test_graphs.hpp"

using namespace stabdyn;

namespace
{

constexpr double full_shift_tol = 1e-12;
constexpr double golden_tol = 1e-9;
constexpr double ratio_residual_tol = 1e-12;
constexpr double power_entropy_tol = 1e-9;
constexpr int random_pairs = 10'000;
constexpr std::uint64_t ambient_order_cap = 20'000;
constexpr std::uint64_t rigidity_order_cap = 2'000;

struct Verdict
{
  bool passed = false;
  std::string detail;
};

// ---------------------------------------------------------------- criterion 1

using Points = std::vector<std::uint32_t>;

/// Right action of (g, s) on G x {0..n-1}: (x, i) -> (x g_j, j) with
/// j = s^-1(i). Point (x, i) is i|G| + x.
Points imprimitive(FiniteGroup const &G, WreathElement const &a)
{
  std::size_t n = a.g.size(), k = G.order();
  std::vector<std::uint32_t> back(n);
  for (std::uint32_t i = 0; i < n; ++i)
    back[a.sigma(i)] = i;
  Points out(n * k);
  for (std::uint32_t i = 0; i < n; ++i)
    for (Element x = 0; x < k; ++x)
      out[i * k + x] = static_cast<std::uint32_t>(back[i] * k + G.mul(x, a.g[back[i]]));
  return out;
}

/// a first, then b.
Points then(Points const &a, Points const &b)
{
  Points out(a.size());
  for (std::size_t p = 0; p < a.size(); ++p)
    out[p] = b[a[p]];
  return out;
}

Points inverse(Points const &a)
{
  Points out(a.size());
  for (std::size_t p = 0; p < a.size(); ++p)
    out[a[p]] = static_cast<std::uint32_t>(p);
  return out;
}

/// Mismatches between the closed forms and the permutation action on one pair.
int mismatches(FiniteGroup const &G, WreathElement const &x, WreathElement const &y)
{
  Points px = imprimitive(G, x), py = imprimitive(G, y);
  Points ix = inverse(px), iy = inverse(py);
  int bad = 0;
  bad += imprimitive(G, wr_mul(G, x, y)) != then(px, py);
  bad += imprimitive(G, wr_inv(G, x)) != ix;
  bad += imprimitive(G, wr_conj(G, x, y)) != then(then(py, px), iy);
  bad += imprimitive(G, wr_comm(G, x, y)) != then(then(then(px, py), ix), iy);
  return bad;
}

WreathElement random_element(FiniteGroup const &G, std::size_t n, std::mt19937_64 &rng)
{
  std::uniform_int_distribution<Element> pick(0, static_cast<Element>(G.order() - 1));
  std::vector<Element> g(n);
  for (auto &x : g)
    x = pick(rng);
  std::uniform_int_distribution<std::uint64_t> rank(0, factorial(n) - 1);
  return {std::move(g), Permutation::unrank(n, rank(rng))};
}

Verdict criterion1()
{
  struct Ambient
  {
    char const *name;
    FiniteGroup G;
    std::size_t n;
  };
  std::vector<Ambient> exhaustive = {{"Z2 wr S2", cyclic_group(2), 2},
                                     {"Z2 wr S3", cyclic_group(2), 3},
                                     {"Z3 wr S2", cyclic_group(3), 2},
                                     {"Z4 wr S3", cyclic_group(4), 3}};
  std::vector<Ambient> sampled = exhaustive;
  sampled.push_back({"Z3 wr S4", cyclic_group(3), 4});
  sampled.push_back({"S3 wr S3", symmetric_group(3), 3});
  sampled.push_back({"Q8 wr S3", quaternion_group(), 3});
  sampled.push_back({"D4 wr S3", dihedral_group(4), 3});
  sampled.push_back({"Z2 wr S5", cyclic_group(2), 5});
  sampled.push_back({"Z5 wr S4", cyclic_group(5), 4});

  std::uint64_t pairs = 0, bad = 0;
  for (auto const &[name, G, n] : exhaustive) {
    auto elements = wreath_group(G, n).elements;
    for (auto const &x : elements)
      for (auto const &y : elements) {
        bad += mismatches(G, x, y);
        ++pairs;
      }
  }
  std::mt19937_64 rng(20240917);
  for (auto const &[name, G, n] : sampled) {
    std::uint64_t order = factorial(n);
    for (std::size_t i = 0; i < n; ++i)
      order *= G.order();
    if (order > ambient_order_cap)
      return {false, std::string(name) + " exceeds the ambient order cap"};
    for (int i = 0; i < random_pairs; ++i) {
      bad += mismatches(G, random_element(G, n, rng), random_element(G, n, rng));
      ++pairs;
    }
  }
  return {bad == 0, std::to_string(bad) + " mismatches over " + std::to_string(pairs) +
                      " pairs (" + std::to_string(exhaustive.size()) + " ambients exhaustive, " +
                      std::to_string(sampled.size()) + " sampled)"};
}

// ---------------------------------------------------------------- criterion 2

std::vector<Element> naive_centralizer(FiniteGroup const &W, std::vector<Element> const &subset)
{
  std::vector<Element> out;
  for (Element g = 0; g < W.order(); ++g) {
    bool central = true;
    for (Element k : subset)
      if (W.mul(g, k) != W.mul(k, g)) {
        central = false;
        break;
      }
    if (central)
      out.push_back(g);
  }
  return out;
}

/// Indices of {(c, ..., c; 1) : c in values}, built from scratch.
std::vector<Element> diagonal(WreathGroup const &w, std::vector<Element> const &values)
{
  std::vector<Element> out;
  for (Element c : values)
    out.push_back(w.index_of({std::vector<Element>(w.degree, c), Permutation::identity(w.degree)}));
  std::sort(out.begin(), out.end());
  return out;
}

Verdict criterion2()
{
  std::vector<std::pair<std::size_t, std::size_t>> cases = {{2, 3}, {3, 3}, {2, 4}};
  std::ostringstream detail;
  bool ok = true;
  for (auto [k, n] : cases) {
    FiniteGroup G = cyclic_group(k);
    WreathGroup w = wreath_group(G, n);
    std::vector<Element> everything(w.group.order());
    std::iota(everything.begin(), everything.end(), 0);
    std::vector<Element> center = G.center();
    std::vector<Element> all_g(G.order());
    std::iota(all_g.begin(), all_g.end(), 0);

    std::vector<Element> gens = diagonal(w, center);
    for (auto const &t : w.elements)
      if (std::all_of(t.g.begin(), t.g.end(), [&](Element e) { return e == G.identity(); }))
        gens.push_back(w.index_of(t));
    std::vector<Element> diag_top = w.group.generate(gens);

    auto whole = naive_centralizer(w.group, everything);
    auto of_diag_top = naive_centralizer(w.group, diag_top);
    bool here = whole == diagonal(w, center) && of_diag_top == diagonal(w, all_g) &&
                centralizer(w.group, everything) == whole &&
                centralizer(w.group, diag_top) == of_diag_top;
    ok = ok && here;
    detail << "Z" << k << " wr S" << n << ": |C(W)| = " << whole.size()
           << ", |C(diag x Sym)| = " << of_diag_top.size() << (here ? "" : " MISMATCH") << "; ";
  }
  return {ok, detail.str()};
}

// ---------------------------------------------------------------- criterion 3

Verdict criterion3()
{
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t m = 1; m <= 6; ++m) {
    auto all = all_permutations(m);
    std::set<std::vector<Permutation>> expected;
    expected.insert({Permutation::identity(m)});
    expected.insert(all);
    std::vector<Permutation> even;
    for (auto const &p : all)
      if (p.is_even())
        even.push_back(p);
    expected.insert(even);
    if (m == 4) {
      std::vector<Permutation> v;
      for (auto const &p : all)
        if (p.is_identity() || (p.order() == 2 && p.is_even()))
          v.push_back(p);
      expected.insert(v);
    }
    auto found = normal_subgroups_sym(m);
    std::set<std::vector<Permutation>> got(found.begin(), found.end());
    bool here = got == expected && got.size() == found.size();
    if (m <= 5)
      here = here && normal_subgroups(symmetric_group(m)).size() == expected.size();
    ok = ok && here;
    detail << "m=" << m << ": " << found.size() << (here ? "" : " MISMATCH") << " ";
  }
  return {ok, detail.str() + "normal subgroups"};
}

// ---------------------------------------------------------------- criterion 4

Verdict criterion4()
{
  // Every solution of |G|^n n! = |H|^m m! <= cap with n != m, both >= 2 and
  // both groups nontrivial, has |G|, |H| <= 9, so small_groups() covers it.
  std::size_t largest = 0;
  for (std::uint64_t n = 2; factorial(n) * 2 <= rigidity_order_cap; ++n)
    for (std::uint64_t m = 2; factorial(m) * 2 <= rigidity_order_cap; ++m) {
      if (n == m)
        continue;
      for (std::uint64_t a = 2;; ++a) {
        std::uint64_t wa = factorial(n);
        for (std::uint64_t i = 0; i < n && wa <= rigidity_order_cap; ++i)
          wa *= a;
        if (wa > rigidity_order_cap)
          break;
        for (std::uint64_t b = 2;; ++b) {
          std::uint64_t wb = factorial(m);
          for (std::uint64_t i = 0; i < m && wb <= rigidity_order_cap; ++i)
            wb *= b;
          if (wb > rigidity_order_cap)
            break;
          if (wa == wb)
            largest = std::max<std::size_t>(largest, std::max(a, b));
        }
      }
    }
  std::size_t catalog_max = 0;
  for (auto const &g : small_groups())
    catalog_max = std::max(catalog_max, g.group.order());
  if (largest > catalog_max)
    return {false, "an equal-order pair needs a base of order " + std::to_string(largest)};

  RigiditySweep sweep = rigidity_sweep(rigidity_order_cap, 6);
  std::size_t unequal = 0, isomorphic_unequal = 0;
  bool saw_162 = false;
  for (auto const &e : sweep.materialized) {
    if (e.report.n == e.report.m)
      continue;
    ++unequal;
    isomorphic_unequal += e.report.wreaths_isomorphic;
    bool pair = (e.g_name == "Z9^2" && e.h_name == "Z3^3") ||
                (e.g_name == "Z3^3" && e.h_name == "Z9^2");
    saw_162 = saw_162 || (pair && !e.report.wreaths_isomorphic);
  }
  bool ok = sweep.violations == 0 && isomorphic_unequal == 0 && saw_162 && unequal > 0;
  return {ok, std::to_string(sweep.pairs_materialized) + " equal-order pairs, " +
                std::to_string(unequal) + " with n != m, " + std::to_string(sweep.violations) +
                " THEOREM-VIOLATIONs, order-162 pair " + (saw_162 ? "checked" : "MISSING")};
}

// ---------------------------------------------------------------- criterion 5

/// Exhaustive backtracking over labelings states -> Z/m with every edge
/// stepping k -> k + 1 and every class nonempty.
bool partition_exists(EdgeShift const &shift, std::size_t m)
{
  std::size_t s = shift.state_count();
  if (m > s)
    return false;
  std::vector<int> label(s, -1);
  std::function<bool(std::size_t)> place = [&](std::size_t v) -> bool {
    if (v == s) {
      std::vector<char> hit(m, 0);
      for (int l : label)
        hit[static_cast<std::size_t>(l)] = 1;
      return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
    }
    for (std::size_t c = 0; c < m; ++c) {
      label[v] = static_cast<int>(c);
      bool consistent = true;
      for (std::size_t u = 0; u <= v && consistent; ++u) {
        auto lu = static_cast<std::size_t>(label[u]);
        if (shift.adjacency()[u][v] && (lu + 1) % m != c)
          consistent = false;
        if (shift.adjacency()[v][u] && (c + 1) % m != lu)
          consistent = false;
      }
      if (consistent && place(v + 1))
        return true;
    }
    label[v] = -1;
    return false;
  };
  return place(0);
}

Verdict criterion5()
{
  std::size_t graphs = 0, mismatches = 0;
  for (auto const &[name, shift] : testing::all_test_graphs()) {
    if (shift.state_count() > 6 || !is_irreducible(shift))
      continue;
    std::uint64_t p = testing::period_by_cycles(shift);
    if (p > 6)
      continue;
    ++graphs;
    auto eigs = rational_eigs(shift);
    std::vector<std::uint64_t> divs;
    for (std::uint64_t d = 1; d <= p; ++d)
      if (p % d == 0)
        divs.push_back(d);
    mismatches += eigs != divs;
    for (std::uint64_t m = 1; m <= 12; ++m) {
      bool in_eig = std::find(eigs.begin(), eigs.end(), m) != eigs.end();
      mismatches += in_eig != partition_exists(shift, m);
    }
  }
  return {mismatches == 0 && graphs > 0,
          std::to_string(graphs) + " graphs, m = 1..12, " + std::to_string(mismatches) +
            " mismatches"};
}

// ---------------------------------------------------------------- criterion 6

Verdict criterion6()
{
  std::size_t failures = 0, checks = 0;
  std::ostringstream failed;
  for (auto const &in : split_instance_matrix()) {
    auto rep = verify_split_sequence(parse_edge_shift(in.matrix), in.n, in.m, in.radius);
    for (auto const &c : rep.checks) {
      ++checks;
      if (!c.passed) {
        ++failures;
        failed << " " << in.name << "(n=" << in.n << ",m=" << in.m << "):" << c.name;
      }
    }
  }
  return {failures == 0, std::to_string(split_instance_matrix().size()) + " instances, " +
                           std::to_string(checks) + " named checks, " +
                           std::to_string(failures) + " failures" + failed.str()};
}

// ---------------------------------------------------------------- criterion 7

Verdict criterion7()
{
  double worst = 0;
  for (std::uint64_t k = 2; k <= 16; ++k) {
    double h = entropy(EdgeShift::from_matrix({{k}})).entropy;
    worst = std::max(worst, std::abs(h - std::log(static_cast<double>(k))));
  }
  double golden = entropy(parse_edge_shift("1 1 / 1 0")).entropy;
  double golden_err = std::abs(golden - std::log((1 + std::sqrt(5.0)) / 2));
  auto ratio = entropy_ratio(parse_edge_shift("2"), parse_edge_shift("4"));
  bool ratio_ok = ratio.p == 1 && ratio.q == 2 && ratio.residual < ratio_residual_tol &&
                  ratio.rational_within_tolerance;
  std::ostringstream detail;
  detail << "full shifts max error " << worst << ", golden error " << golden_err
         << ", h(X2)/h(X4) = " << ratio.p << "/" << ratio.q << " residual "
         << static_cast<double>(ratio.residual);
  return {worst <= full_shift_tol && golden_err <= golden_tol && ratio_ok, detail.str()};
}

// ---------------------------------------------------------------- criterion 8

Verdict criterion8()
{
  std::size_t cases = 0, entropy_bad = 0, transitivity_bad = 0;
  double worst = 0;
  for (auto const &[name, shift] : testing::all_test_graphs()) {
    std::uint64_t p = testing::period_by_cycles(shift);
    double h = entropy(shift).entropy;
    for (std::uint64_t n = 1; n <= 12; ++n) {
      ++cases;
      PowerShift power = power_shift(shift, n);
      double err = std::abs(entropy(power.shift).entropy - static_cast<double>(n) * h);
      worst = std::max(worst, err);
      entropy_bad += err > power_entropy_tol;
      bool formula = std::gcd(n, p) == 1;
      bool routes[] = {is_power_transitive(shift, n),
                       is_power_transitive_by_connectivity(shift, n),
                       is_irreducible(power.shift)};
      for (bool r : routes)
        transitivity_bad += r != formula;
    }
  }
  std::ostringstream detail;
  detail << cases << " (graph, n) cases, entropy max error " << worst << ", "
         << transitivity_bad << " transitivity disagreements";
  return {entropy_bad == 0 && transitivity_bad == 0, detail.str()};
}

// ---------------------------------------------------------------- criterion 9

Verdict criterion9()
{
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= 10; ++n)
    bad += !check_example1_residues(n).passed;
  for (std::size_t n = 1; n <= 18; ++n)
    bad += example1_marker(n + 1) != example1_marker(n) + std::string(std::size_t{1} << n, '0');
  std::size_t three = 3;
  for (std::size_t n = 1; n <= 12; ++n) {
    three *= 3;
    bad += example2_word(n).size() != three;
  }
  for (std::size_t n = 1; n <= 4; ++n)
    bad += !check_example2_markers(n).passed;
  return {bad == 0, "example1 residues n<=10, marker growth n<=18, example2 lengths n<=12, "
                    "example2 markers n<=4: " + std::to_string(bad) + " failures"};
}

// --------------------------------------------------------------- criterion 10

Verdict criterion10()
{
  std::size_t full2 = enumerate_automorphisms(parse_edge_shift("2"), 1, 0).size();
  std::size_t golden = enumerate_automorphisms(parse_edge_shift("1 1 / 1 0"), 1, 0).size();
  std::size_t law_failures = 0, assoc_failures = 0, triples = 0;
  struct Case
  {
    char const *matrix;
    std::uint64_t n;
    std::size_t r;
  };
  for (auto [matrix, n, r] : {Case{"2", 1, 1}, Case{"1 1 / 1 0", 1, 1}, Case{"0 2 / 1 0", 1, 1},
                              Case{"2", 2, 0}, Case{"3", 1, 0}}) {
    AutomorphismSet set = enumerate_automorphisms(parse_edge_shift(matrix), n, r);
    law_failures += !check_group_laws(set).passed();
    for (std::size_t i = 0; i < set.size(); ++i)
      law_failures += !is_identity(compose(set.elements[i], set.inverses[i]));
    for (auto const &a : set.elements)
      for (auto const &b : set.elements)
        for (auto const &c : set.elements) {
          ++triples;
          assoc_failures += !same_map(compose(compose(a, b), c), compose(a, compose(b, c)));
        }
  }
  std::ostringstream detail;
  detail << "full 2-shift r=0: " << full2 << ", golden r=0: " << golden << ", group law failures "
         << law_failures << ", associativity failures " << assoc_failures << "/" << triples;
  return {full2 == 2 && golden == 1 && law_failures == 0 && assoc_failures == 0, detail.str()};
}

} // namespace

int main()
{
  struct Criterion
  {
    int id;
    char const *title;
    double limit_seconds;
    Verdict (*run)();
  };
  Criterion criteria[] = {
    {1, "wreath algebra exactness", 60, criterion1},
    {2, "centralizers in wreath products", 30, criterion2},
    {3, "normal subgroups of Sym(m)", 60, criterion3},
    {4, "rigidity sweep", 600, criterion4},
    {5, "eigenvalues vs cyclic partitions", 120, criterion5},
    {6, "split exact sequence", 300, criterion6},
    {7, "entropy", 10, criterion7},
    {8, "power laws", 120, criterion8},
    {9, "recursive examples", 60, criterion9},
    {10, "automorphism enumeration", 30, criterion10},
  };
  int failed = 0;
  for (auto const &c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (std::exception const &e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = seconds <= c.limit_seconds;
    bool pass = v.passed && in_time;
    failed += !pass;
    std::printf("criterion %2d %s  %s: %s (%.2f s, limit %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL",
                c.title, v.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  return failed;
}
