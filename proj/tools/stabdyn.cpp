#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "stabdyn/automorphisms.hpp"
#include "stabdyn/errors.hpp"
#include "stabdyn/seq_examples.hpp"
#include "stabdyn/serialize.hpp"
#include "stabdyn/spectral.hpp"
#include "stabdyn/stab_verify.hpp"
#include "stabdyn/wreath_calc.hpp"

using namespace stabdyn;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_violation = 2;

struct Common
{
  bool json = false;
  bool quiet = false;
  bool verify = false;
  std::uint64_t seed = 1;
  std::string manifest;
  std::string output;
  std::string budget;
};

struct Outcome
{
  Json doc;
  std::string text;
  int code = exit_ok;
};

/// State shared by one invocation.
struct Run
{
  Common common;
  Budgets budgets;
  Json input_hashes = Json::object();
};

std::string read_file(std::string const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_file(std::string const &arg)
{
  std::error_code ec;
  return std::filesystem::is_regular_file(arg, ec);
}

/// A file path, or else matrix text given inline.
EdgeShift load_shift(Run &run, std::string const &key, std::string const &arg)
{
  EdgeShift shift = parse_edge_shift(is_file(arg) ? read_file(arg) : arg);
  run.input_hashes[key] = shift.hash();
  return shift;
}

Json load_json_file(Run &run, std::string const &key, std::string const &path)
{
  std::string text = read_file(path);
  run.input_hashes[key] = fnv1a_hex(text);
  try {
    return Json::parse(text);
  } catch (nlohmann::json::exception const &e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// A group file, or a name such as Z9, S3, Z3xZ3.
FiniteGroup load_group(Run &run, std::string const &key, std::string const &arg)
{
  if (is_file(arg))
    return group_from_json(load_json_file(run, key, arg));
  run.input_hashes[key] = fnv1a_hex(arg);
  return named_group(arg, run.budgets);
}

template <class T>
std::string join(std::vector<T> const &xs, std::string const &sep = ", ")
{
  std::ostringstream ss;
  for (std::size_t i = 0; i < xs.size(); ++i)
    ss << (i ? sep : "") << xs[i];
  return ss.str();
}

std::string fixed(long double x, int digits = 12)
{
  std::ostringstream ss;
  ss.precision(digits);
  ss << std::fixed << static_cast<double>(x);
  return ss.str();
}

std::string checks_text(std::vector<NamedCheck> const &checks)
{
  std::ostringstream ss;
  for (auto const &c : checks) {
    ss << "  " << (c.passed ? "pass" : "FAIL") << "  " << c.name << " (" << c.cases << " cases)";
    if (!c.passed)
      ss << ": " << c.counterexample;
    ss << "\n";
  }
  return ss.str();
}

// analyze / eigs / partition -------------------------------------------------

Outcome cmd_analyze(Run &run, std::string const &input)
{
  EdgeShift shift = load_shift(run, "input", input);
  Outcome out{document("analysis"), {}, exit_ok};
  Json &doc = out.doc;
  doc["sft"] = to_json(shift);
  doc["normalization_log"] = shift.normalization_log();
  doc["states"] = shift.state_count();
  doc["edges"] = shift.edge_count();
  std::ostringstream text;
  text << "states " << shift.state_count() << ", edges " << shift.edge_count() << ", hash "
       << shift.hash() << "\n";

  bool irreducible = is_irreducible(shift);
  doc["is_irreducible"] = irreducible;

  EntropyResult power = entropy(shift);
  long double h = precise_entropy(shift);
  doc["is_mixing"] = irreducible && is_mixing(shift);
  doc["entropy"] = static_cast<double>(h);
  doc["perron"] = power.perron;
  doc["entropy_power_iteration"] = power.entropy;
  text << "irreducible " << (irreducible ? "yes" : "no") << "\n";
  text << "entropy " << fixed(h) << " (perron " << fixed(power.perron) << ")\n";

  if (!irreducible) {
    doc["period"] = nullptr;
    doc["rational_eigs"] = nullptr;
    doc["smale"] = nullptr;
    out.text = text.str();
    return out;
  }

  std::uint64_t p = period(shift);
  auto eigs = rational_eigs(shift);
  doc["period"] = p;
  doc["rational_eigs"] = eigs;
  SmaleDecomposition s = smale(shift, run.budgets);
  Json sm;
  sm["period"] = s.period;
  sm["parent_hash"] = s.partition.parent_hash;
  sm["classes"] = s.partition.classes;
  sm["component_hash"] = s.component_shift.hash();
  sm["component_states"] = s.component_shift.state_count();
  sm["component_edges"] = s.component_shift.edge_count();
  sm["component_mixing"] = is_mixing(s.component_shift);
  sm["component_entropy"] = static_cast<double>(precise_entropy(s.component_shift));
  doc["smale"] = std::move(sm);
  text << "period " << p << ", Eig {" << join(eigs) << "}\n";
  text << "smale: " << s.period << " classes, component " << s.component_shift.state_count()
       << " states / " << s.component_shift.edge_count() << " edges\n";

  if (run.common.verify) {
    // Dual routes: gcd formula against connectivity of A^n, Perron root
    // against the characteristic polynomial, partitions against the graph.
    Json v;
    bool agree = true;
    Json transitivity = Json::array();
    for (std::uint64_t n = 1; n <= 12; ++n) {
      bool formula = is_power_transitive(shift, n);
      bool graph = is_power_transitive_by_connectivity(shift, n);
      agree = agree && formula == graph;
      transitivity.push_back({{"n", n}, {"formula", formula}, {"connectivity", graph}});
    }
    v["power_transitivity"] = std::move(transitivity);
    if (shift.state_count() <= 6) {
      double root = perron_root_from_charpoly(shift);
      bool ok = std::abs(root - power.perron) <= 1e-9 * std::max(1.0, root);
      agree = agree && ok;
      v["charpoly_perron"] = root;
      v["charpoly_agrees"] = ok;
    }
    Json partitions = Json::array();
    for (std::uint64_t m : eigs) {
      bool ok = is_cyclic_partition(shift, cyclic_partition(shift, m));
      agree = agree && ok;
      partitions.push_back({{"m", m}, {"valid", ok}});
    }
    v["partitions"] = std::move(partitions);
    v["all_agree"] = agree;
    doc["verification"] = std::move(v);
    text << "verification " << (agree ? "agrees" : "DISAGREES") << "\n";
    if (!agree)
      out.code = exit_violation;
  }
  out.text = text.str();
  return out;
}

/// Labels state 0 with class 0 and pushes k -> k + 1 (mod m) along edges in
/// both directions; a size-m cyclic partition exists iff nothing conflicts
/// and every class is hit.
bool partition_by_propagation(EdgeShift const &shift, std::uint64_t m)
{
  std::vector<std::int64_t> label(shift.state_count(), -1);
  std::vector<StateId> stack{0};
  label[0] = 0;
  auto const step = static_cast<std::int64_t>(m);
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    auto visit = [&](StateId t, std::int64_t want) {
      want = ((want % step) + step) % step;
      if (label[t] < 0) {
        label[t] = want;
        stack.push_back(t);
      }
      return label[t] == want;
    };
    for (EdgeId e : shift.out_edges(s))
      if (!visit(shift.edge(e).head, label[s] + 1))
        return false;
    for (EdgeId e : shift.in_edges(s))
      if (!visit(shift.edge(e).tail, label[s] - 1))
        return false;
  }
  std::vector<char> hit(m, 0);
  for (auto l : label)
    if (l >= 0)
      hit[static_cast<std::size_t>(l)] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
}

Outcome cmd_eigs(Run &run, std::string const &input)
{
  EdgeShift shift = load_shift(run, "input", input);
  Outcome out{document("rational_eigs"), {}, exit_ok};
  std::uint64_t p = period(shift);
  auto eigs = rational_eigs(shift);
  out.doc["sft_hash"] = shift.hash();
  out.doc["period"] = p;
  out.doc["rational_eigs"] = eigs;
  out.text = "period " + std::to_string(p) + "\nEig {" + join(eigs) + "}\n";
  if (run.common.verify) {
    bool agree = true;
    Json rows = Json::array();
    for (std::uint64_t m = 1; m <= std::max<std::uint64_t>(2 * p, 6); ++m) {
      bool in_eig = std::find(eigs.begin(), eigs.end(), m) != eigs.end();
      bool found = partition_by_propagation(shift, m);
      agree = agree && found == in_eig;
      rows.push_back({{"m", m}, {"eigenvalue", in_eig}, {"partition", found}});
    }
    out.doc["verification"] = {{"partitions", std::move(rows)}, {"all_agree", agree}};
    out.text += std::string("verification ") + (agree ? "agrees" : "DISAGREES") + "\n";
    if (!agree)
      out.code = exit_violation;
  }
  return out;
}

Outcome cmd_partition(Run &run, std::string const &input, std::uint64_t m,
                      std::optional<std::uint64_t> coarsen)
{
  EdgeShift shift = load_shift(run, "input", input);
  CyclicPartition part = cyclic_partition(shift, m);
  if (coarsen)
    part = coarsen_partition(part, *coarsen);
  Outcome out{document("cyclic_partition"), {}, exit_ok};
  Json body = to_json(part);
  for (auto &[k, v] : body.items())
    out.doc[k] = v;
  bool valid = is_cyclic_partition(shift, part);
  out.doc["valid"] = valid;
  std::ostringstream text;
  for (std::size_t k = 0; k < part.classes.size(); ++k)
    text << "class " << k << ": {" << join(part.classes[k]) << "}\n";
  out.text = text.str();
  if (!valid)
    out.code = exit_violation;
  return out;
}

// autos / verify-wreath ------------------------------------------------------

Outcome cmd_autos(Run &run, std::string const &input, std::uint64_t power, std::size_t radius,
                  std::optional<std::size_t> inverse_radius)
{
  EdgeShift shift = load_shift(run, "input", input);
  AutomorphismSet set = enumerate_automorphisms(shift, power, radius, inverse_radius, run.budgets);
  GroupLawReport laws = check_group_laws(set);
  Outcome out{document("automorphism_set"), {}, exit_ok};
  Json body = to_json(set);
  for (auto &[k, v] : body.items())
    out.doc[k] = v;
  out.doc["group_laws"] = to_json(laws);
  out.text = "count " + std::to_string(set.size()) + "\ngroup laws: " + laws.summary() + "\n";
  if (!laws.passed())
    out.code = exit_violation;
  return out;
}

struct WreathArgs
{
  std::uint64_t n = 1, m = 1;
  std::size_t radius = 1;
  std::optional<std::size_t> inverse_radius;
  std::size_t tuple_limit = SplitOptions{}.tuple_limit;
  std::size_t pair_limit = SplitOptions{}.pair_limit;
  bool quotients = false;
};

Outcome cmd_verify_wreath(Run &run, std::string const &input, WreathArgs const &a)
{
  EdgeShift shift = load_shift(run, "input", input);
  SplitOptions options;
  options.tuple_limit = a.tuple_limit;
  options.pair_limit = a.pair_limit;
  options.seed = run.common.seed;
  auto rep = verify_split_sequence(shift, a.n, a.m, a.radius, a.inverse_radius, options,
                                   run.budgets);
  Outcome out{to_json(rep), {}, rep.passed() ? exit_ok : exit_violation};
  std::ostringstream text;
  text << "|A| = " << rep.aut_count << ", |G| = " << rep.component_aut_count << ", kernel "
       << rep.kernel_count << ", image " << rep.image_count << ", core " << rep.core_size
       << " = " << rep.core_kernel << " * " << rep.core_image << "\n";
  text << checks_text(rep.checks);
  for (auto const &note : rep.notes)
    text << "note: " << note << "\n";

  if (a.quotients) {
    auto q = verify_quotient_isos(shift, a.m, a.radius, a.inverse_radius, run.budgets);
    Json qd = to_json(q);
    qd.erase("schema_version");
    qd.erase("kind");
    out.doc["quotients"] = std::move(qd);
    text << "quotients: Aut/<T> order " << q.mod_shift.order << ", Aut/<T^m> order "
         << q.mod_shift_power.order << ", component " << q.component.order
         << (q.inconclusive ? " (inconclusive)" : "") << "\n"
         << checks_text(q.checks);
    if (!q.passed())
      out.code = exit_violation;
  }
  text << (out.code == exit_ok ? "PASS" : "FAIL") << "\n";
  out.text = text.str();
  return out;
}

// groups ---------------------------------------------------------------------

Outcome cmd_wreath_calc(Run &run, std::string const &path)
{
  Json input = load_json_file(run, "expressions", path);
  Outcome out{run_wreath_calc(input, run.budgets), {}, exit_ok};
  std::ostringstream text;
  for (auto const &row : out.doc["results"])
    text << row["expression"].get<std::string>() << " = " << row["value"].dump() << "\n";
  auto mismatches = out.doc["formula_mismatches"].get<std::size_t>();
  text << "closed forms: " << out.doc["formula_checks"].get<std::size_t>() << " checked, "
       << mismatches << " mismatches\n";
  out.text = text.str();
  if (mismatches)
    out.code = exit_violation;
  return out;
}

Outcome cmd_rigidity(Run &run, std::string const &g_arg, std::uint64_t n,
                     std::string const &h_arg, std::uint64_t m)
{
  FiniteGroup G = load_group(run, "groupG", g_arg);
  FiniteGroup H = load_group(run, "groupH", h_arg);
  RigidityReport rep = check_wreath_rigidity(G, n, H, m, run.budgets);
  Outcome out{to_json(rep), {}, rep.violation ? exit_violation : exit_ok};
  out.text = "|G wr Sym(" + std::to_string(n) + ")| = " + std::to_string(rep.wreath_order_g) +
             ", |H wr Sym(" + std::to_string(m) + ")| = " + std::to_string(rep.wreath_order_h) +
             "\n" + rep.message + "\n";
  return out;
}

// dynamics comparisons -------------------------------------------------------

Outcome cmd_compare_eigs(Run &run, std::string const &x, std::string const &y)
{
  EdgeShift X = load_shift(run, "inputX", x);
  EdgeShift Y = load_shift(run, "inputY", y);
  EigComparison cmp = compare_rational_eigs(X, Y);
  Outcome out{to_json(cmp), {}, exit_ok};
  out.text = "Eig(X) = {" + join(cmp.eig_x) + "}\nEig(Y) = {" + join(cmp.eig_y) + "}\n" +
             (cmp.equal ? "equal" : "different") + "\n";
  return out;
}

Outcome cmd_entropy_ratio(Run &run, std::string const &x, std::string const &y,
                          std::uint64_t max_den, double tol)
{
  EdgeShift X = load_shift(run, "inputX", x);
  EdgeShift Y = load_shift(run, "inputY", y);
  EntropyRatioReport rep = entropy_ratio(X, Y, max_den, tol);
  Outcome out{to_json(rep), {}, exit_ok};
  std::ostringstream text;
  text << "h(X) = " << fixed(rep.h_x) << ", h(Y) = " << fixed(rep.h_y) << "\n";
  text << "ratio " << fixed(rep.ratio, 15) << " ~ " << rep.p << "/" << rep.q << " (residual "
       << std::scientific << static_cast<double>(rep.residual) << ")\n";
  if (rep.exact_confirmation)
    text << "exact: " << (*rep.exact_confirmation ? "confirmed" : "not confirmed") << "\n";
  text << rep.verdict() << "\n";
  out.text = text.str();
  return out;
}

// sequences ------------------------------------------------------------------

std::string_view prefix_of(std::string const &word, std::optional<std::size_t> depth)
{
  std::size_t d = depth.value_or(word.size());
  if (d > word.size())
    throw PreconditionError("--depth " + std::to_string(d) + " exceeds the word length " +
                            std::to_string(word.size()));
  return std::string_view(word).substr(0, d);
}

Json residue_row(std::size_t n, ResidueReport const &r)
{
  Json row;
  row["n"] = n;
  row["modulus"] = r.modulus;
  row["occurrences"] = r.occurrences.size();
  row["residue"] = r.residue ? Json(*r.residue) : Json(nullptr);
  row["passed"] = r.passed;
  return row;
}

Outcome cmd_example1(Run &run, std::size_t level, std::optional<std::size_t> depth)
{
  RecursiveWord gen = example1(level, run.budgets);
  std::string_view word = prefix_of(gen.word, depth);
  Outcome out{document("example1"), std::string(word) + "\n", exit_ok};
  out.doc["level"] = level;
  out.doc["length"] = gen.word.size();
  out.doc["depth"] = word.size();
  out.doc["word"] = std::string(word);
  bool passed = true;
  Json rows = Json::array();
  for (std::size_t n = 1; n <= level; ++n) {
    auto r = check_marker_residues(word, gen.markers[n - 1], std::uint64_t{1} << n, 0);
    passed = passed && r.passed;
    rows.push_back(residue_row(n, r));
  }
  out.doc["residues"] = std::move(rows);
  out.doc["passed"] = passed;
  if (!passed)
    out.code = exit_violation;
  return out;
}

Outcome cmd_example2(Run &run, std::size_t level, std::optional<std::size_t> depth)
{
  RecursiveWord gen = example2(level, run.budgets);
  std::string_view word = prefix_of(gen.word, depth);
  Outcome out{document("example2"), std::string(word) + "\n", exit_ok};
  out.doc["level"] = level;
  out.doc["recursion"] = "A_0 = aaa, A_{n+1} = A_n b_{n+1} A_n";
  out.doc["length"] = gen.word.size();
  out.doc["depth"] = word.size();
  out.doc["word"] = std::string(word);
  bool passed = true;
  Json rows = Json::array();
  for (std::size_t n = 1; n <= level; ++n) {
    MarkerReport r = check_example2_markers_on(word, n, run.budgets);
    passed = passed && r.passed;
    Json row = residue_row(n, r.residues);
    row["alpha_uncovered"] = r.alpha_uncovered;
    row["passed"] = r.passed;
    rows.push_back(std::move(row));
  }
  out.doc["markers"] = std::move(rows);
  out.doc["passed"] = passed;
  if (!passed)
    out.code = exit_violation;
  return out;
}

// sweep ----------------------------------------------------------------------

/// Runs job(i) for i < count on `jobs` threads; results land by index.
void parallel_for(std::size_t count, std::size_t jobs, std::function<void(std::size_t)> const &job)
{
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::max<std::size_t>(jobs, 1); ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

Outcome cmd_sweep(Run &run, std::string const &kind, std::uint64_t max_order,
                  std::uint64_t max_degree, std::size_t jobs, std::string const &filter)
{
  if (kind == "rigidity") {
    RigiditySweep sweep = rigidity_sweep(max_order, max_degree, run.budgets);
    Outcome out{to_json(sweep), {}, sweep.violations ? exit_violation : exit_ok};
    std::ostringstream text;
    text << sweep.pairs_considered << " pairs, " << sweep.pairs_materialized
         << " of equal order materialized, " << sweep.violations << " violations\n";
    for (auto const &e : sweep.materialized)
      if (e.report.n != e.report.m)
        text << "  " << e.g_name << " vs " << e.h_name << ": " << e.report.message << "\n";
    out.text = text.str();
    return out;
  }
  if (kind != "split")
    throw PreconditionError("sweep --kind must be rigidity or split");

  auto instances = split_instance_matrix();
  if (!filter.empty())
    std::erase_if(instances, [&](SplitInstance const &in) { return in.name != filter; });
  std::vector<WreathDecompositionReport> reports(instances.size());
  SplitOptions options;
  options.seed = run.common.seed;
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    auto const &in = instances[i];
    reports[i] = verify_split_sequence(parse_edge_shift(in.matrix), in.n, in.m, in.radius, {},
                                       options, run.budgets);
  });

  Outcome out{document("split_sweep"), {}, exit_ok};
  Json rows = Json::array();
  std::size_t failures = 0;
  std::ostringstream text;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto const &in = instances[i];
    auto const &rep = reports[i];
    Json row;
    row["name"] = in.name;
    row["matrix"] = in.matrix;
    row["n"] = in.n;
    row["m"] = in.m;
    row["radius"] = in.radius;
    row["passed"] = rep.passed();
    row["automorphisms"] = rep.aut_count;
    row["kernel"] = rep.kernel_count;
    row["image"] = rep.image_count;
    row["core"] = rep.core_size;
    Json checks = Json::array();
    for (auto const &c : rep.checks)
      checks.push_back(to_json(c));
    row["checks"] = std::move(checks);
    rows.push_back(std::move(row));
    failures += !rep.passed();
    text << (rep.passed() ? "pass" : "FAIL") << "  " << in.name << " n=" << in.n << " m=" << in.m
         << " r=" << in.radius << "  |A|=" << rep.aut_count << "\n";
  }
  out.doc["instances"] = std::move(rows);
  out.doc["failures"] = failures;
  out.text = text.str();
  if (failures)
    out.code = exit_violation;
  return out;
}

// plumbing -------------------------------------------------------------------

void add_common(CLI::App *sub, Common &c)
{
  sub->add_flag("--json", c.json, "Print the result document as JSON");
  sub->add_flag("--quiet", c.quiet, "Print nothing on stdout");
  sub->add_flag("--verify", c.verify, "Cross-check results along an independent route");
  sub->add_option("--seed", c.seed, "Seed for sampled checks")->capture_default_str();
  sub->add_option("--manifest", c.manifest, "Write the run manifest here instead of stderr");
  sub->add_option("--output", c.output, "Also write the result document to this file");
  sub->add_option("--budget", c.budget, "Budget overrides, e.g. words=1e8,group_order=50000");
}

Json parsed_flags(CLI::App const *sub)
{
  Json flags = Json::object();
  for (CLI::Option const *opt : sub->get_options()) {
    std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "-h")
      continue;
    auto const &results = opt->results();
    if (!results.empty())
      flags[name] = results.size() == 1 ? Json(results[0]) : Json(results);
    else if (!opt->get_default_str().empty())
      flags[name] = opt->get_default_str();
  }
  return flags;
}

void emit_manifest(Common const &c, std::string const &subcommand, Json flags, Json hashes,
                   std::string const &result, int code, double seconds)
{
  Json m = document("run_manifest");
  m["subcommand"] = subcommand.empty() ? Json(nullptr) : Json(subcommand);
  m["flags"] = std::move(flags);
  m["input_hashes"] = std::move(hashes);
  m["library_version"] = library_version;
  m["wall_time_seconds"] = seconds;
  m["result_path"] = c.output.empty() ? (c.quiet ? Json(nullptr) : Json("-")) : Json(c.output);
  m["result_hash"] = result.empty() ? Json(nullptr) : Json(fnv1a_hex(result));
  m["exit_code"] = code;
  if (c.manifest.empty()) {
    std::cerr << m.dump() << "\n";
    return;
  }
  std::ofstream f(c.manifest, std::ios::binary);
  f << m.dump(2) << "\n";
  if (!f)
    std::cerr << "stabdyn: cannot write manifest " << c.manifest << "\n";
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"stabdyn: subshifts of finite type, wreath products and stabilized automorphisms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version);

  Common c;
  std::string input, input_y, group_g, group_h, kind = "rigidity", filter;
  std::uint64_t power = 1, m = 1, n = 1, max_den = 50, max_order = 2000, max_degree = 4;
  std::size_t radius = 0, level = 0, jobs = 1;
  std::optional<std::size_t> inverse_radius, depth;
  std::optional<std::uint64_t> coarsen;
  double tol = 1e-9;
  WreathArgs wa;

  std::function<Outcome(Run &)> action;
  auto sub = [&](char const *name, char const *help) {
    CLI::App *s = app.add_subcommand(name, help);
    add_common(s, c);
    return s;
  };
  auto matrix_arg = [&](CLI::App *s, std::string &target, char const *name) {
    s->add_option(name, target, "Matrix text (\"1 1 / 1 0\") or a file with matrix text or JSON")
      ->required();
  };

  auto *analyze = sub("analyze", "Period, rational eigenvalues, entropy and Smale summary");
  matrix_arg(analyze, input, "input");
  analyze->callback([&] { action = [&](Run &r) { return cmd_analyze(r, input); }; });

  auto *eigs = sub("eigs", "Rational eigenvalues (divisors of the period)");
  matrix_arg(eigs, input, "input");
  eigs->callback([&] { action = [&](Run &r) { return cmd_eigs(r, input); }; });

  auto *partition = sub("partition", "Cyclic partition of size m");
  matrix_arg(partition, input, "input");
  partition->add_option("--m", m, "Partition size; must divide the period")->required();
  partition->add_option("--coarsen", coarsen, "Merge classes modulo p");
  partition->callback([&] { action = [&](Run &r) { return cmd_partition(r, input, m, coarsen); }; });

  auto *autos = sub("autos", "Enumerate automorphisms of sigma^n of bounded radius");
  matrix_arg(autos, input, "input");
  autos->add_option("--power", power, "n in sigma^n")->capture_default_str();
  autos->add_option("--radius", radius, "Radius bound r")->capture_default_str();
  autos->add_option("--inv-radius", inverse_radius, "Inverse radius bound (default 2r)");
  autos->callback([&] {
    action = [&](Run &r) { return cmd_autos(r, input, power, radius, inverse_radius); };
  });

  auto *vw = sub("verify-wreath", "Check the split exact sequence on Aut(sigma^{nm})");
  matrix_arg(vw, input, "input");
  vw->add_option("--n", wa.n, "Transitive factor n")->capture_default_str();
  vw->add_option("--m", wa.m, "Eigenvalue m")->capture_default_str();
  vw->add_option("--radius", wa.radius, "Radius bound r")->capture_default_str();
  vw->add_option("--inv-radius", wa.inverse_radius, "Inverse radius bound (default 2r)");
  vw->add_option("--tuple-limit", wa.tuple_limit, "psi tuples examined")->capture_default_str();
  vw->add_option("--pair-limit", wa.pair_limit, "Sampled pairs")->capture_default_str();
  vw->add_flag("--quotients", wa.quotients, "Also compare Aut/<T> quotients (needs m = period)");
  vw->callback([&] { action = [&](Run &r) { return cmd_verify_wreath(r, input, wa); }; });

  auto *wc = sub("wreath-calc", "Evaluate wreath product expressions from a JSON file");
  wc->add_option("expressions", input, "Calculation document")->required();
  wc->callback([&] { action = [&](Run &r) { return cmd_wreath_calc(r, input); }; });

  auto *rig = sub("rigidity", "Search for an isomorphism G wr Sym(n) -> H wr Sym(m)");
  rig->add_option("--groupG", group_g, "Group file or name (Z9, S3, Z3xZ3, D4, Q8, ...)")
    ->required();
  rig->add_option("--n", n, "Degree for G")->required();
  rig->add_option("--groupH", group_h, "Group file or name")->required();
  rig->add_option("--m", m, "Degree for H")->required();
  rig->callback([&] {
    action = [&](Run &r) { return cmd_rigidity(r, group_g, n, group_h, m); };
  });

  auto *ce = sub("compare-eigs", "Compare rational eigenvalue sets");
  matrix_arg(ce, input, "inputX");
  matrix_arg(ce, input_y, "inputY");
  ce->callback([&] { action = [&](Run &r) { return cmd_compare_eigs(r, input, input_y); }; });

  auto *er = sub("entropy-ratio", "Best rational approximation of h(X)/h(Y)");
  matrix_arg(er, input, "inputX");
  matrix_arg(er, input_y, "inputY");
  er->add_option("--max-den", max_den, "Largest denominator")->capture_default_str();
  er->add_option("--tol", tol, "Residual tolerance (>= 1e-9)")->capture_default_str();
  er->callback([&] {
    action = [&](Run &r) { return cmd_entropy_ratio(r, input, input_y, max_den, tol); };
  });

  auto *e1 = sub("example1", "Generate A_level = A A b_level over {0, 1}");
  e1->add_option("--level", level, "Recursion level")->required();
  e1->add_option("--depth", depth, "Keep only this many symbols");
  e1->callback([&] { action = [&](Run &r) { return cmd_example1(r, level, depth); }; });

  auto *e2 = sub("example2", "Generate A_level = A b_level A over {0, 1, a}");
  e2->add_option("--level", level, "Recursion level")->required();
  e2->add_option("--depth", depth, "Keep only this many symbols");
  e2->callback([&] { action = [&](Run &r) { return cmd_example2(r, level, depth); }; });

  auto *sw = sub("sweep", "Rigidity sweep over small groups, or the split-sequence instances");
  sw->add_option("--kind", kind, "rigidity or split")
    ->check(CLI::IsMember({"rigidity", "split"}))
    ->capture_default_str();
  sw->add_option("--max-order", max_order, "Largest wreath order")->capture_default_str();
  sw->add_option("--max-degree", max_degree, "Largest n and m")->capture_default_str();
  sw->add_option("--jobs", jobs, "Worker threads for split instances")->capture_default_str();
  sw->add_option("--filter", filter, "Only split instances with this name (full2, golden, ...)");
  sw->callback([&] {
    action = [&](Run &r) { return cmd_sweep(r, kind, max_order, max_degree, jobs, filter); };
  });

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int code = app.exit(e) == 0 ? exit_ok : exit_usage;
    if (code != exit_ok)
      emit_manifest(c, "", Json::object(), Json::object(), "", code, 0.0);
    return code;
  }

  CLI::App const *chosen = app.get_subcommands().front();
  auto start = std::chrono::steady_clock::now();
  Run run{c, default_budgets(), Json::object()};
  int code = exit_ok;
  std::string result;
  try {
    if (!c.budget.empty())
      run.budgets.apply_overrides(c.budget);
    Outcome out = action(run);
    code = out.code;
    result = out.doc.dump(2) + "\n";
    if (!c.output.empty()) {
      std::ofstream f(c.output, std::ios::binary);
      f << result;
      if (!f)
        throw Error("cannot write " + c.output);
    }
    if (!c.quiet)
      std::cout << (c.json ? result : out.text) << std::flush;
    if (code == exit_violation)
      std::cerr << "stabdyn: THEOREM-VIOLATION or failed check; see the report\n";
  } catch (BudgetExceeded const &e) {
    std::cerr << "stabdyn: budget exceeded: " << e.what()
              << "\nhint: lower --radius/--power/--level, or raise the cap with "
                 "--budget or STABDYN_BUDGET (e.g. words=1e8,search_nodes=1e9)\n";
    code = exit_usage;
  } catch (Error const &e) {
    std::cerr << "stabdyn: " << e.what() << "\n";
    code = exit_usage;
  } catch (nlohmann::json::exception const &e) {
    std::cerr << "stabdyn: " << e.what() << "\n";
    code = exit_usage;
  }
  double seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit_manifest(c, chosen->get_name(), parsed_flags(chosen), run.input_hashes, result, code,
                seconds);
  return code;
}
