#include "stabdyn/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

Json rule_list(SlidingBlockCode const &code, std::size_t phase)
{
  auto const &shift = code.shift();
  auto const &windows = code.windows();
  Json out = Json::array();
  for (std::size_t w = 0; w < windows.size(); ++w)
    out.push_back({shift.format_word(windows.word(w)), shift.label(code.output(phase, w))});
  return out;
}

/// long double values go out as double; non-finite ones as null.
Json number(long double x)
{
  double d = static_cast<double>(x);
  return std::isfinite(d) ? Json(d) : Json(nullptr);
}

template <class T>
Json optional_value(std::optional<T> const &x)
{
  return x ? Json(*x) : Json(nullptr);
}

} // namespace

std::string fnv1a_hex(std::string_view bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json document(std::string_view kind)
{
  Json doc;
  doc["schema_version"] = schema_version;
  doc["kind"] = std::string(kind);
  return doc;
}

Json to_json(EdgeShift const &shift)
{
  Json doc;
  doc["states"] = shift.state_names();
  doc["adjacency"] = shift.adjacency();
  doc["hash"] = shift.hash();
  return doc;
}

Json to_json(CyclicPartition const &part)
{
  Json doc;
  doc["parent_hash"] = part.parent_hash;
  doc["size"] = part.size;
  doc["classes"] = part.classes;
  doc["class_of"] = part.class_of;
  return doc;
}

Json to_json(SmaleDecomposition const &smale)
{
  Json doc;
  doc["parent_hash"] = smale.partition.parent_hash;
  doc["period"] = smale.period;
  doc["partition"] = to_json(smale.partition);
  doc["component"] = to_json(smale.component_shift);
  doc["component_states"] = smale.component_states;
  doc["component_edges"] = smale.component_shift.edge_count();
  return doc;
}

Json to_json(SlidingBlockCode const &code)
{
  Json doc;
  doc["radius"] = code.radius();
  doc["period"] = code.period();
  doc["rule"] = rule_list(code, 0);
  if (code.period() > 1) {
    Json phases = Json::array();
    for (std::size_t p = 0; p < code.period(); ++p)
      phases.push_back(rule_list(code, p));
    doc["phases"] = std::move(phases);
  }
  return doc;
}

Json to_json(GroupLawReport const &laws)
{
  Json doc;
  doc["passed"] = laws.passed();
  doc["identity_present"] = laws.identity_present;
  doc["inverse_failures"] = laws.inverse_failures;
  doc["inverse_missing"] = laws.inverse_missing;
  doc["closure_failures"] = laws.closure_failures;
  doc["closure_missing"] = laws.closure_missing;
  doc["products_checked"] = laws.products_checked;
  return doc;
}

Json to_json(AutomorphismSet const &set)
{
  Json doc;
  doc["sft_hash"] = set.context->shift().hash();
  doc["power"] = set.power;
  doc["radius"] = set.radius;
  doc["inverse_radius"] = set.inverse_radius;
  doc["count"] = set.size();
  Json elements = Json::array();
  for (auto const &code : set.elements)
    elements.push_back(to_json(code));
  doc["elements"] = std::move(elements);
  return doc;
}

Json to_json(FiniteGroup const &group)
{
  Json doc;
  std::size_t n = group.order();
  doc["order"] = n;
  Json table = Json::array();
  for (std::size_t a = 0; a < n; ++a) {
    Json row = Json::array();
    for (std::size_t b = 0; b < n; ++b)
      row.push_back(group.mul(static_cast<Element>(a), static_cast<Element>(b)));
    table.push_back(std::move(row));
  }
  doc["table"] = std::move(table);
  doc["generators"] = group.generators();
  return doc;
}

FiniteGroup group_from_json(Json const &doc)
{
  try {
    auto order = doc.at("order").get<std::size_t>();
    auto rows = doc.at("table").get<std::vector<std::vector<Element>>>();
    if (rows.size() != order)
      throw ParseError("group document: table has " + std::to_string(rows.size()) +
                       " rows, order is " + std::to_string(order));
    std::vector<Element> table;
    table.reserve(order * order);
    for (auto const &row : rows) {
      if (row.size() != order)
        throw ParseError("group document: table rows must have length " + std::to_string(order));
      table.insert(table.end(), row.begin(), row.end());
    }
    std::vector<Element> generators;
    if (doc.contains("generators"))
      generators = doc.at("generators").get<std::vector<Element>>();
    else
      for (std::size_t i = 0; i < order; ++i)
        generators.push_back(static_cast<Element>(i));
    return FiniteGroup(std::move(table), order, std::move(generators));
  } catch (nlohmann::json::exception const &e) {
    throw ParseError(std::string("group document: ") + e.what());
  } catch (PreconditionError const &e) {
    throw ParseError(std::string("group document: ") + e.what());
  }
}

Json to_json(WreathElement const &x)
{
  Json doc;
  doc["g"] = x.g;
  doc["sigma"] = x.sigma.images();
  return doc;
}

WreathElement wreath_element_from_json(FiniteGroup const &G, std::size_t n, Json const &doc)
{
  try {
    auto g = doc.at("g").get<std::vector<Element>>();
    auto images = doc.at("sigma").get<std::vector<std::uint32_t>>();
    if (g.size() != n || images.size() != n)
      throw ParseError("wreath element: g and sigma must have length " + std::to_string(n));
    for (Element e : g)
      if (e >= G.order())
        throw ParseError("wreath element: base entry out of range");
    return {std::move(g), Permutation(std::move(images))};
  } catch (nlohmann::json::exception const &e) {
    throw ParseError(std::string("wreath element: ") + e.what());
  } catch (PreconditionError const &e) {
    throw ParseError(std::string("wreath element: ") + e.what());
  }
}

Json to_json(NamedCheck const &check)
{
  Json doc;
  doc["name"] = check.name;
  doc["passed"] = check.passed;
  doc["cases"] = check.cases;
  doc["counterexample"] = check.counterexample;
  return doc;
}

namespace
{

Json checks_json(std::vector<NamedCheck> const &checks)
{
  Json out = Json::array();
  for (auto const &c : checks)
    out.push_back(to_json(c));
  return out;
}

} // namespace

Json to_json(WreathDecompositionReport const &rep)
{
  Json doc = document("wreath_decomposition");
  doc["passed"] = rep.passed();
  Json instance;
  instance["sft_hash"] = rep.sft_hash;
  instance["matrix"] = rep.matrix;
  instance["n"] = rep.n;
  instance["m"] = rep.m;
  instance["radius"] = rep.radius;
  instance["inverse_radius"] = rep.inverse_radius;
  doc["instance"] = std::move(instance);
  Json counts;
  counts["automorphisms"] = rep.aut_count;
  counts["component_automorphisms"] = rep.component_aut_count;
  counts["kernel"] = rep.kernel_count;
  counts["image"] = rep.image_count;
  counts["core"] = rep.core_size;
  counts["core_kernel"] = rep.core_kernel;
  counts["core_image"] = rep.core_image;
  counts["rotating"] = rep.rotating_elements;
  counts["tuples_checked"] = rep.tuples_checked;
  counts["tuples_exhaustive"] = rep.tuples_exhaustive;
  doc["counts"] = std::move(counts);
  doc["checks"] = checks_json(rep.checks);
  doc["pi_table"] = rep.pi_table;
  doc["rho_table"] = rep.rho_table;
  Json psi = Json::array();
  for (auto const &[index, components] : rep.psi_table)
    psi.push_back({{"element", index}, {"components", components}});
  doc["psi_table"] = std::move(psi);
  doc["notes"] = rep.notes;
  return doc;
}

Json to_json(QuotientSummary const &q)
{
  Json doc;
  doc["enumerated"] = q.enumerated;
  doc["order"] = q.order;
  doc["representatives"] = q.representatives;
  doc["group"] = q.group ? to_json(*q.group) : Json(nullptr);
  return doc;
}

Json to_json(QuotientReport const &rep)
{
  Json doc = document("quotient_isomorphisms");
  doc["passed"] = rep.passed();
  doc["inconclusive"] = rep.inconclusive;
  doc["sft_hash"] = rep.sft_hash;
  doc["m"] = rep.m;
  doc["radius"] = rep.radius;
  doc["inverse_radius"] = rep.inverse_radius;
  doc["mod_shift"] = to_json(rep.mod_shift);
  doc["mod_shift_power"] = to_json(rep.mod_shift_power);
  doc["component"] = to_json(rep.component);
  doc["checks"] = checks_json(rep.checks);
  doc["notes"] = rep.notes;
  return doc;
}

Json to_json(RigidityReport const &rep)
{
  Json doc = document("rigidity");
  doc["n"] = rep.n;
  doc["m"] = rep.m;
  doc["order_g"] = rep.order_g;
  doc["order_h"] = rep.order_h;
  doc["wreath_order_g"] = rep.wreath_order_g;
  doc["wreath_order_h"] = rep.wreath_order_h;
  doc["hypotheses_hold"] = rep.hypotheses_hold;
  doc["wreaths_isomorphic"] = rep.wreaths_isomorphic;
  doc["bases_isomorphic"] = optional_value(rep.bases_isomorphic);
  doc["violation"] = rep.violation;
  doc["message"] = rep.message;
  return doc;
}

Json to_json(RigiditySweep const &sweep)
{
  Json doc = document("rigidity_sweep");
  doc["max_order"] = sweep.max_order;
  doc["pairs_considered"] = sweep.pairs_considered;
  doc["pairs_materialized"] = sweep.pairs_materialized;
  doc["violations"] = sweep.violations;
  Json entries = Json::array();
  for (auto const &e : sweep.materialized) {
    Json entry = to_json(e.report);
    entry.erase("schema_version");
    entry.erase("kind");
    entry["g"] = e.g_name;
    entry["h"] = e.h_name;
    entries.push_back(std::move(entry));
  }
  doc["materialized"] = std::move(entries);
  return doc;
}

Json to_json(EigComparison const &cmp)
{
  Json doc = document("eig_comparison");
  doc["period_x"] = cmp.period_x;
  doc["period_y"] = cmp.period_y;
  doc["eig_x"] = cmp.eig_x;
  doc["eig_y"] = cmp.eig_y;
  doc["equal"] = cmp.equal;
  return doc;
}

Json to_json(EntropyRatioReport const &rep)
{
  Json doc = document("entropy_ratio");
  doc["verdict"] = rep.verdict();
  doc["h_x"] = number(rep.h_x);
  doc["h_y"] = number(rep.h_y);
  doc["ratio"] = number(rep.ratio);
  doc["p"] = rep.p;
  doc["q"] = rep.q;
  doc["residual"] = number(rep.residual);
  doc["max_denominator"] = rep.max_denominator;
  doc["tolerance"] = rep.tolerance;
  Json convergents = Json::array();
  for (auto const &[p, q] : rep.convergents)
    convergents.push_back({p, q});
  doc["convergents"] = std::move(convergents);
  auto component = [](ComponentEntropyCheck const &c) {
    Json out;
    out["period"] = c.period;
    out["component_entropy"] = c.component_entropy;
    out["scaled"] = c.scaled;
    out["agrees"] = c.agrees;
    return out;
  };
  doc["component_x"] = component(rep.component_x);
  doc["component_y"] = component(rep.component_y);
  doc["exact_confirmation"] = optional_value(rep.exact_confirmation);
  doc["perron_x"] = rep.perron_x;
  doc["perron_y"] = rep.perron_y;
  return doc;
}

Json to_json(ResidueReport const &rep)
{
  Json doc = document("marker_residues");
  doc["passed"] = rep.passed;
  doc["marker_length"] = rep.marker.size();
  doc["modulus"] = rep.modulus;
  doc["depth"] = rep.depth;
  doc["occurrence_count"] = rep.occurrences.size();
  doc["occurrences"] = rep.occurrences;
  doc["residue"] = optional_value(rep.residue);
  doc["expected"] = optional_value(rep.expected);
  return doc;
}

Json to_json(MarkerReport const &rep)
{
  Json doc = document("example2_markers");
  doc["passed"] = rep.passed;
  Json residues = to_json(rep.residues);
  residues.erase("schema_version");
  residues.erase("kind");
  doc["residues"] = std::move(residues);
  doc["alpha_count"] = rep.alpha_count;
  doc["alpha_uncovered"] = rep.alpha_uncovered;
  doc["first_uncovered"] = optional_value(rep.first_uncovered);
  doc["matches_catalog"] = rep.matches_catalog;
  return doc;
}

} // namespace stabdyn
