#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "stabdyn/automorphisms.hpp"
#include "stabdyn/finite_group.hpp"
#include "stabdyn/seq_examples.hpp"
#include "stabdyn/spectral.hpp"
#include "stabdyn/stab_verify.hpp"
#include "stabdyn/wreath.hpp"

namespace stabdyn
{

inline constexpr char const *library_version = "0.1.0";
inline constexpr int schema_version = 1;

/// Insertion-ordered, so dumps are byte-stable.
using Json = nlohmann::ordered_json;

/// {"schema_version": 1, "kind": kind}.
Json document(std::string_view kind);

Json to_json(EdgeShift const &shift);
Json to_json(CyclicPartition const &part);
Json to_json(SmaleDecomposition const &smale);

/// {"radius", "period", "rule": [[in-word, out-symbol], ...]} for phase 0;
/// codes with period > 1 also carry "phases", one rule list per phase.
Json to_json(SlidingBlockCode const &code);
Json to_json(AutomorphismSet const &set);
Json to_json(GroupLawReport const &laws);

/// {"order", "table": [[...]], "generators": [...]}.
Json to_json(FiniteGroup const &group);
/// Throws ParseError on malformed documents or tables that are not groups.
FiniteGroup group_from_json(Json const &doc);

/// {"g": [...], "sigma": [...]} with sigma in one-line notation.
Json to_json(WreathElement const &x);
WreathElement wreath_element_from_json(FiniteGroup const &G, std::size_t n, Json const &doc);

Json to_json(NamedCheck const &check);
Json to_json(WreathDecompositionReport const &rep);
Json to_json(QuotientSummary const &q);
Json to_json(QuotientReport const &rep);
Json to_json(RigidityReport const &rep);
Json to_json(RigiditySweep const &sweep);
Json to_json(EigComparison const &cmp);
Json to_json(EntropyRatioReport const &rep);
Json to_json(ResidueReport const &rep);
Json to_json(MarkerReport const &rep);

/// FNV-1a of a byte string, 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

} // namespace stabdyn
