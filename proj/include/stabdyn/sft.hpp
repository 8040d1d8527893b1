#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stabdyn/budget.hpp"

namespace stabdyn
{

using StateId = std::uint32_t;
using EdgeId = std::uint32_t;

/// A finite path in the graph, read as a word over the edge alphabet.
using Word = std::vector<EdgeId>;

using Matrix = std::vector<std::vector<std::uint64_t>>;

struct Edge
{
  StateId tail;
  StateId head;
};

/**
 * Subshift of finite type presented as the edge shift of a finite directed
 * multigraph. Every state is essential: it has an incoming and an outgoing
 * edge. Edges are numbered in (tail, head, parallel index) order; that
 * numbering is the edge alphabet.
 */
class EdgeShift
{
public:
  /// Removes non-essential states and records each removal in the log.
  static EdgeShift from_matrix(Matrix adjacency,
                               std::vector<std::string> state_names = {});

  std::size_t state_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  Matrix const &adjacency() const { return adjacency_; }
  std::vector<Edge> const &edges() const { return edges_; }
  Edge const &edge(EdgeId e) const { return edges_[e]; }
  std::vector<EdgeId> const &out_edges(StateId s) const { return out_[s]; }
  std::vector<EdgeId> const &in_edges(StateId s) const { return in_[s]; }
  std::vector<std::string> const &state_names() const { return names_; }
  std::vector<std::string> const &normalization_log() const { return log_; }

  /// Printable name of an edge symbol.
  std::string const &label(EdgeId e) const { return labels_[e]; }
  void set_labels(std::vector<std::string> labels);

  /// Labels concatenated; separated by '.' unless every label is one character.
  std::string format_word(std::span<EdgeId const> word) const;
  Word parse_word(std::string_view text) const;

  bool is_admissible(std::span<EdgeId const> word) const;

  /// Canonical "a b / c d" rendering of the adjacency matrix.
  std::string matrix_text() const;

  /// FNV-1a digest of matrix_text(), hex encoded.
  std::string hash() const;

  friend bool operator==(EdgeShift const &a, EdgeShift const &b)
  {
    return a.adjacency_ == b.adjacency_;
  }

private:
  EdgeShift() = default;
  void build_edges();

  Matrix adjacency_;
  std::vector<std::string> names_;
  std::vector<std::string> log_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
  std::vector<std::string> labels_;
};

/// Accepts matrix text ("1 1 / 1 0", rows split by '/' or newlines) or a
/// JSON document {"states": [...], "adjacency": [[...]]}.
EdgeShift parse_edge_shift(std::string_view text);

std::vector<std::vector<StateId>> strongly_connected_components(EdgeShift const &shift);

bool is_irreducible(EdgeShift const &shift);

/// gcd of cycle lengths; throws ReducibleShift unless irreducible.
std::uint64_t period(EdgeShift const &shift);

bool is_mixing(EdgeShift const &shift);

struct EntropyResult
{
  double entropy = 0.0;     ///< log of the Perron eigenvalue
  double perron = 0.0;      ///< spectral radius of the adjacency matrix
  std::uint64_t iterations = 0;
};

/// Topological entropy by power iteration on A + I with Collatz-Wielandt
/// bracketing (relative tolerance 1e-12). For a reducible graph this is the
/// maximum over strongly connected components.
EntropyResult entropy(EdgeShift const &shift, std::uint64_t max_iterations = 1'000'000);

/// Coefficients c_0..c_d of det(xI - A), computed exactly.
std::vector<__int128> characteristic_polynomial(Matrix const &adjacency);

/// Largest real root of the characteristic polynomial (dimension <= 6).
double perron_root_from_charpoly(EdgeShift const &shift);

/// If the Perron eigenvalue is an integer, returns it (checked exactly).
std::uint64_t integer_perron_root(EdgeShift const &shift, double perron);

/// (X, sigma^n) as an edge shift whose edges are the length-n paths.
struct PowerShift
{
  EdgeShift shift;
  std::vector<Word> paths; ///< edge of the power shift -> path in the original
};

PowerShift power_shift(EdgeShift const &shift, std::uint64_t n,
                       Budgets const &budgets = default_budgets());

/// Sub-edge-shift on a set of states; `edge_map` receives new edge -> old edge.
EdgeShift induced_shift(EdgeShift const &shift, std::span<StateId const> states,
                        std::vector<EdgeId> *edge_map = nullptr);

Matrix matrix_power(Matrix const &a, std::uint64_t n);

enum class Labeling
{
  edge,  ///< words are paths of edges
  vertex ///< words are sequences of states joined by edges
};

/// Admissible words of every length 1..max_length in lexicographic order.
struct LanguageTable
{
  std::size_t max_length = 0;
  Labeling labeling = Labeling::edge;
  std::vector<std::vector<Word>> by_length; ///< by_length[l - 1]

  std::vector<Word> const &of_length(std::size_t l) const { return by_length.at(l - 1); }
};

LanguageTable words(EdgeShift const &shift, std::size_t max_length,
                    Labeling labeling = Labeling::edge,
                    Budgets const &budgets = default_budgets());

/// Admissible edge words of exactly one length, lexicographic.
std::vector<Word> words_of_length(EdgeShift const &shift, std::size_t length,
                                  Budgets const &budgets = default_budgets());

} // namespace stabdyn
