#include "stabdyn/sft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

std::string default_label(std::size_t index, std::size_t count)
{
  static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  if (count <= 36)
    return std::string(1, digits[index]);
  return "e" + std::to_string(index);
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b)
{
  std::uint64_t sum = a + b;
  if (sum < a)
    throw BudgetExceeded("path count overflows 64 bits");
  return sum;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
  if (a != 0 && b > UINT64_MAX / a)
    throw BudgetExceeded("path count overflows 64 bits");
  return a * b;
}

} // namespace

EdgeShift EdgeShift::from_matrix(Matrix adjacency, std::vector<std::string> state_names)
{
  std::size_t const n = adjacency.size();
  if (n == 0)
    throw ParseError("adjacency matrix is empty");
  for (auto const &row : adjacency) {
    if (row.size() != n)
      throw ParseError("adjacency matrix is not square");
  }
  if (state_names.empty()) {
    for (std::size_t i = 0; i < n; ++i)
      state_names.push_back(std::to_string(i));
  } else if (state_names.size() != n) {
    throw ParseError("state list and adjacency dimension differ");
  }

  std::vector<bool> alive(n, true);
  std::vector<std::string> log;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (!alive[s])
        continue;
      bool has_out = false, has_in = false;
      for (std::size_t t = 0; t < n; ++t) {
        if (!alive[t])
          continue;
        has_out |= adjacency[s][t] > 0;
        has_in |= adjacency[t][s] > 0;
      }
      if (!has_out || !has_in) {
        alive[s] = false;
        changed = true;
        log.push_back("removed state " + state_names[s] +
                      (has_out ? ": no incoming edge" : ": no outgoing edge"));
      }
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < n; ++s) {
    if (alive[s])
      kept.push_back(s);
  }
  if (kept.empty())
    throw ParseError("graph is empty after normalization");

  EdgeShift shift;
  shift.adjacency_.assign(kept.size(), std::vector<std::uint64_t>(kept.size(), 0));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    shift.names_.push_back(state_names[kept[i]]);
    for (std::size_t j = 0; j < kept.size(); ++j)
      shift.adjacency_[i][j] = adjacency[kept[i]][kept[j]];
  }
  shift.log_ = std::move(log);
  shift.build_edges();
  return shift;
}

void EdgeShift::build_edges()
{
  std::size_t const n = adjacency_.size();
  std::uint64_t total = 0;
  for (auto const &row : adjacency_) {
    for (auto a : row)
      total = checked_add(total, a);
  }
  if (total > default_budgets().words)
    throw BudgetExceeded("edge alphabet of size " + std::to_string(total) + " exceeds word budget");

  edges_.clear();
  out_.assign(n, {});
  in_.assign(n, {});
  for (StateId i = 0; i < n; ++i) {
    for (StateId j = 0; j < n; ++j) {
      for (std::uint64_t k = 0; k < adjacency_[i][j]; ++k) {
        auto id = static_cast<EdgeId>(edges_.size());
        edges_.push_back({i, j});
        out_[i].push_back(id);
        in_[j].push_back(id);
      }
    }
  }
  labels_.clear();
  for (std::size_t e = 0; e < edges_.size(); ++e)
    labels_.push_back(default_label(e, edges_.size()));
}

void EdgeShift::set_labels(std::vector<std::string> labels)
{
  if (labels.size() != edges_.size())
    throw PreconditionError("label count differs from edge count");
  labels_ = std::move(labels);
}

std::string EdgeShift::format_word(std::span<EdgeId const> word) const
{
  bool single = std::all_of(labels_.begin(), labels_.end(),
                            [](std::string const &l) { return l.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!single && i > 0)
      out += '.';
    out += labels_.at(word[i]);
  }
  return out;
}

Word EdgeShift::parse_word(std::string_view text) const
{
  bool single = std::all_of(labels_.begin(), labels_.end(),
                            [](std::string const &l) { return l.size() == 1; });
  auto lookup = [&](std::string_view token) {
    for (EdgeId e = 0; e < labels_.size(); ++e) {
      if (labels_[e] == token)
        return e;
    }
    throw ParseError("unknown edge label '" + std::string(token) + "'");
  };

  Word word;
  if (single) {
    for (char c : text)
      word.push_back(lookup(std::string_view(&c, 1)));
  } else {
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
      auto end = text.find('.', pos);
      if (end == std::string_view::npos)
        end = text.size();
      word.push_back(lookup(text.substr(pos, end - pos)));
      pos = end + 1;
    }
  }
  return word;
}

bool EdgeShift::is_admissible(std::span<EdgeId const> word) const
{
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] >= edges_.size())
      return false;
    if (i > 0 && edges_[word[i - 1]].head != edges_[word[i]].tail)
      return false;
  }
  return true;
}

std::string EdgeShift::matrix_text() const
{
  std::ostringstream os;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    if (i > 0)
      os << " / ";
    for (std::size_t j = 0; j < adjacency_[i].size(); ++j) {
      if (j > 0)
        os << ' ';
      os << adjacency_[i][j];
    }
  }
  return os.str();
}

std::string EdgeShift::hash() const
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : matrix_text()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EdgeShift parse_edge_shift(std::string_view text)
{
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    throw ParseError("empty input");

  if (text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (nlohmann::json::exception const &e) {
      throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("adjacency") || !doc["adjacency"].is_array())
      throw ParseError("document has no \"adjacency\" array");
    Matrix m;
    for (auto const &row : doc["adjacency"]) {
      if (!row.is_array())
        throw ParseError("adjacency rows must be arrays");
      std::vector<std::uint64_t> r;
      for (auto const &v : row) {
        if (!v.is_number_integer())
          throw ParseError("adjacency entries must be integers");
        if (v.get<long long>() < 0)
          throw ParseError("negative adjacency entry");
        r.push_back(v.get<std::uint64_t>());
      }
      m.push_back(std::move(r));
    }
    std::vector<std::string> names;
    if (doc.contains("states")) {
      for (auto const &s : doc["states"])
        names.push_back(s.is_string() ? s.get<std::string>() : s.dump());
    }
    return EdgeShift::from_matrix(std::move(m), std::move(names));
  }

  Matrix m;
  std::string row_text;
  auto flush = [&] {
    std::istringstream is(row_text);
    std::vector<std::uint64_t> row;
    std::string token;
    while (is >> token) {
      if (token.front() == '-')
        throw ParseError("negative adjacency entry: " + token);
      if (token.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("not a nonnegative integer: " + token);
      row.push_back(std::stoull(token));
    }
    if (!row.empty())
      m.push_back(std::move(row));
    row_text.clear();
  };
  for (char c : text) {
    if (c == '/' || c == '\n' || c == ';')
      flush();
    else
      row_text += c;
  }
  flush();
  return EdgeShift::from_matrix(std::move(m));
}

std::vector<std::vector<StateId>> strongly_connected_components(EdgeShift const &shift)
{
  std::size_t const n = shift.state_count();
  auto const &a = shift.adjacency();

  // Kosaraju: finishing order on A, then sweep on the transpose.
  std::vector<bool> seen(n, false);
  std::vector<StateId> order;
  std::function<void(StateId)> visit = [&](StateId s) {
    seen[s] = true;
    for (StateId t = 0; t < n; ++t) {
      if (a[s][t] && !seen[t])
        visit(t);
    }
    order.push_back(s);
  };
  for (StateId s = 0; s < n; ++s) {
    if (!seen[s])
      visit(s);
  }

  std::vector<int> comp(n, -1);
  std::vector<std::vector<StateId>> comps;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0)
      continue;
    comps.emplace_back();
    std::vector<StateId> stack{*it};
    comp[*it] = static_cast<int>(comps.size() - 1);
    while (!stack.empty()) {
      StateId s = stack.back();
      stack.pop_back();
      comps.back().push_back(s);
      for (StateId t = 0; t < n; ++t) {
        if (a[t][s] && comp[t] < 0) {
          comp[t] = comp[s];
          stack.push_back(t);
        }
      }
    }
  }
  for (auto &c : comps)
    std::sort(c.begin(), c.end());
  std::sort(comps.begin(), comps.end());
  return comps;
}

bool is_irreducible(EdgeShift const &shift)
{
  return strongly_connected_components(shift).size() == 1;
}

std::uint64_t period(EdgeShift const &shift)
{
  if (!is_irreducible(shift))
    throw ReducibleShift("period requires an irreducible edge shift");

  // gcd of level(u) + 1 - level(v) over all edges u -> v.
  std::size_t const n = shift.state_count();
  std::vector<std::int64_t> level(n, -1);
  std::queue<StateId> queue;
  level[0] = 0;
  queue.push(0);
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop();
    for (EdgeId e : shift.out_edges(s)) {
      StateId t = shift.edge(e).head;
      if (level[t] < 0) {
        level[t] = level[s] + 1;
        queue.push(t);
      }
    }
  }
  std::int64_t g = 0;
  for (auto const &e : shift.edges())
    g = std::gcd(g, level[e.tail] + 1 - level[e.head]);
  return static_cast<std::uint64_t>(g);
}

bool is_mixing(EdgeShift const &shift)
{
  return is_irreducible(shift) && period(shift) == 1;
}

namespace
{

EntropyResult spectral_radius_irreducible(Matrix const &a, std::uint64_t max_iterations)
{
  std::size_t const n = a.size();
  std::vector<double> v(n, 1.0), w(n);
  for (std::uint64_t it = 1; it <= max_iterations; ++it) {
    double lo = INFINITY, hi = 0.0, top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[i];
      for (std::size_t j = 0; j < n; ++j)
        s += static_cast<double>(a[i][j]) * v[j];
      w[i] = s;
      lo = std::min(lo, s / v[i]);
      hi = std::max(hi, s / v[i]);
      top = std::max(top, s);
    }
    for (std::size_t i = 0; i < n; ++i)
      v[i] = w[i] / top;
    if (hi - lo <= 1e-12 * hi) {
      double lambda = 0.5 * (lo + hi) - 1.0;
      return {std::log(lambda), lambda, it};
    }
  }
  throw ConvergenceError("power iteration did not converge");
}

} // namespace

EntropyResult entropy(EdgeShift const &shift, std::uint64_t max_iterations)
{
  EntropyResult best{-INFINITY, 0.0, 0};
  for (auto const &comp : strongly_connected_components(shift)) {
    Matrix sub(comp.size(), std::vector<std::uint64_t>(comp.size()));
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (std::size_t j = 0; j < comp.size(); ++j)
        sub[i][j] = shift.adjacency()[comp[i]][comp[j]];
    }
    bool has_edge = false;
    for (auto const &row : sub) {
      for (auto x : row)
        has_edge |= x > 0;
    }
    if (!has_edge)
      continue; // transient singleton without a loop
    auto r = spectral_radius_irreducible(sub, max_iterations);
    best.iterations += r.iterations;
    if (r.perron > best.perron) {
      best.perron = r.perron;
      best.entropy = r.entropy;
    }
  }
  return best;
}

std::vector<__int128> characteristic_polynomial(Matrix const &adjacency)
{
  // Faddeev-LeVerrier: every division below is exact.
  std::size_t const n = adjacency.size();
  using Big = __int128;
  std::vector<std::vector<Big>> a(n, std::vector<Big>(n)), m(n, std::vector<Big>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = static_cast<Big>(adjacency[i][j]);
  }
  std::vector<Big> c(n + 1, 0);
  c[n] = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::vector<Big>> next(n, std::vector<Big>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Big s = 0;
        for (std::size_t l = 0; l < n; ++l)
          s += a[i][l] * m[l][j];
        next[i][j] = s;
      }
      next[i][i] += c[n - k + 1];
    }
    m = std::move(next);
    Big trace = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l)
        trace += a[i][l] * m[l][i];
    }
    c[n - k] = -trace / static_cast<Big>(k);
  }
  return c;
}

namespace
{

long double eval_poly(std::vector<__int128> const &c, long double x)
{
  long double acc = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it)
    acc = acc * x + static_cast<long double>(*it);
  return acc;
}

} // namespace

double perron_root_from_charpoly(EdgeShift const &shift)
{
  if (shift.state_count() > 6)
    throw PreconditionError("characteristic polynomial cross-check limited to 6 states");
  auto c = characteristic_polynomial(shift.adjacency());

  long double hi = 0.0L;
  for (auto const &row : shift.adjacency()) {
    long double s = 0.0L;
    for (auto x : row)
      s += static_cast<long double>(x);
    hi = std::max(hi, s);
  }
  hi += 1.0L;

  // The polynomial is monic, so it is positive above the largest real root.
  constexpr int steps = 1 << 14;
  long double step = hi / steps;
  long double upper = hi, lower = hi;
  for (int i = steps; i >= 0; --i) {
    long double x = step * i;
    if (eval_poly(c, x) <= 0.0L) {
      lower = x;
      upper = std::min(hi, x + step);
      break;
    }
  }
  for (int it = 0; it < 200; ++it) {
    long double mid = 0.5L * (lower + upper);
    if (eval_poly(c, mid) <= 0.0L)
      lower = mid;
    else
      upper = mid;
  }
  return static_cast<double>(0.5L * (lower + upper));
}

std::uint64_t integer_perron_root(EdgeShift const &shift, double perron)
{
  double rounded = std::round(perron);
  if (std::abs(rounded - perron) > 1e-9 || rounded < 1.0)
    return 0;
  auto c = characteristic_polynomial(shift.adjacency());
  __int128 x = static_cast<__int128>(rounded), acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it)
    acc = acc * x + *it;
  return acc == 0 ? static_cast<std::uint64_t>(rounded) : 0;
}

Matrix matrix_power(Matrix const &a, std::uint64_t n)
{
  std::size_t const d = a.size();
  Matrix result(d, std::vector<std::uint64_t>(d, 0));
  for (std::size_t i = 0; i < d; ++i)
    result[i][i] = 1;
  for (std::uint64_t k = 0; k < n; ++k) {
    Matrix next(d, std::vector<std::uint64_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t l = 0; l < d; ++l) {
        if (!result[i][l])
          continue;
        for (std::size_t j = 0; j < d; ++j)
          next[i][j] = checked_add(next[i][j], checked_mul(result[i][l], a[l][j]));
      }
    }
    result = std::move(next);
  }
  return result;
}

PowerShift power_shift(EdgeShift const &shift, std::uint64_t n, Budgets const &budgets)
{
  if (n == 0)
    throw PreconditionError("power_shift requires n >= 1");
  Matrix an = matrix_power(shift.adjacency(), n);
  std::uint64_t total = 0;
  for (auto const &row : an) {
    for (auto x : row)
      total = checked_add(total, x);
  }
  if (total > budgets.words)
    throw BudgetExceeded("power shift has " + std::to_string(total) + " edges, over budget");

  // Paths grouped by (tail, head) in lexicographic order, matching the edge
  // numbering EdgeShift assigns to A^n.
  std::size_t const d = shift.state_count();
  std::vector<std::vector<std::vector<Word>>> grouped(d, std::vector<std::vector<Word>>(d));
  Word path;
  std::function<void(StateId, StateId)> extend = [&](StateId start, StateId at) {
    if (path.size() == n) {
      grouped[start][at].push_back(path);
      return;
    }
    for (EdgeId e : shift.out_edges(at)) {
      path.push_back(e);
      extend(start, shift.edge(e).head);
      path.pop_back();
    }
  };
  for (StateId s = 0; s < d; ++s)
    extend(s, s);

  PowerShift result{EdgeShift::from_matrix(an, shift.state_names()), {}};
  for (StateId i = 0; i < d; ++i) {
    for (StateId j = 0; j < d; ++j) {
      for (auto &p : grouped[i][j])
        result.paths.push_back(std::move(p));
    }
  }
  if (result.shift.state_count() == d) {
    std::vector<std::string> labels;
    for (auto const &p : result.paths)
      labels.push_back(shift.format_word(p));
    bool distinct_single = std::all_of(labels.begin(), labels.end(),
                                       [](auto const &l) { return l.size() == 1; });
    if (!distinct_single)
      result.shift.set_labels(std::move(labels));
  }
  return result;
}

EdgeShift induced_shift(EdgeShift const &shift, std::span<StateId const> states,
                        std::vector<EdgeId> *edge_map)
{
  Matrix m(states.size(), std::vector<std::uint64_t>(states.size()));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < states.size(); ++i) {
    names.push_back(shift.state_names()[states[i]]);
    for (std::size_t j = 0; j < states.size(); ++j)
      m[i][j] = shift.adjacency()[states[i]][states[j]];
  }
  EdgeShift sub = EdgeShift::from_matrix(std::move(m), std::move(names));
  if (sub.state_count() != states.size())
    throw PreconditionError("induced graph has non-essential states");
  if (edge_map) {
    edge_map->clear();
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (std::size_t j = 0; j < states.size(); ++j) {
        std::vector<EdgeId> parallel;
        for (EdgeId e : shift.out_edges(states[i])) {
          if (shift.edge(e).head == states[j])
            parallel.push_back(e);
        }
        edge_map->insert(edge_map->end(), parallel.begin(), parallel.end());
      }
    }
  }
  return sub;
}

std::vector<Word> words_of_length(EdgeShift const &shift, std::size_t length,
                                  Budgets const &budgets)
{
  if (length == 0)
    return {Word{}};
  Matrix ap = matrix_power(shift.adjacency(), length);
  std::uint64_t total = 0;
  for (auto const &row : ap) {
    for (auto x : row)
      total = checked_add(total, x);
  }
  if (total > budgets.words)
    throw BudgetExceeded(std::to_string(total) + " words of length " + std::to_string(length) +
                         " exceed the word budget of " + std::to_string(budgets.words));

  std::vector<Word> out;
  out.reserve(total);
  Word w;
  std::function<void()> extend = [&] {
    if (w.size() == length) {
      out.push_back(w);
      return;
    }
    auto const &next = w.empty() ? std::vector<EdgeId>{} : shift.out_edges(shift.edge(w.back()).head);
    for (EdgeId e : next) {
      w.push_back(e);
      extend();
      w.pop_back();
    }
  };
  for (EdgeId e = 0; e < shift.edge_count(); ++e) {
    w.assign(1, e);
    extend();
  }
  return out;
}

LanguageTable words(EdgeShift const &shift, std::size_t max_length, Labeling labeling,
                    Budgets const &budgets)
{
  if (max_length == 0)
    throw PreconditionError("words requires L >= 1");
  LanguageTable table;
  table.max_length = max_length;
  table.labeling = labeling;

  if (labeling == Labeling::edge) {
    for (std::size_t l = 1; l <= max_length; ++l)
      table.by_length.push_back(words_of_length(shift, l, budgets));
    return table;
  }

  // Vertex words of length l are paths with l - 1 edges, one per 0/1 entry.
  std::size_t const n = shift.state_count();
  Matrix support(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      support[i][j] = shift.adjacency()[i][j] ? 1 : 0;
  }
  std::vector<Word> current;
  for (StateId s = 0; s < n; ++s)
    current.push_back({s});
  table.by_length.push_back(current);
  for (std::size_t l = 2; l <= max_length; ++l) {
    std::vector<Word> next;
    for (auto const &w : current) {
      for (StateId t = 0; t < n; ++t) {
        if (support[w.back()][t]) {
          if (next.size() >= budgets.words)
            throw BudgetExceeded("vertex words exceed the word budget");
          next.push_back(w);
          next.back().push_back(t);
        }
      }
    }
    table.by_length.push_back(next);
    current = std::move(next);
  }
  return table;
}

} // namespace stabdyn
