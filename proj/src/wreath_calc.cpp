#include "stabdyn/wreath_calc.hpp"

#include <cctype>
#include <charconv>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

class Parser
{
public:
  Parser(WreathCalculator &calc, std::string_view text) : calc_(calc), text_(text) {}

  WreathElement parse()
  {
    WreathElement x = expr();
    skip();
    if (pos_ != text_.size())
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return x;
  }

private:
  FiniteGroup const &G() const { return calc_.group; }

  [[noreturn]] void fail(std::string const &what) const
  {
    throw ParseError("wreath expression \"" + std::string(text_) + "\" at " +
                     std::to_string(pos_) + ": " + what);
  }

  void skip()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c)
  {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    if (!accept(c))
      fail(std::string("expected '") + c + "'");
  }

  std::string identifier()
  {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_)
      fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t integer()
  {
    skip();
    std::int64_t value = 0;
    auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc())
      fail("expected an integer exponent");
    pos_ = static_cast<std::size_t>(end - text_.data());
    return value;
  }

  WreathElement expr()
  {
    WreathElement x = power();
    while (accept('*'))
      x = wr_mul(G(), x, power());
    return x;
  }

  WreathElement power()
  {
    WreathElement x = atom();
    if (!accept('^'))
      return x;
    std::int64_t k = integer();
    WreathElement base = k < 0 ? wr_inv(G(), x) : x;
    WreathElement out = wr_identity(G(), calc_.degree);
    for (std::int64_t i = 0; i < (k < 0 ? -k : k); ++i)
      out = wr_mul(G(), out, base);
    return out;
  }

  void record(WreathElement const &closed, WreathElement const &expanded)
  {
    ++calc_.formula_checks;
    if (closed != expanded)
      ++calc_.formula_mismatches;
  }

  WreathElement atom()
  {
    if (accept('(')) {
      WreathElement x = expr();
      expect(')');
      return x;
    }
    std::string name = identifier();
    if (name == "inv" || name == "conj" || name == "comm") {
      expect('(');
      WreathElement x = expr();
      if (name == "inv") {
        expect(')');
        return wr_inv(G(), x);
      }
      expect(',');
      WreathElement y = expr();
      expect(')');
      auto const &g = G();
      if (name == "conj") {
        WreathElement closed = wr_conj(g, x, y);
        record(closed, wr_mul(g, wr_mul(g, y, x), wr_inv(g, y)));
        return closed;
      }
      WreathElement closed = wr_comm(g, x, y);
      record(closed, wr_mul(g, wr_mul(g, x, y), wr_mul(g, wr_inv(g, x), wr_inv(g, y))));
      return closed;
    }
    if (name == "id")
      return wr_identity(G(), calc_.degree);
    auto it = calc_.names.find(name);
    if (it == calc_.names.end())
      fail("unknown element '" + name + "'");
    return it->second;
  }

  WreathCalculator &calc_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::uint64_t element_order(FiniteGroup const &G, WreathElement const &x, std::uint64_t cap)
{
  WreathElement id = wr_identity(G, x.g.size());
  WreathElement y = x;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    if (y == id)
      return k;
    y = wr_mul(G, y, x);
  }
  return 0;
}

/// Orders above this are reported as null.
constexpr std::uint64_t order_cap = 1'000'000;

std::size_t parse_count(std::string_view digits, std::string_view name)
{
  std::size_t k = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || end != digits.data() + digits.size() || k == 0)
    throw ParseError("unknown group name '" + std::string(name) + "'");
  return k;
}

} // namespace

WreathElement WreathCalculator::evaluate(std::string_view expression)
{
  return Parser(*this, expression).parse();
}

FiniteGroup named_group(std::string_view name, Budgets const &budgets)
{
  for (auto const &g : small_groups())
    if (g.name == name)
      return g.group;
  if (name == "Q8")
    return quaternion_group();
  if (name.size() >= 2) {
    std::string_view digits = name.substr(1);
    switch (name[0]) {
    case 'Z': {
      std::size_t k = parse_count(digits, name);
      if (k > budgets.group_order)
        throw BudgetExceeded("cyclic group order exceeds the group budget");
      return cyclic_group(k);
    }
    case 'S':
      return symmetric_group(parse_count(digits, name), budgets);
    case 'D': {
      std::size_t k = parse_count(digits, name);
      if (k < 3 || 2 * k > budgets.group_order)
        throw ParseError("dihedral groups need 3 <= k <= group_order / 2");
      return dihedral_group(k);
    }
    default:
      break;
    }
  }
  throw ParseError("unknown group name '" + std::string(name) + "'");
}

FiniteGroup resolve_group(Json const &spec, Budgets const &budgets)
{
  if (spec.is_string())
    return named_group(spec.get<std::string>(), budgets);
  if (spec.is_object())
    return group_from_json(spec);
  throw ParseError("a group is a name or a {\"order\", \"table\", \"generators\"} document");
}

Json run_wreath_calc(Json const &input, Budgets const &budgets)
{
  try {
    WreathCalculator calc{resolve_group(input.at("group"), budgets), 1, {}, 0, 0};
    calc.degree = input.at("n").get<std::size_t>();
    if (calc.degree == 0)
      throw ParseError("wreath-calc: n must be positive");
    if (input.contains("elements"))
      for (auto const &[name, value] : input.at("elements").items())
        calc.names.emplace(name, wreath_element_from_json(calc.group, calc.degree, value));
    Json results = Json::array();
    for (auto const &e : input.at("expressions")) {
      auto text = e.get<std::string>();
      WreathElement value = calc.evaluate(text);
      Json row;
      row["expression"] = text;
      row["value"] = to_json(value);
      std::uint64_t order = element_order(calc.group, value, order_cap);
      row["order"] = order ? Json(order) : Json(nullptr);
      results.push_back(std::move(row));
    }

    Json doc = document("wreath_calc");
    doc["group_order"] = calc.group.order();
    doc["n"] = calc.degree;
    doc["results"] = std::move(results);
    doc["formula_checks"] = calc.formula_checks;
    doc["formula_mismatches"] = calc.formula_mismatches;
    return doc;
  } catch (nlohmann::json::exception const &e) {
    throw ParseError(std::string("wreath-calc document: ") + e.what());
  }
}

} // namespace stabdyn
