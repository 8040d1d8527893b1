#include "stabdyn/budget.hpp"

#include <cstdlib>
#include <string>

#include "stabdyn/errors.hpp"

namespace stabdyn
{

namespace
{

std::uint64_t parse_count(std::string const &key, std::string const &text)
{
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (std::exception const &) {
    throw ParseError("budget '" + key + "': not a number: " + text);
  }
  if (used != text.size() || value < 1.0)
    throw ParseError("budget '" + key + "': expected a positive count, got " + text);
  return static_cast<std::uint64_t>(value);
}

} // namespace

void Budgets::apply_overrides(std::string_view spec)
{
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string_view::npos)
      end = spec.size();
    std::string item(spec.substr(pos, end - pos));
    pos = end + 1;
    if (item.empty())
      continue;

    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ParseError("budget override must be key=value: " + item);
    std::string key = item.substr(0, eq);
    std::uint64_t value = parse_count(key, item.substr(eq + 1));

    if (key == "words")
      words = value;
    else if (key == "group_order")
      group_order = value;
    else if (key == "search_nodes")
      search_nodes = value;
    else if (key == "factorial_degree")
      factorial_degree = value;
    else
      throw ParseError("unknown budget key: " + key);
  }
}

Budgets Budgets::from_environment()
{
  Budgets budgets;
  if (char const *env = std::getenv("STABDYN_BUDGET"))
    budgets.apply_overrides(env);
  return budgets;
}

Budgets const &default_budgets()
{
  static Budgets const budgets = Budgets::from_environment();
  return budgets;
}

} // namespace stabdyn
