#include "learnact/values.hpp"

#include <cctype>

namespace learnact {

namespace {

struct Scanner {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::optional<Value> parse_value(Scanner& sc);

std::optional<Value> parse_list(Scanner& sc) {
  Value::List items;
  if (sc.eat(']')) return Value(std::move(items));
  while (true) {
    auto item = parse_value(sc);
    if (!item) return std::nullopt;
    items.push_back(std::move(*item));
    if (sc.eat(']')) return Value(std::move(items));
    if (!sc.eat(',')) return std::nullopt;
  }
}

std::optional<Value> parse_value(Scanner& sc) {
  sc.skip_ws();
  if (sc.i >= sc.s.size()) return std::nullopt;
  char c = sc.s[sc.i];
  if (c == '[') {
    ++sc.i;
    return parse_list(sc);
  }
  if (c == '\'' || c == '"') {
    char quote = c;
    ++sc.i;
    std::string str;
    while (sc.i < sc.s.size() && sc.s[sc.i] != quote) str += sc.s[sc.i++];
    if (sc.i >= sc.s.size()) return std::nullopt;
    ++sc.i;
    return Value(std::move(str));
  }
  if (std::isdigit(static_cast<unsigned char>(c)) ||
      (c == '-' && sc.i + 1 < sc.s.size() &&
       std::isdigit(static_cast<unsigned char>(sc.s[sc.i + 1])))) {
    size_t start = sc.i;
    if (c == '-') ++sc.i;
    while (sc.i < sc.s.size() && std::isdigit(static_cast<unsigned char>(sc.s[sc.i]))) ++sc.i;
    return Value(static_cast<std::int64_t>(std::stoll(sc.s.substr(start, sc.i - start))));
  }
  if (is_ident_start(c)) {
    size_t start = sc.i;
    while (sc.i < sc.s.size() && is_ident_char(sc.s[sc.i])) ++sc.i;
    std::string word = sc.s.substr(start, sc.i - start);
    if (word == "true") return Value(true);
    if (word == "false") return Value(false);
    // Bare identifiers are accepted as strings: agents frequently write
    // Pickup(b1) instead of Pickup('b1').
    return Value(std::move(word));
  }
  return std::nullopt;
}

}  // namespace

std::string Value::repr() const {
  if (is_string()) return "'" + as_string() + "'";
  if (is_int()) return std::to_string(as_int());
  if (is_bool()) return as_bool() ? "true" : "false";
  std::string out = "[";
  const auto& list = as_list();
  for (size_t i = 0; i < list.size(); ++i) {
    if (i) out += ",";
    out += list[i].repr();
  }
  return out + "]";
}

std::string Invocation::repr() const {
  std::string out = name + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].repr();
  }
  return out + ")";
}

std::optional<Invocation> parse_invocation(const std::string& text) {
  Scanner sc{text};
  sc.skip_ws();
  if (sc.i >= sc.s.size() || !is_ident_start(sc.s[sc.i])) return std::nullopt;
  size_t start = sc.i;
  while (sc.i < sc.s.size() && is_ident_char(sc.s[sc.i])) ++sc.i;
  Invocation inv;
  inv.name = sc.s.substr(start, sc.i - start);
  if (!sc.eat('(')) return std::nullopt;
  if (!sc.eat(')')) {
    while (true) {
      auto value = parse_value(sc);
      if (!value) return std::nullopt;
      inv.args.push_back(std::move(*value));
      if (sc.eat(')')) break;
      if (!sc.eat(',')) return std::nullopt;
    }
  }
  if (!sc.done()) return std::nullopt;
  return inv;
}

}  // namespace learnact
