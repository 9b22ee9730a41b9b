#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace learnact {

/// Runtime value of the action DSL and of action-invocation arguments:
/// a string, an integer, a boolean, or a list of values.
class Value {
 public:
  using List = std::vector<Value>;

  Value() : v_(std::string()) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(bool b) : v_(b) {}
  Value(List l) : v_(std::move(l)) {}

  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_list() const { return std::holds_alternative<List>(v_); }

  const std::string& as_string() const { return std::get<std::string>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const List& as_list() const { return std::get<List>(v_); }

  bool operator==(const Value& other) const { return v_ == other.v_; }

  /// Render the value the way an agent would write it in an invocation,
  /// e.g. 'b1' or ['b1','b2'].
  std::string repr() const;

 private:
  std::variant<std::string, std::int64_t, bool, List> v_;
};

/// A parsed `Name(arg, ...)` invocation line.
struct Invocation {
  std::string name;
  std::vector<Value> args;

  std::string repr() const;
};

/// Parses an invocation such as Pickup('b1') or
/// dismantle_stack_until(['b3','b2','b1'], 'b1'). Bare identifiers are
/// accepted as strings. Returns nullopt when the text is not an
/// invocation at all.
std::optional<Invocation> parse_invocation(const std::string& text);

}  // namespace learnact
