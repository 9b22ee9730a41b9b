#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "learnact/errors.hpp"

namespace learnact {

/// A (possibly ground) predicate atom, e.g. on(b1,b2) or armempty.
struct Atom {
  std::string pred;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;
  std::string str() const;
};

/// An atom occurring in a precondition, optionally negated.
struct Literal {
  Atom atom;
  bool negated = false;

  auto operator<=>(const Literal&) const = default;
};

struct Parameter {
  std::string name;
  std::string type;

  auto operator<=>(const Parameter&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> param_types;

  int arity() const { return static_cast<int>(param_types.size()); }
};

/// An atomic action schema: typed parameters, a precondition conjunction
/// and add/delete lists over those parameters.
struct ActionSchema {
  std::string name;
  std::vector<Parameter> params;
  std::vector<Literal> pre;
  std::vector<Atom> add;
  std::vector<Atom> del;

  int arity() const { return static_cast<int>(params.size()); }
};

/// A parsed and validated planning domain. Immutable after parse and
/// freely shareable across threads.
struct DomainDefinition {
  std::string name;
  std::vector<std::string> types;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> schemas;

  const ActionSchema* find_schema(std::string_view name) const;
  const PredicateDecl* find_predicate(std::string_view name) const;
};

struct TypedObject {
  std::string name;
  std::string type;

  auto operator<=>(const TypedObject&) const = default;
};

/// Ground state of one problem instance: typed objects, the set of true
/// atoms, and the goal atoms. Atom storage is a sorted set so equality
/// and hashing are structural.
struct WorldState {
  std::vector<TypedObject> objects;
  std::set<Atom> atoms;
  std::set<Atom> goal;

  const TypedObject* find_object(std::string_view name) const;
  bool operator==(const WorldState&) const = default;
};

/// A schema bound to concrete objects. The schema pointer refers into
/// the owning DomainDefinition, which must outlive the action.
struct GroundAction {
  const ActionSchema* schema = nullptr;
  std::vector<std::string> args;

  std::string invocation_text() const;
};

enum class StepErrorKind {
  none,
  unknown_action,
  bad_arity,
  precondition_failed,
  dsl_runtime_error,
};

std::string to_string(StepErrorKind kind);

/// Outcome of trying to bind an action name + arguments to a schema.
struct GroundResult {
  std::optional<GroundAction> action;
  StepErrorKind error = StepErrorKind::none;
  std::string message;

  bool ok() const { return action.has_value(); }
};

/// A named instance: id plus its initial state and goal.
struct Instance {
  std::string id;
  WorldState state;
};

// -- Parsing --------------------------------------------------------------

/// Parses a domain file (grammar in docs/domain_format.md). Throws
/// ParseError with line/column on syntax errors and ValidationError for
/// semantic violations (undeclared predicate, duplicate schema, ...).
DomainDefinition parse_domain(std::string_view text);

/// Parses an instance file (objects / init / goal sections) and
/// validates every atom against the domain declaration.
WorldState parse_instance(std::string_view text, const DomainDefinition& domain);

/// Canonical re-rendering of a domain; parse(pretty_print(d)) is
/// structurally equal to d.
std::string pretty_print(const DomainDefinition& domain);

std::string pretty_print_instance(const WorldState& state);

// -- Semantics ------------------------------------------------------------

/// Binds name+args against the domain. Repeated arguments, arity or
/// type mismatches, and unknown objects are grounding errors, not
/// runtime no-ops.
GroundResult ground(const DomainDefinition& domain, const WorldState& state,
                    const std::string& name, const std::vector<std::string>& args);

/// True iff every positive precondition holds in `state` and every
/// negated one does not.
bool applicable(const WorldState& state, const GroundAction& action);

/// Successor state: atoms' = (atoms \ del) + add. Throws StateError when
/// called with an inapplicable action.
WorldState apply(const WorldState& state, const GroundAction& action);

bool goal_satisfied(const WorldState& state);

}  // namespace learnact
