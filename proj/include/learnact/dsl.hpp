#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "learnact/errors.hpp"

namespace learnact::dsl {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Expression node of the action DSL. The expression language is
/// closed: literals, lists, variables, equality, boolean operators,
/// indexing, and the builtins len/reverse/zip/pairs/slice/holds.
struct Expr {
  enum class Kind {
    string_lit,
    int_lit,
    bool_lit,
    var,
    list,
    eq,
    ne,
    and_,
    or_,
    not_,
    index,
    builtin,
  };

  Kind kind;
  int line = 0;

  std::string text;            // string_lit value, var name, builtin name
  long long int_value = 0;     // int_lit
  bool bool_value = false;     // bool_lit
  std::vector<ExprPtr> items;  // list elements, builtin args, operands

  static ExprPtr make(Kind kind, int line) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = line;
    return e;
  }
};

struct Stmt;
using Block = std::vector<Stmt>;

/// Statement node: an action call, a for-loop with optional pair
/// destructuring, if/else, let, break, or assert.
struct Stmt {
  enum class Kind { call, for_loop, if_else, let, break_, assert_ };

  Kind kind;
  int line = 0;

  // call
  std::string call_name;
  std::vector<ExprPtr> call_args;
  // for_loop
  std::vector<std::string> loop_vars;  // 1 or 2 names
  ExprPtr iterable;
  Block body;
  // if_else
  ExprPtr condition;
  Block then_body;
  Block else_body;
  // let
  std::string let_name;
  ExprPtr let_value;
  // assert
  ExprPtr assert_cond;
  std::string assert_message;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  Block body;
  int line = 0;
};

/// A parsed DSL program: a set of functions over atomic actions. The
/// call graph over defined functions is statically acyclic.
struct Program {
  std::vector<FunctionDef> functions;

  const FunctionDef* find(std::string_view name) const;
};

/// Names of the expression builtins; they are reserved and cannot be
/// used as statement-level calls or function names.
bool is_builtin(std::string_view name);

/// Parses DSL source (grammar in docs/dsl_grammar.md). Comments and
/// blank lines are ignored. Throws ParseError with line/column for
/// syntax errors and ValidationError for duplicate functions, undefined
/// variables, break outside a loop, and recursion cycles.
Program parse_program(std::string_view source);

/// Statement-level call targets that are not defined in the program
/// itself, i.e. the atomic action names the program relies on.
std::vector<std::string> external_calls(const Program& program);

}  // namespace learnact::dsl
