#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "learnact/dsl.hpp"
#include "learnact/dsl_interp.hpp"

using namespace learnact;

namespace {

const DomainDefinition& blockworld() { return testkit::blockworld_bundle().domain; }

dsl::Program learned_program(bool buggy = false) {
  return dsl::parse_program(testkit::dismantle_source() + "\n\n" +
                            (buggy ? testkit::construct_source_buggy()
                                   : testkit::construct_source_fixed()));
}

std::vector<Value> args_list(std::vector<std::string> names) {
  Value::List list;
  for (auto& n : names) list.push_back(Value(n));
  return {Value(list)};
}

}  // namespace

TEST_CASE("construct_stack parses to one function with one loop of two calls") {
  dsl::Program p = dsl::parse_program(testkit::construct_source_fixed());
  REQUIRE(p.functions.size() == 1);
  const dsl::FunctionDef& fn = p.functions[0];
  CHECK(fn.name == "construct_stack");
  CHECK(fn.params == std::vector<std::string>{"block_list"});
  REQUIRE(fn.body.size() == 1);
  REQUIRE(fn.body[0].kind == dsl::Stmt::Kind::for_loop);
  CHECK(fn.body[0].loop_vars.size() == 2);
  const dsl::Block& body = fn.body[0].body;
  REQUIRE(body.size() == 2);
  CHECK(body[0].kind == dsl::Stmt::Kind::call);
  CHECK(body[0].call_name == "Pickup");
  CHECK(body[1].call_name == "Stack");
}

TEST_CASE("empty source parses to an empty program") {
  CHECK(dsl::parse_program("").functions.empty());
  CHECK(dsl::parse_program("# just a comment\n\n").functions.empty());
}

TEST_CASE("static validation rejects bad programs") {
  CHECK_THROWS_AS(dsl::parse_program("def f():\n    f()\n"), ValidationError);  // recursion
  CHECK_THROWS_AS(dsl::parse_program("def f(a):\n    A(a)\ndef g():\n    h()\ndef h():\n    g()\n"),
                  ValidationError);  // mutual recursion
  CHECK_THROWS_AS(dsl::parse_program("def f():\n    A(x)\n"), ValidationError);  // undefined var
  CHECK_THROWS_AS(dsl::parse_program("def f(a):\n    A(a)\ndef f(b):\n    B(b)\n"),
                  ValidationError);  // duplicate function
  CHECK_THROWS_AS(dsl::parse_program("def f(a):\n    break\n"), ValidationError);
  CHECK_THROWS_AS(dsl::parse_program("def len(a):\n    A(a)\n"), ValidationError);
  CHECK_THROWS_AS(dsl::parse_program("def f(a):\n    len(a)\n"), ValidationError);
  CHECK_THROWS_AS(dsl::parse_program("def f(a):\n    A(reverse(a, a))\n"), ParseError);
}

TEST_CASE("parse errors carry positions") {
  try {
    dsl::parse_program("def f(a):\n    if a == 'x'\n        A(a)\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("let scoping is block local and sees prior bindings") {
  CHECK_NOTHROW(dsl::parse_program(
      "def f(xs):\n    let first = xs[0]\n    A(first)\n"));
  CHECK_THROWS_AS(dsl::parse_program(
                      "def f(xs):\n    if len(xs) == 0:\n        let a = xs[0]\n    A(a)\n"),
                  ValidationError);
}

TEST_CASE("execute runs construct_stack exactly as the usage episode") {
  dsl::Program p = learned_program();
  WorldState start = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"ontable(b1)", "ontable(b2)", "ontable(b3)", "clear(b1)", "clear(b2)", "clear(b3)",
       "armempty"});
  dsl::Expansion result =
      dsl::expand(p, "construct_stack", args_list({"b1", "b2", "b3"}), blockworld(), start);
  CHECK(result.trace.completed);
  REQUIRE(result.actions.size() == 4);
  CHECK(result.actions[0].invocation_text() == "Pickup('b2')");
  CHECK(result.actions[1].invocation_text() == "Stack('b2', 'b3')");
  CHECK(result.actions[2].invocation_text() == "Pickup('b1')");
  CHECK(result.actions[3].invocation_text() == "Stack('b1', 'b2')");
  CHECK(result.final_state.atoms.count({"on", {"b1", "b2"}}) == 1);
  CHECK(result.final_state.atoms.count({"on", {"b2", "b3"}}) == 1);
}

TEST_CASE("dismantle_stack_until expands the learned-case call") {
  dsl::Program p = learned_program();
  WorldState start = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"on(b3,b2)", "on(b2,b1)", "ontable(b1)", "clear(b3)", "armempty"});
  dsl::Expansion result = dsl::expand(
      p, "dismantle_stack_until",
      {Value(Value::List{Value("b3"), Value("b2"), Value("b1")}), Value("b1")}, blockworld(),
      start);
  CHECK(result.trace.completed);
  REQUIRE(result.actions.size() == 4);
  CHECK(result.actions[0].invocation_text() == "Unstack('b3', 'b2')");
  CHECK(result.actions[1].invocation_text() == "Putdown('b3')");
  CHECK(result.actions[2].invocation_text() == "Unstack('b2', 'b1')");
  CHECK(result.actions[3].invocation_text() == "Putdown('b2')");
}

TEST_CASE("dismantle exits immediately when the target is already on top") {
  dsl::Program p = learned_program();
  WorldState start = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"on(b3,b2)", "on(b2,b1)", "ontable(b1)", "clear(b3)", "armempty"});
  dsl::Expansion result = dsl::expand(
      p, "dismantle_stack_until",
      {Value(Value::List{Value("b3"), Value("b2"), Value("b1")}), Value("b3")}, blockworld(),
      start);
  CHECK(result.trace.completed);
  CHECK(result.actions.empty());
  CHECK(result.final_state == start);
}

TEST_CASE("a failing atomic step aborts with the prefix applied") {
  dsl::Program p = learned_program();
  // b2 is covered by b3, so Stack(b1,b2) fails at atomic index 1.
  WorldState start = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"ontable(b1)", "ontable(b2)", "on(b3,b2)", "clear(b1)", "clear(b3)", "armempty"});
  dsl::Expansion result =
      dsl::expand(p, "construct_stack", args_list({"b1", "b2"}), blockworld(), start);
  CHECK_FALSE(result.trace.completed);
  CHECK(result.trace.abort_index == 1);
  CHECK(result.trace.abort_kind == StepErrorKind::precondition_failed);
  REQUIRE(result.trace.steps.size() == 2);
  CHECK(result.trace.steps[0].valid);
  CHECK_FALSE(result.trace.steps[1].valid);
  // Prefix applied: b1 is now held.
  CHECK(result.final_state.atoms.count({"holding", {"b1"}}) == 1);
}

TEST_CASE("assert aborts with a runtime error and no atomic entry") {
  dsl::Program p = dsl::parse_program(
      "def safe_pick(b):\n"
      "    assert holds('clear', b), \"block must be clear\"\n"
      "    Pickup(b)\n");
  WorldState start = testkit::state_from_atoms(
      {"b1", "b2"}, {"ontable(b1)", "ontable(b2)", "clear(b2)", "armempty"});
  dsl::Expansion result = dsl::expand(p, "safe_pick", {Value("b1")}, blockworld(), start);
  CHECK_FALSE(result.trace.completed);
  CHECK(result.trace.abort_kind == StepErrorKind::dsl_runtime_error);
  CHECK(result.trace.steps.empty());
  CHECK(result.trace.abort_index == 0);
  CHECK(result.trace.abort_message.find("block must be clear") != std::string::npos);

  dsl::Expansion good = dsl::expand(p, "safe_pick", {Value("b2")}, blockworld(), start);
  CHECK(good.trace.completed);
  CHECK(good.actions.size() == 1);
}

TEST_CASE("holds queries the live simulated state") {
  dsl::Program p = dsl::parse_program(
      "def pick_if_free(b):\n"
      "    if holds('armempty'):\n"
      "        Pickup(b)\n"
      "    else:\n"
      "        Putdown(b)\n");
  WorldState start =
      testkit::state_from_atoms({"b1"}, {"ontable(b1)", "clear(b1)", "armempty"});
  dsl::Expansion result = dsl::expand(p, "pick_if_free", {Value("b1")}, blockworld(), start);
  REQUIRE(result.actions.size() == 1);
  CHECK(result.actions[0].invocation_text() == "Pickup('b1')");
}

TEST_CASE("expression and type errors become recorded aborts") {
  const WorldState start =
      testkit::state_from_atoms({"b1"}, {"ontable(b1)", "clear(b1)", "armempty"});
  auto run = [&](const std::string& src, const std::vector<Value>& args) {
    dsl::Program p = dsl::parse_program(src);
    return dsl::expand(p, p.functions.at(0).name, args, blockworld(), start).trace;
  };
  // index out of range
  auto t1 = run("def f(xs):\n    Pickup(xs[5])\n", args_list({"b1"}));
  CHECK_FALSE(t1.completed);
  CHECK(t1.abort_kind == StepErrorKind::dsl_runtime_error);
  // list where object name expected
  auto t2 = run("def f(xs):\n    Pickup(xs)\n", args_list({"b1"}));
  CHECK_FALSE(t2.completed);
  // non-boolean condition
  auto t3 = run("def f(xs):\n    if xs:\n        Pickup(xs[0])\n", args_list({"b1"}));
  CHECK_FALSE(t3.completed);
  // wrong arity of defined call
  auto t4 = run("def g(a, b):\n    Stack(a, b)\ndef f(xs):\n    g(xs[0])\n", args_list({"b1"}));
  CHECK_FALSE(t4.completed);
  // unknown atomic action
  auto t5 = run("def f(xs):\n    Frobnicate(xs[0])\n", args_list({"b1"}));
  CHECK_FALSE(t5.completed);
  CHECK(t5.abort_message.find("unknown action") != std::string::npos);
}

TEST_CASE("builtins evaluate with list semantics") {
  dsl::Program p = dsl::parse_program(
      "def probe(xs):\n"
      "    assert len(xs) == 3, \"len\"\n"
      "    assert xs[0] == 'a' and xs[-1] == 'c', \"index\"\n"
      "    assert reverse(xs)[0] == 'c', \"reverse\"\n"
      "    assert slice(xs, 1)[0] == 'b', \"slice\"\n"
      "    assert slice(xs, 0, 2) == ['a', 'b'], \"slice2\"\n"
      "    assert zip(xs, slice(xs, 1))[0] == ['a', 'b'], \"zip\"\n"
      "    assert pairs(xs) == [['a','b'], ['b','c']], \"pairs\"\n"
      "    assert not (xs[0] != 'a'), \"neq\"\n"
      "    Pickup('b1')\n");
  WorldState start =
      testkit::state_from_atoms({"b1"}, {"ontable(b1)", "clear(b1)", "armempty"});
  dsl::Expansion result = dsl::expand(
      p, "probe", {Value(Value::List{Value("a"), Value("b"), Value("c")})}, blockworld(), start);
  CHECK(result.trace.completed);
}

TEST_CASE("nested defined calls contribute to one flat trace") {
  dsl::Program p = dsl::parse_program(
      "def move_to_table(t, b):\n"
      "    Unstack(t, b)\n"
      "    Putdown(t)\n"
      "def flatten(t, b):\n"
      "    move_to_table(t, b)\n");
  WorldState start = testkit::state_from_atoms(
      {"b1", "b2"}, {"on(b1,b2)", "ontable(b2)", "clear(b1)", "armempty"});
  dsl::Expansion result =
      dsl::expand(p, "flatten", {Value("b1"), Value("b2")}, blockworld(), start);
  CHECK(result.trace.completed);
  CHECK(result.actions.size() == 2);
}

TEST_CASE("expand leaves the source state untouched") {
  dsl::Program p = learned_program();
  WorldState start = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"ontable(b1)", "ontable(b2)", "ontable(b3)", "clear(b1)", "clear(b2)", "clear(b3)",
       "armempty"});
  WorldState copy = start;
  dsl::expand(p, "construct_stack", args_list({"b1", "b2", "b3"}), blockworld(), start);
  CHECK(start == copy);
}
