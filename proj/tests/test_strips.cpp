#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "learnact/strips.hpp"
#include "learnact/util.hpp"

using namespace learnact;

namespace {

const DomainDefinition& blockworld() { return testkit::blockworld_bundle().domain; }

WorldState three_block_tower() {
  // b2 on b3 on b1, goal b1 on b2 on b3
  return testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"on(b2,b3)", "on(b3,b1)", "ontable(b1)", "clear(b2)", "armempty"},
      {"on(b1,b2)", "on(b2,b3)"});
}

GroundAction must_ground(const DomainDefinition& d, const WorldState& s, const std::string& name,
                         const std::vector<std::string>& args) {
  GroundResult r = ground(d, s, name, args);
  REQUIRE(r.ok());
  return *r.action;
}

}  // namespace

TEST_CASE("blockworld domain file parses to four schemas and five predicates") {
  const DomainDefinition& d = blockworld();
  CHECK(d.name == "blockworld");
  CHECK(d.schemas.size() == 4);
  CHECK(d.predicates.size() == 5);
  for (const char* name : {"Pickup", "Putdown", "Stack", "Unstack"})
    CHECK(d.find_schema(name) != nullptr);
  const PredicateDecl* on = d.find_predicate("on");
  REQUIRE(on != nullptr);
  CHECK(on->arity() == 2);
  CHECK(d.find_predicate("armempty")->arity() == 0);
}

TEST_CASE("domain with zero actions is rejected") {
  CHECK_THROWS_WITH_AS(parse_domain("domain empty\npredicate p/0\n"),
                       "domain must declare at least one action", ValidationError);
}

TEST_CASE("undeclared predicate is reported with its name and line") {
  const char* text =
      "domain d\n"
      "predicate p/1 t\n"
      "action A(x:t)\n"
      "  pre: p(x)\n"
      "  add: flying(x)\n";
  try {
    parse_domain(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("flying") != std::string::npos);
    CHECK(msg.find("line 5") != std::string::npos);
  }
}

TEST_CASE("duplicate schema names and add/del overlap are rejected") {
  const char* dup =
      "domain d\npredicate p/1 t\n"
      "action A(x:t)\n  pre: p(x)\n  add: p(x)\n"
      "action A(x:t)\n  pre: p(x)\n  del: p(x)\n";
  CHECK_THROWS_AS(parse_domain(dup), ValidationError);

  const char* overlap =
      "domain d\npredicate p/1 t\n"
      "action A(x:t)\n  pre: p(x)\n  add: p(x)\n  del: p(x)\n";
  CHECK_THROWS_AS(parse_domain(overlap), ValidationError);
}

TEST_CASE("unused schema parameter is rejected") {
  const char* text =
      "domain d\npredicate p/1 t\n"
      "action A(x:t, y:t)\n  pre: p(x)\n  add: p(x)\n";
  CHECK_THROWS_AS(parse_domain(text), ValidationError);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_domain("domain d\npredicate p/x t\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() > 0);
  }
}

TEST_CASE("pretty-print round-trips every bundled domain") {
  for (const char* name : {"blockworld", "gripper", "barman", "tyreworld"}) {
    DomainDefinition original =
        parse_domain(read_file(testkit::domain_dir(name) + "/domain.txt"));
    DomainDefinition reparsed = parse_domain(pretty_print(original));
    CHECK(reparsed.name == original.name);
    REQUIRE(reparsed.schemas.size() == original.schemas.size());
    REQUIRE(reparsed.predicates.size() == original.predicates.size());
    for (size_t i = 0; i < original.schemas.size(); ++i) {
      CHECK(reparsed.schemas[i].name == original.schemas[i].name);
      CHECK(reparsed.schemas[i].params == original.schemas[i].params);
      CHECK(reparsed.schemas[i].pre == original.schemas[i].pre);
      CHECK(reparsed.schemas[i].add == original.schemas[i].add);
      CHECK(reparsed.schemas[i].del == original.schemas[i].del);
    }
  }
}

TEST_CASE("applicable follows the precondition conjunction") {
  const DomainDefinition& d = blockworld();
  WorldState s = testkit::state_from_atoms({"b1", "b2", "b3"},
                                           {"clear(b1)", "ontable(b1)", "on(b2,b3)",
                                            "ontable(b3)", "clear(b2)", "armempty"});
  CHECK(applicable(s, must_ground(d, s, "Pickup", {"b1"})));
  CHECK_FALSE(applicable(s, must_ground(d, s, "Pickup", {"b3"})));
}

TEST_CASE("negated preconditions consult only the atom set") {
  DomainDefinition d = parse_domain(
      "domain neg\npredicate wet/1 t\npredicate lit/1 t\n"
      "action Light(x:t)\n  pre: !wet(x)\n  add: lit(x)\n");
  WorldState dry = testkit::state_from_atoms({}, {});
  dry.objects.push_back({"match", "t"});
  GroundAction light = must_ground(d, dry, "Light", {"match"});
  CHECK(applicable(dry, light));
  WorldState wet = dry;
  wet.atoms.insert({"wet", {"match"}});
  CHECK_FALSE(applicable(wet, light));
}

TEST_CASE("empty precondition is vacuously applicable") {
  DomainDefinition d = parse_domain(
      "domain v\npredicate p/1 t\naction Noop(x:t)\n  add: p(x)\n");
  WorldState s;
  s.objects.push_back({"a", "t"});
  CHECK(applicable(s, must_ground(d, s, "Noop", {"a"})));
}

TEST_CASE("apply produces the transcript's unstack successor and keeps input intact") {
  const DomainDefinition& d = blockworld();
  WorldState s = three_block_tower();
  WorldState before = s;
  GroundAction unstack = must_ground(d, s, "Unstack", {"b2", "b3"});
  WorldState next = apply(s, unstack);
  CHECK(s == before);
  CHECK(next.atoms.count({"holding", {"b2"}}) == 1);
  CHECK(next.atoms.count({"clear", {"b3"}}) == 1);
  CHECK(next.atoms.count({"on", {"b2", "b3"}}) == 0);
  CHECK(next.goal == s.goal);
  CHECK(next.objects == s.objects);
}

TEST_CASE("apply on an inapplicable action throws") {
  const DomainDefinition& d = blockworld();
  WorldState s = three_block_tower();
  CHECK_THROWS_AS(apply(s, must_ground(d, s, "Pickup", {"b3"})), StateError);
}

TEST_CASE("pickup then putdown restores the original state") {
  const DomainDefinition& d = blockworld();
  WorldState s = testkit::state_from_atoms({"b1"}, {"ontable(b1)", "clear(b1)", "armempty"});
  WorldState mid = apply(s, must_ground(d, s, "Pickup", {"b1"}));
  WorldState back = apply(mid, must_ground(d, mid, "Putdown", {"b1"}));
  CHECK(back == s);
}

TEST_CASE("frame property: untouched atoms survive apply") {
  const DomainDefinition& d = blockworld();
  WorldState s = three_block_tower();
  GroundAction unstack = must_ground(d, s, "Unstack", {"b2", "b3"});
  WorldState next = apply(s, unstack);
  // on(b3,b1) and ontable(b1) are not in add/del of this grounding.
  CHECK(next.atoms.count({"on", {"b3", "b1"}}) == 1);
  CHECK(next.atoms.count({"ontable", {"b1"}}) == 1);
}

TEST_CASE("goal satisfaction is subset inclusion") {
  WorldState s = three_block_tower();
  CHECK_FALSE(goal_satisfied(s));

  WorldState done = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"on(b1,b2)", "on(b2,b3)", "ontable(b3)", "clear(b1)", "armempty"},
      {"on(b1,b2)", "on(b2,b3)"});
  CHECK(goal_satisfied(done));

  WorldState empty_goal = s;
  empty_goal.goal.clear();
  CHECK(goal_satisfied(empty_goal));

  WorldState asymmetric = testkit::state_from_atoms({"b1", "b2"}, {"on(b2,b1)"}, {"on(b1,b2)"});
  CHECK_FALSE(goal_satisfied(asymmetric));
}

TEST_CASE("grounding rejects unknown names, arity, type and repeated-argument errors") {
  const DomainDefinition& d = blockworld();
  WorldState s = three_block_tower();

  CHECK(ground(d, s, "Frobnicate", {"b1"}).error == StepErrorKind::unknown_action);
  CHECK(ground(d, s, "Pickup", {"b1", "b2"}).error == StepErrorKind::bad_arity);
  CHECK(ground(d, s, "Pickup", {"nosuch"}).error == StepErrorKind::bad_arity);
  CHECK(ground(d, s, "Stack", {"b1", "b1"}).error == StepErrorKind::bad_arity);
  CHECK(ground(d, s, "Stack", {"b1", "b2"}).ok());
}

TEST_CASE("instance parsing validates atoms against the domain") {
  const DomainDefinition& d = blockworld();
  CHECK_THROWS_AS(parse_instance("objects\n b1:block\ninit\n flying(b1)\ngoal\n", d),
                  ValidationError);
  CHECK_THROWS_AS(parse_instance("objects\n b1:widget\ninit\ngoal\n", d), ValidationError);
  CHECK_THROWS_AS(parse_instance("objects\n b1:block\ninit\n on(b1)\ngoal\n", d),
                  ValidationError);
  CHECK_THROWS_AS(parse_instance("objects\n b1:block\ninit\n armempty\n", d), ValidationError);

  WorldState ok = parse_instance(
      "objects\n b1:block, b2:block\ninit\n ontable(b1)\n on(b2,b1)\n armempty\ngoal\n"
      " ontable(b2)\n",
      d);
  CHECK(ok.objects.size() == 2);
  CHECK(ok.atoms.size() == 3);
  CHECK(ok.goal.size() == 1);
}
