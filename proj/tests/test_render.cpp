#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "learnact/text_render.hpp"

using namespace learnact;

TEST_CASE("blockworld renders the canonical all-on-table sentence") {
  auto renderer = ObservationRenderer::for_domain("blockworld");
  WorldState s = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"ontable(b1)", "ontable(b2)", "ontable(b3)", "clear(b1)", "clear(b2)", "clear(b3)",
       "armempty"});
  CHECK(renderer->render_state(s) ==
        "b1 is on the table. b2 is on the table. b3 is on the table. Robot arm is empty. "
        "The b1 is clear. The b2 is clear. The b3 is clear.");
}

TEST_CASE("blockworld renders stacks top-down before loose table blocks") {
  auto renderer = ObservationRenderer::for_domain("blockworld");
  WorldState s = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"on(b2,b3)", "on(b3,b1)", "ontable(b1)", "clear(b2)", "armempty"});
  CHECK(renderer->render_state(s) ==
        "b2 is on b3. b3 is on b1. b1 is on the table. Robot arm is empty. The b2 is clear.");

  WorldState mixed = testkit::state_from_atoms(
      {"b1", "b2", "b3"},
      {"on(b2,b3)", "ontable(b3)", "ontable(b1)", "clear(b1)", "clear(b2)", "armempty"});
  CHECK(renderer->render_state(mixed) ==
        "b2 is on b3. b3 is on the table. b1 is on the table. Robot arm is empty. "
        "The b1 is clear. The b2 is clear.");
}

TEST_CASE("zero-object state renders the empty string") {
  auto renderer = ObservationRenderer::for_domain("blockworld");
  CHECK(renderer->render_state(WorldState{}) == "");
}

TEST_CASE("holding renders the arm sentence in canonical position") {
  auto renderer = ObservationRenderer::for_domain("blockworld");
  WorldState s = testkit::state_from_atoms(
      {"b1", "b2"}, {"ontable(b2)", "clear(b2)", "holding(b1)"});
  CHECK(renderer->render_state(s) == "b2 is on the table. You are holding b1. The b2 is clear.");
}

TEST_CASE("blockworld goal sentence matches the transcript phrasing") {
  auto renderer = ObservationRenderer::for_domain("blockworld");
  WorldState s = testkit::state_from_atoms({"b1", "b2", "b3"}, {},
                                           {"on(b1,b2)", "on(b2,b3)"});
  CHECK(renderer->render_goal(s) ==
        "The goal is to satisfy the following conditions: b1 is on b2., b2 is on b3.");
}

TEST_CASE("gripper renderer follows robot, balls, grippers order") {
  auto renderer = ObservationRenderer::for_domain("gripper");
  WorldState s;
  for (auto [n, t] : {std::pair{"rooma", "room"}, {"roomb", "room"}, {"ball1", "ball"},
                      {"ball2", "ball"}, {"left", "gripper"}, {"right", "gripper"}})
    s.objects.push_back({n, t});
  s.atoms = {{"at_robby", {"rooma"}},
             {"at", {"ball2", "roomb"}},
             {"carry", {"ball1", "left"}},
             {"free", {"right"}}};
  CHECK(renderer->render_state(s) ==
        "Robby is in rooma. ball2 is in roomb. Your left gripper is carrying ball1. "
        "Your right gripper is free.");
}

TEST_CASE("generic renderer prints sorted atoms for unknown domains") {
  auto renderer = ObservationRenderer::for_domain("martian");
  WorldState s;
  s.objects.push_back({"x", "t"});
  s.atoms = {{"beta", {"x"}}, {"alpha", {"x"}}};
  CHECK(renderer->render_state(s) == "alpha(x). beta(x).");
}

TEST_CASE("sentinel strings are bit-exact") {
  CHECK(std::string(kInvalidActionSentence) ==
        "The action is not valid and therefore takes no effect. Please remember to satisfy "
        "the restriction of actions.");
  CHECK(std::string(kGoalSatisfiedSuffix) == " The goal is satisfied.");
}
