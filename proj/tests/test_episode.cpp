#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "learnact/episode.hpp"

using namespace learnact;

namespace {

const DomainBundle& bundle() { return testkit::blockworld_bundle(); }

struct TranscriptStep {
  const char* action;
  bool valid;
  const char* observation;
};

// The canonical blockworld walkthrough on bw_a: nine agent steps, one
// invalid, ending at the goal.
const TranscriptStep kTranscript[] = {
    {"Unstack('b2','b3')", true,
     "b3 is on b1. b1 is on the table. You are holding b2. The b3 is clear."},
    {"Putdown('b2')", true,
     "b3 is on b1. b1 is on the table. b2 is on the table. Robot arm is empty. The b2 is "
     "clear. The b3 is clear."},
    {"Unstack('b3','b1')", true,
     "b1 is on the table. b2 is on the table. You are holding b3. The b1 is clear. The b2 is "
     "clear."},
    {"Putdown('b3')", true,
     "b1 is on the table. b2 is on the table. b3 is on the table. Robot arm is empty. The b1 "
     "is clear. The b2 is clear. The b3 is clear."},
    {"Pickup('b2')", true,
     "b1 is on the table. b3 is on the table. You are holding b2. The b1 is clear. The b3 is "
     "clear."},
    {"Stack('b2','b3')", true,
     "b2 is on b3. b3 is on the table. b1 is on the table. Robot arm is empty. The b1 is "
     "clear. The b2 is clear."},
    {"Pickup('b3')", false,
     "The action is not valid and therefore takes no effect. Please remember to satisfy the "
     "restriction of actions."},
    {"Pickup('b1')", true,
     "b2 is on b3. b3 is on the table. You are holding b1. The b2 is clear."},
    {"Stack('b1','b2')", true,
     "b1 is on b2. b2 is on b3. b3 is on the table. Robot arm is empty. The b1 is clear. The "
     "goal is satisfied."},
};

}  // namespace

TEST_CASE("the walkthrough transcript reproduces byte-for-byte") {
  Episode episode(bundle().domain, *bundle().find_instance("bw_a"));
  Observation obs = episode.reset();
  CHECK(obs.text ==
        "b2 is on b3. b3 is on b1. b1 is on the table. Robot arm is empty. The b2 is clear.");
  CHECK_FALSE(obs.done);
  for (const auto& step : kTranscript) {
    StepResult result = episode.step(step.action);
    CHECK(result.observation.text == step.observation);
    CHECK(result.observation.valid == step.valid);
  }
  CHECK(episode.done());
  CHECK(episode.record().reward == 1);
  CHECK(episode.record().atomic_total == 9);
  CHECK(episode.record().atomic_ok == 8);
  CHECK(step_accuracy(episode.record()) == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("an invalid step leaves the rendered state unchanged") {
  Episode episode(bundle().domain, *bundle().find_instance("bw_a"));
  episode.reset();
  std::string before = episode.render_state();
  StepResult result = episode.step("Pickup('b3')");  // b3 is covered
  CHECK_FALSE(result.observation.valid);
  CHECK(result.error_kind == StepErrorKind::precondition_failed);
  CHECK(episode.render_state() == before);
}

TEST_CASE("unknown actions and bad arities do not touch the state") {
  Episode episode(bundle().domain, *bundle().find_instance("bw_a"));
  episode.reset();
  std::string before = episode.render_state();

  StepResult unknown = episode.step("Frobnicate('x')");
  CHECK(unknown.error_kind == StepErrorKind::unknown_action);
  CHECK(unknown.observation.text == kInvalidActionSentence);

  StepResult arity = episode.step("Pickup('b2','b3')");
  CHECK(arity.error_kind == StepErrorKind::bad_arity);

  StepResult garbage = episode.step("please pick up a block");
  CHECK(garbage.error_kind == StepErrorKind::unknown_action);

  CHECK(episode.render_state() == before);
  // None of these reached an atomic attempt.
  CHECK(episode.record().atomic_total == 0);
}

TEST_CASE("done latches and further steps are refused") {
  Episode episode(bundle().domain, *bundle().find_instance("bw_a"));
  episode.reset();
  for (const auto& step : kTranscript) episode.step(step.action);
  CHECK(episode.done());
  CHECK_FALSE(episode.active());
  CHECK_THROWS_AS(episode.step("Pickup('b1')"), StateError);
}

TEST_CASE("step budget exhaustion ends the episode with reward 0") {
  Episode episode(bundle().domain, *bundle().find_instance("bw_a"), nullptr, EpisodeOptions{2});
  episode.reset();
  episode.step("Unstack('b2','b3')");
  episode.step("Putdown('b2')");
  CHECK_FALSE(episode.active());
  CHECK_THROWS_AS(episode.step("Pickup('b2')"), StateError);
  CHECK(episode.record().reward == 0);
}

TEST_CASE("an instance whose init satisfies the goal resets to done") {
  Instance solved = *bundle().find_instance("bw_a");
  solved.state.goal = {{"ontable", {"b1"}}};
  Episode episode(bundle().domain, solved);
  Observation obs = episode.reset();
  CHECK(obs.done);
  CHECK(obs.text.find(" The goal is satisfied.") != std::string::npos);
}

TEST_CASE("replaying the invocation list reproduces observations and reward") {
  Episode first(bundle().domain, *bundle().find_instance("bw_b"));
  first.reset();
  for (const char* action : {"Unstack('b3','b2')", "Pickup('b3')", "Putdown('b3')",
                             "Unstack('b2','b1')", "Putdown('b2')", "Pickup('b2')",
                             "Stack('b2','b3')", "Pickup('b1')", "Stack('b1','b2')"})
    first.step(action);

  Episode second(bundle().domain, *bundle().find_instance("bw_b"));
  second.reset();
  for (const auto& step : first.record().steps) {
    StepResult result = second.step(step.invocation_text);
    CHECK(result.observation.text == step.observation);
    CHECK(result.observation.valid == step.valid);
  }
  CHECK(second.record().reward == first.record().reward);
  CHECK(second.record().atomic_ok == first.record().atomic_ok);
  CHECK(second.record().atomic_total == first.record().atomic_total);
}

TEST_CASE("learned actions execute through the episode with sub-step accounting") {
  dsl::Program program = testkit::learned_library().compile();
  Episode episode(bundle().domain, *bundle().find_instance("bw_b"), &program);
  episode.reset();

  StepResult dismantle = episode.step("dismantle_stack_until(['b3','b2','b1'], 'b1')");
  CHECK(dismantle.observation.valid);
  CHECK(dismantle.observation.text ==
        "b1 is on the table. b2 is on the table. b3 is on the table. Robot arm is empty. The "
        "b1 is clear. The b2 is clear. The b3 is clear.");

  StepResult construct = episode.step("construct_stack(['b1','b2','b3'])");
  CHECK(construct.observation.valid);
  CHECK(construct.observation.done);
  CHECK(construct.observation.text ==
        "b1 is on b2. b2 is on b3. b3 is on the table. Robot arm is empty. The b1 is clear. "
        "The goal is satisfied.");

  CHECK(episode.record().reward == 1);
  CHECK(episode.record().atomic_total == 8);
  CHECK(episode.record().atomic_ok == 8);
  CHECK(episode.record().steps.size() == 2);
  CHECK(episode.record().steps[0].learned_action);
  CHECK(episode.record().steps[0].sub_trace.steps.size() == 4);
}

TEST_CASE("a learned action failing mid-way keeps its prefix and reports the sentinel") {
  dsl::Program program = testkit::learned_library(/*buggy_construct=*/true).compile();
  Instance flat = *bundle().find_instance("bw_f");  // five blocks on the table
  Episode episode(bundle().domain, flat, &program);
  episode.reset();

  StepResult result = episode.step("construct_stack(['b1','b2','b3'])");
  CHECK_FALSE(result.observation.valid);
  CHECK(result.observation.text == kInvalidActionSentence);
  CHECK(result.error_kind == StepErrorKind::precondition_failed);
  const StepRecord& step = episode.record().steps.back();
  CHECK(step.sub_trace.steps.size() == 3);
  CHECK(step.sub_trace.abort_index == 2);
  // The prefix stayed applied: b1 is stacked on b2.
  CHECK(episode.state().atoms.count({"on", {"b1", "b2"}}) == 1);
}

TEST_CASE("step accuracy follows the documented formulas") {
  EpisodeRecord record;
  record.atomic_ok = 10;
  record.atomic_total = 12;
  CHECK(step_accuracy(record) == doctest::Approx(10.0 / 12.0));
  record.atomic_ok = record.atomic_total = 7;
  CHECK(step_accuracy(record) == 1.0);
  record = EpisodeRecord{};
  CHECK(step_accuracy(record) == 0.0);

  record.steps.resize(4);
  record.steps[0].valid = true;
  record.steps[1].valid = false;
  record.steps[2].valid = true;
  record.steps[3].valid = true;
  CHECK(agent_step_accuracy(record) == doctest::Approx(0.75));
}

TEST_CASE("stepping before reset is an error") {
  Episode episode(bundle().domain, *bundle().find_instance("bw_a"));
  CHECK_THROWS_AS(episode.step("Pickup('b1')"), StateError);
}
