#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "learnact/dsl_interp.hpp"
#include "learnact/strips.hpp"
#include "learnact/text_render.hpp"
#include "learnact/values.hpp"

namespace learnact {

struct Observation {
  std::string text;
  bool valid = true;
  bool done = false;
};

struct StepResult {
  Observation observation;
  StepErrorKind error_kind = StepErrorKind::none;
  std::string error_message;
};

/// One agent invocation with everything needed for replay and error
/// localization.
struct StepRecord {
  std::string invocation_text;
  std::optional<Invocation> parsed;
  bool learned_action = false;
  dsl::SubTrace sub_trace;  // single entry for atomic invocations
  bool valid = false;
  bool done = false;
  std::string observation;
  StepErrorKind error_kind = StepErrorKind::none;
  std::string error_message;
};

/// Full trajectory of one episode. The atomic counters equal the sums
/// over the per-step sub-traces.
struct EpisodeRecord {
  std::string instance_id;
  std::string initial_observation;
  std::vector<StepRecord> steps;
  int reward = 0;
  long long atomic_total = 0;
  long long atomic_ok = 0;
};

/// atomic_ok / atomic_total; 0 when no atomic step was ever issued.
double step_accuracy(const EpisodeRecord& record);

/// Invocation-level alternative kept behind a metrics flag: valid agent
/// steps / total agent steps.
double agent_step_accuracy(const EpisodeRecord& record);

struct EpisodeOptions {
  int max_steps = 40;
};

/// Minimal environment surface; implemented by the in-process Episode
/// and by the out-of-process stdio adapter client.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual Observation reset() = 0;
  virtual StepResult step(const std::string& invocation_text) = 0;
};

/// One POMDP episode over a domain instance: textual observations,
/// validity feedback, binary goal reward, step accounting. Learned
/// actions are dispatched to the DSL interpreter when a library program
/// is attached.
class Episode final : public Environment {
 public:
  Episode(const DomainDefinition& domain, Instance instance,
          const dsl::Program* library = nullptr, EpisodeOptions options = {});

  /// Re-initializes state from the instance and returns the rendered
  /// initial observation.
  Observation reset() override;

  /// Parses and executes one agent invocation. Throws StateError when
  /// the episode is finished (done latches) or the budget is exhausted.
  StepResult step(const std::string& invocation_text) override;

  bool done() const { return done_; }
  /// True when another step may be taken.
  bool active() const;
  int steps_taken() const { return static_cast<int>(record_.steps.size()); }
  const WorldState& state() const { return state_; }
  const EpisodeRecord& record() const { return record_; }
  const DomainDefinition& domain() const { return domain_; }
  std::string render_state() const;
  std::string goal_text() const;

 private:
  class DslAdapter;

  StepResult step_atomic(StepRecord& rec, const Invocation& inv);
  StepResult step_learned(StepRecord& rec, const Invocation& inv);
  StepResult finish_step(StepRecord& rec, StepResult result);

  const DomainDefinition& domain_;
  Instance instance_;
  const dsl::Program* library_;
  EpisodeOptions options_;
  std::unique_ptr<ObservationRenderer> renderer_;
  WorldState state_;
  EpisodeRecord record_;
  bool done_ = false;
  bool started_ = false;
};

}  // namespace learnact
