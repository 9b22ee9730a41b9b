#include "learnact/episode.hpp"

namespace learnact {

double step_accuracy(const EpisodeRecord& record) {
  if (record.atomic_total == 0) return 0.0;
  return static_cast<double>(record.atomic_ok) / static_cast<double>(record.atomic_total);
}

double agent_step_accuracy(const EpisodeRecord& record) {
  if (record.steps.empty()) return 0.0;
  long long valid = 0;
  for (const auto& step : record.steps) valid += step.valid ? 1 : 0;
  return static_cast<double>(valid) / static_cast<double>(record.steps.size());
}

// Bridges the interpreter to this episode's state; enforces the
// per-call atomic-step ceiling (= remaining episode budget).
class Episode::DslAdapter final : public dsl::DslEnv {
 public:
  DslAdapter(Episode& episode, long long ceiling) : episode_(episode), ceiling_(ceiling) {}

  AtomicOutcome atomic_step(const std::string& name,
                            const std::vector<std::string>& args) override {
    AtomicOutcome outcome;
    outcome.ground = ground(episode_.domain_, episode_.state_, name, args);
    if (!outcome.ground.ok()) return outcome;
    ++issued_;
    if (applicable(episode_.state_, *outcome.ground.action)) {
      episode_.state_ = apply(episode_.state_, *outcome.ground.action);
      outcome.valid = true;
      outcome.observation = episode_.render_state();
    } else {
      outcome.valid = false;
      outcome.observation = kInvalidActionSentence;
    }
    return outcome;
  }

  bool holds(const Atom& atom) const override { return episode_.state_.atoms.count(atom) > 0; }

  long long budget_remaining() const override { return ceiling_ - issued_; }

 private:
  Episode& episode_;
  long long ceiling_;
  long long issued_ = 0;
};

Episode::Episode(const DomainDefinition& domain, Instance instance, const dsl::Program* library,
                 EpisodeOptions options)
    : domain_(domain),
      instance_(std::move(instance)),
      library_(library),
      options_(options),
      renderer_(ObservationRenderer::for_domain(domain.name)) {}

Observation Episode::reset() {
  state_ = instance_.state;
  record_ = EpisodeRecord{};
  record_.instance_id = instance_.id;
  done_ = goal_satisfied(state_);
  started_ = true;
  Observation obs;
  obs.valid = true;
  obs.done = done_;
  obs.text = render_state() + (done_ ? kGoalSatisfiedSuffix : "");
  record_.initial_observation = obs.text;
  return obs;
}

bool Episode::active() const {
  return started_ && !done_ && steps_taken() < options_.max_steps;
}

std::string Episode::render_state() const { return renderer_->render_state(state_); }

std::string Episode::goal_text() const { return renderer_->render_goal(state_); }

StepResult Episode::step(const std::string& invocation_text) {
  if (!started_) throw StateError("reset() must be called before step()");
  if (done_) throw StateError("episode is finished; the done flag latches");
  if (steps_taken() >= options_.max_steps) throw StateError("episode step budget exhausted");

  StepRecord rec;
  rec.invocation_text = invocation_text;
  rec.parsed = parse_invocation(invocation_text);

  if (!rec.parsed) {
    StepResult result;
    result.error_kind = StepErrorKind::unknown_action;
    result.error_message = "could not parse invocation";
    return finish_step(rec, std::move(result));
  }
  if (library_ && library_->find(rec.parsed->name)) {
    rec.learned_action = true;
    return step_learned(rec, *rec.parsed);
  }
  return step_atomic(rec, *rec.parsed);
}

StepResult Episode::step_atomic(StepRecord& rec, const Invocation& inv) {
  StepResult result;
  std::vector<std::string> args;
  for (const auto& value : inv.args) {
    if (!value.is_string()) {
      result.error_kind = StepErrorKind::bad_arity;
      result.error_message = "arguments of action '" + inv.name + "' must be object names";
      return finish_step(rec, std::move(result));
    }
    args.push_back(value.as_string());
  }
  GroundResult grounded = ground(domain_, state_, inv.name, args);
  if (!grounded.ok()) {
    result.error_kind = grounded.error;
    result.error_message = grounded.message;
    return finish_step(rec, std::move(result));
  }
  dsl::SubStep sub;
  sub.action = *grounded.action;
  if (applicable(state_, *grounded.action)) {
    state_ = apply(state_, *grounded.action);
    sub.valid = true;
    sub.observation = render_state();
    rec.sub_trace.completed = true;
  } else {
    sub.valid = false;
    sub.observation = kInvalidActionSentence;
    result.error_kind = StepErrorKind::precondition_failed;
    result.error_message = "precondition failed for " + grounded.action->invocation_text();
    rec.sub_trace.completed = false;
    rec.sub_trace.abort_index = 0;
    rec.sub_trace.abort_kind = StepErrorKind::precondition_failed;
    rec.sub_trace.abort_message = result.error_message;
  }
  rec.sub_trace.steps.push_back(std::move(sub));
  return finish_step(rec, std::move(result));
}

StepResult Episode::step_learned(StepRecord& rec, const Invocation& inv) {
  StepResult result;
  DslAdapter adapter(*this, options_.max_steps - steps_taken());
  rec.sub_trace = dsl::execute(*library_, inv.name, inv.args, adapter);
  if (!rec.sub_trace.completed) {
    result.error_kind = rec.sub_trace.abort_kind == StepErrorKind::precondition_failed
                            ? StepErrorKind::precondition_failed
                            : StepErrorKind::dsl_runtime_error;
    result.error_message = rec.sub_trace.abort_message;
  }
  return finish_step(rec, std::move(result));
}

StepResult Episode::finish_step(StepRecord& rec, StepResult result) {
  done_ = goal_satisfied(state_);
  rec.valid = result.error_kind == StepErrorKind::none;
  rec.done = done_;
  rec.error_kind = result.error_kind;
  rec.error_message = result.error_message;
  rec.observation = rec.valid ? render_state() + (done_ ? kGoalSatisfiedSuffix : "")
                              : kInvalidActionSentence;

  result.observation.text = rec.observation;
  result.observation.valid = rec.valid;
  result.observation.done = done_;

  record_.atomic_total += static_cast<long long>(rec.sub_trace.steps.size());
  record_.atomic_ok += rec.sub_trace.valid_count();
  record_.steps.push_back(std::move(rec));
  record_.reward = done_ ? 1 : 0;
  return result;
}

}  // namespace learnact
