#pragma once

#include <optional>
#include <string>
#include <vector>

#include "learnact/bundle.hpp"
#include "learnact/episode.hpp"
#include "learnact/gateway.hpp"
#include "learnact/library.hpp"
#include "learnact/prompts.hpp"

namespace learnact {

/// Candidate selection score: mu = p_succ + p_stepacc. Counters are
/// kept as integers so mu comparisons and the score invariant are exact
/// rational arithmetic, not float juggling.
struct CandidateScore {
  long long successes = 0;
  long long instance_count = 0;
  long long atomic_ok = 0;
  long long atomic_total = 0;
  bool failed_sample = false;  // unparseable sample: below every real score

  double p_succ() const;
  double p_stepacc() const;  // 0 when no atomic steps were taken
  double mu() const;

  /// Exact three-way comparison of mu values: -1, 0, or 1.
  static int compare(const CandidateScore& a, const CandidateScore& b);
};

/// One candidate action library in a K-sample round.
struct Candidate {
  ActionLibrary library;
  bool invalid = false;  // creation/revision did not parse
  std::string invalid_reason;
  std::string request_digest;  // digest of the sample's originating request
};

/// The error case handed to action learning: the episode, the failing
/// invocation, and (for learned actions) its atomic sub-trace.
struct FailureCase {
  std::string instance_id;
  EpisodeRecord record;
  int step_index = -1;
  StepErrorKind error_kind = StepErrorKind::none;
  bool learned_action = false;
  std::string action_name;
  dsl::SubTrace sub_trace;
};

struct IterationLog {
  int iteration = 0;  // 1-based
  std::vector<CandidateScore> scores;
  int chosen_index = 0;
  double chosen_mu = 0.0;
  bool stopped_clean = false;  // no failure case remained
  std::string failure_instance;
  std::string failure_action;
};

struct LearnState {
  std::vector<IterationLog> iterations;
};

struct LearnerOptions {
  int samples = 4;   // K
  int maxiter = 3;
  int max_steps = 40;
  size_t max_prompt_chars = 0;
  bool random_error_case = false;  // default: deterministic first failure
  unsigned long long seed = 0;
};

struct TrainResult {
  ActionLibrary library;
  LearnState state;
};

/// The training loop: create K candidate libraries, evaluate them on
/// the training instances, pick the best by mu, localize an error case,
/// and revise by Update or Note until clean success or maxiter.
class Learner {
 public:
  Learner(const DomainBundle& bundle, const PromptKit& prompts, ChatGateway& agent,
          ChatGateway& learner_llm, LearnerOptions options = {});

  /// K creation samples; each renders the creation prompt, parses the
  /// fenced DSL functions, then generates a description and a usage
  /// example per function. Throws when every sample is unparseable.
  std::vector<Candidate> action_creation();

  /// Runs one Act episode with the library attached.
  EpisodeRecord solve_problem(const Instance& instance, const ActionLibrary& library);

  /// Picks the failure to learn from; nullopt iff every instance
  /// succeeded with zero action errors.
  std::optional<FailureCase> select_error_case(const std::vector<EpisodeRecord>& records) const;

  /// K revision samples from the learning prompt: Update replaces or
  /// extends sources (descriptions and usage examples regenerate for
  /// changed entries); Plan/Note appends to the target entry's notes.
  std::vector<Candidate> action_learn(const ActionLibrary& library, const FailureCase& failure);

  static CandidateScore score(const std::vector<EpisodeRecord>& records);

  /// When `progress` is given, iteration logs are written into it as
  /// they complete, so partial history survives an abort.
  TrainResult train(const std::vector<Instance>& train_instances,
                    LearnState* progress = nullptr);

  const LearnerOptions& options() const { return options_; }

 private:
  Candidate build_candidate_from_code(const std::string& code, const std::string& digest);
  void attach_instructions(ActionLibrary& library, const std::vector<std::string>& names);
  std::string complete(ChatGateway& gateway, const RenderedPrompt& prompt);

  const DomainBundle& bundle_;
  const PromptKit& prompts_;
  ChatGateway& agent_;
  ChatGateway& learner_llm_;
  LearnerOptions options_;
};

/// First fenced code block (```dsl ... ``` or any ``` fence) in an LLM
/// completion; empty when there is none.
std::string extract_code_fence(const std::string& completion);

/// Payload of the first "Action:" line, or the first nonempty line when
/// the completion carries no marker.
std::string extract_action_line(const std::string& completion);

/// Splits DSL source into per-function chunks by top-level `def` lines;
/// returns (name, source) pairs.
std::vector<std::pair<std::string, std::string>> split_functions(const std::string& code);

/// Parsed "Improve:" response of the learning prompt.
struct Improvement {
  enum class Kind { update, note } kind = Kind::update;
  std::string target;
  std::string content;  // note text (Plan) or raw content (Update)
};
std::optional<Improvement> parse_improvement(const std::string& completion);

/// One Act episode against `agent`: render the agent prompt with the
/// running history, take the completion's action line, step, repeat
/// until done or the step budget runs out. Shared by training-time
/// evaluation and the test stage.
EpisodeRecord run_act_episode(const DomainBundle& bundle, const PromptKit& prompts,
                              ChatGateway& agent, const Instance& instance,
                              const ActionLibrary& library, const LearnerOptions& options);

}  // namespace learnact
