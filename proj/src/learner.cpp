#include "learnact/learner.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

namespace learnact {

double CandidateScore::p_succ() const {
  if (instance_count == 0) return 0.0;
  return static_cast<double>(successes) / static_cast<double>(instance_count);
}

double CandidateScore::p_stepacc() const {
  if (atomic_total == 0) return 0.0;
  return static_cast<double>(atomic_ok) / static_cast<double>(atomic_total);
}

double CandidateScore::mu() const {
  if (failed_sample) return -std::numeric_limits<double>::infinity();
  return p_succ() + p_stepacc();
}

int CandidateScore::compare(const CandidateScore& a, const CandidateScore& b) {
  if (a.failed_sample || b.failed_sample) {
    if (a.failed_sample && b.failed_sample) return 0;
    return a.failed_sample ? -1 : 1;
  }
  // mu = succ/M + ok/total; compare via cross multiplication so ties
  // are exact.
  using wide = __int128;
  wide am = static_cast<wide>(a.successes) * std::max(a.atomic_total, 1LL) +
            static_cast<wide>(a.atomic_ok) * a.instance_count;
  wide ad = static_cast<wide>(a.instance_count) * std::max(a.atomic_total, 1LL);
  wide bm = static_cast<wide>(b.successes) * std::max(b.atomic_total, 1LL) +
            static_cast<wide>(b.atomic_ok) * b.instance_count;
  wide bd = static_cast<wide>(b.instance_count) * std::max(b.atomic_total, 1LL);
  wide lhs = am * bd;
  wide rhs = bm * ad;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

std::string extract_code_fence(const std::string& completion) {
  size_t open = completion.find("```");
  if (open == std::string::npos) return "";
  size_t body = completion.find('\n', open);
  if (body == std::string::npos) return "";
  ++body;
  size_t close = completion.find("```", body);
  if (close == std::string::npos) return "";
  std::string code = completion.substr(body, close - body);
  while (!code.empty() && (code.back() == '\n' || code.back() == ' ')) code.pop_back();
  return code;
}

std::string extract_action_line(const std::string& completion) {
  std::string payload;
  size_t marker = completion.find("Action:");
  if (marker != std::string::npos) {
    size_t start = marker + 7;
    size_t end = completion.find('\n', start);
    payload = completion.substr(start, end == std::string::npos ? std::string::npos : end - start);
  } else {
    size_t start = 0;
    while (start < completion.size()) {
      size_t end = completion.find('\n', start);
      std::string line =
          completion.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        payload = line;
        break;
      }
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  size_t first = payload.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  size_t last = payload.find_last_not_of(" \t\r");
  return payload.substr(first, last - first + 1);
}

std::vector<std::pair<std::string, std::string>> split_functions(const std::string& code) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(code);
  std::string line;
  std::string current_name, current_source;
  auto flush = [&] {
    if (current_name.empty()) return;
    while (!current_source.empty() && current_source.back() == '\n') current_source.pop_back();
    out.emplace_back(current_name, current_source);
    current_name.clear();
    current_source.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("def ", 0) == 0) {
      flush();
      size_t name_start = 4;
      size_t name_end = line.find('(', name_start);
      if (name_end == std::string::npos) name_end = line.size();
      current_name = line.substr(name_start, name_end - name_start);
      while (!current_name.empty() && current_name.back() == ' ') current_name.pop_back();
    }
    if (!current_name.empty()) current_source += line + "\n";
  }
  flush();
  return out;
}

std::optional<Improvement> parse_improvement(const std::string& completion) {
  size_t marker = completion.find("Improve:");
  if (marker == std::string::npos) return std::nullopt;
  size_t eol = completion.find('\n', marker);
  std::string line = completion.substr(
      marker + 8, eol == std::string::npos ? std::string::npos : eol - marker - 8);
  auto strip = [](std::string s) {
    size_t first = s.find_first_not_of(" \t\r<>[]");
    if (first == std::string::npos) return std::string();
    size_t last = s.find_last_not_of(" \t\r<>[]");
    return s.substr(first, last - first + 1);
  };

  Improvement improvement;
  size_t update_pos = line.find("Update");
  size_t plan_pos = line.find("Plan");
  size_t note_pos = line.find("Note");
  if (update_pos != std::string::npos &&
      (plan_pos == std::string::npos || update_pos < plan_pos) &&
      (note_pos == std::string::npos || update_pos < note_pos)) {
    improvement.kind = Improvement::Kind::update;
    size_t colon = line.find(':', update_pos);
    if (colon != std::string::npos) improvement.target = strip(line.substr(colon + 1));
  } else if (plan_pos != std::string::npos || note_pos != std::string::npos) {
    // The learning prompt labels the non-code branch "Plan"; it means
    // note writing and both labels are accepted.
    improvement.kind = Improvement::Kind::note;
    size_t at = plan_pos != std::string::npos ? plan_pos : note_pos;
    size_t colon = line.find(':', at);
    if (colon != std::string::npos) improvement.target = strip(line.substr(colon + 1));
  } else {
    return std::nullopt;
  }

  size_t content = completion.find("Content:", marker);
  if (content != std::string::npos) {
    size_t start = content + 8;
    size_t end = completion.find("Test case:", start);
    if (end == std::string::npos) end = completion.size();
    std::string value = completion.substr(start, end - start);
    size_t first = value.find_first_not_of(" \t\r\n<");
    size_t last = value.find_last_not_of(" \t\r\n>");
    improvement.content =
        first == std::string::npos ? "" : value.substr(first, last - first + 1);
  }
  return improvement;
}

Learner::Learner(const DomainBundle& bundle, const PromptKit& prompts, ChatGateway& agent,
                 ChatGateway& learner_llm, LearnerOptions options)
    : bundle_(bundle),
      prompts_(prompts),
      agent_(agent),
      learner_llm_(learner_llm),
      options_(options) {
  if (options_.samples < 1) throw ValidationError("K must be >= 1");
  if (options_.maxiter < 1) throw ValidationError("maxiter must be >= 1");
}

std::string Learner::complete(ChatGateway& gateway, const RenderedPrompt& prompt) {
  ChatRequest request;
  request.messages = prompt.messages;
  request.temperature = 0.0;
  request.model = gateway.config().model;
  return gateway.complete(request);
}

Candidate Learner::build_candidate_from_code(const std::string& code,
                                             const std::string& digest) {
  Candidate candidate;
  candidate.request_digest = digest;
  if (code.empty()) {
    candidate.invalid = true;
    candidate.invalid_reason = "completion contains no code fence";
    return candidate;
  }
  try {
    for (auto& [name, source] : split_functions(code)) {
      ActionEntry entry;
      entry.name = name;
      entry.source = source;
      candidate.library.entries.push_back(std::move(entry));
    }
    candidate.library.validate(bundle_.domain);
    if (candidate.library.entries.empty()) {
      candidate.invalid = true;
      candidate.invalid_reason = "code fence defines no functions";
    }
  } catch (const Error& e) {
    candidate = Candidate{};
    candidate.request_digest = digest;
    candidate.invalid = true;
    candidate.invalid_reason = e.what();
  }
  return candidate;
}

void Learner::attach_instructions(ActionLibrary& library, const std::vector<std::string>& names) {
  for (const auto& name : names) {
    ActionEntry* entry = library.find(name);
    if (!entry) continue;
    auto description_prompt = prompts_.render_description(
        bundle_.instruction, bundle_.description_examples, entry->name, entry->source);
    entry->description = complete(learner_llm_, description_prompt);
    auto usage_prompt = prompts_.render_usage(bundle_.instruction, bundle_.format_instruction,
                                              bundle_.usage_examples_seed, entry->source);
    entry->usage_example = complete(learner_llm_, usage_prompt);
  }
}

std::vector<Candidate> Learner::action_creation() {
  std::vector<Candidate> candidates;
  for (int k = 0; k < options_.samples; ++k) {
    auto prompt = prompts_.render_creation(bundle_.instruction, bundle_.basic_action_example,
                                           bundle_.created_action_example);
    ChatRequest request;
    request.messages = prompt.messages;
    request.model = learner_llm_.config().model;
    std::string digest = ChatGateway::digest(request);
    std::string completion;
    try {
      completion = learner_llm_.complete(request);
    } catch (const GatewayError& e) {
      Candidate failed;
      failed.invalid = true;
      failed.invalid_reason = e.what();
      failed.request_digest = digest;
      candidates.push_back(std::move(failed));
      continue;
    }
    Candidate candidate = build_candidate_from_code(extract_code_fence(completion), digest);
    if (!candidate.invalid) {
      std::vector<std::string> names;
      for (const auto& entry : candidate.library.entries) names.push_back(entry.name);
      attach_instructions(candidate.library, names);
    }
    candidates.push_back(std::move(candidate));
  }
  if (std::all_of(candidates.begin(), candidates.end(),
                  [](const Candidate& c) { return c.invalid; })) {
    std::string digests;
    for (const auto& c : candidates) digests += (digests.empty() ? "" : ", ") + c.request_digest;
    throw Error("action creation failed: no sample parsed (request digests: " + digests + ")");
  }
  return candidates;
}

EpisodeRecord run_act_episode(const DomainBundle& bundle, const PromptKit& prompts,
                              ChatGateway& agent, const Instance& instance,
                              const ActionLibrary& library, const LearnerOptions& options) {
  library.validate(bundle.domain);
  dsl::Program program = library.compile();
  Episode episode(bundle.domain, instance, &program, EpisodeOptions{options.max_steps});
  Observation obs = episode.reset();
  std::string goal = "Goal: " + episode.goal_text();
  std::vector<HistoryStep> history;
  while (episode.active()) {
    auto prompt = prompts.render_agent(bundle.instruction, library.instructions_text(),
                                       library.usage_text(), goal, obs.text, history,
                                       options.max_prompt_chars);
    std::string completion;
    try {
      ChatRequest request;
      request.messages = prompt.messages;
      request.model = agent.config().model;
      completion = agent.complete(request);
    } catch (const GatewayError&) {
      break;  // backend failure fails this episode; reward stays 0
    }
    std::string action = extract_action_line(completion);
    StepResult result = episode.step(action);
    history.push_back({action, result.observation.text});
  }
  return episode.record();
}

EpisodeRecord Learner::solve_problem(const Instance& instance, const ActionLibrary& library) {
  return run_act_episode(bundle_, prompts_, agent_, instance, library, options_);
}

std::optional<FailureCase> Learner::select_error_case(
    const std::vector<EpisodeRecord>& records) const {
  std::vector<size_t> failing;
  for (size_t i = 0; i < records.size(); ++i) {
    bool any_error = false;
    for (const auto& step : records[i].steps)
      any_error = any_error || step.error_kind != StepErrorKind::none;
    if (records[i].reward != 1 || any_error) failing.push_back(i);
  }
  if (failing.empty()) return std::nullopt;

  size_t pick = failing.front();
  if (options_.random_error_case && failing.size() > 1) {
    std::mt19937_64 rng(options_.seed);
    pick = failing[rng() % failing.size()];
  }
  const EpisodeRecord& record = records[pick];

  FailureCase failure;
  failure.instance_id = record.instance_id;
  failure.record = record;
  // First learned-action error if one exists; otherwise the episode's
  // last step carries the failure.
  for (size_t s = 0; s < record.steps.size(); ++s) {
    const StepRecord& step = record.steps[s];
    if (step.learned_action && step.error_kind != StepErrorKind::none) {
      failure.step_index = static_cast<int>(s);
      failure.error_kind = step.error_kind;
      failure.learned_action = true;
      failure.action_name = step.parsed ? step.parsed->name : step.invocation_text;
      failure.sub_trace = step.sub_trace;
      return failure;
    }
  }
  failure.step_index = static_cast<int>(record.steps.size()) - 1;
  if (failure.step_index >= 0) {
    const StepRecord& step = record.steps[failure.step_index];
    failure.error_kind = step.error_kind;
    failure.action_name = step.parsed ? step.parsed->name : step.invocation_text;
    failure.learned_action = step.learned_action;
    if (step.learned_action) failure.sub_trace = step.sub_trace;
  }
  return failure;
}

namespace {

std::string render_trajectory(const EpisodeRecord& record, int up_to_step) {
  std::string out = "Observation: " + record.initial_observation;
  for (int i = 0; i <= up_to_step && i < static_cast<int>(record.steps.size()); ++i) {
    out += "\nAction: " + record.steps[i].invocation_text;
    out += "\nObservation: " + record.steps[i].observation;
  }
  return out;
}

std::string render_subprocess(const dsl::SubTrace& trace) {
  std::string out;
  for (const auto& step : trace.steps) {
    if (!out.empty()) out += "\n";
    out += "Action: " + step.action.invocation_text();
    out += "\nObservation: " + step.observation;
  }
  if (!trace.completed && trace.abort_index >= 0) {
    if (!out.empty()) out += "\n";
    out += "Execution aborted at atomic step " + std::to_string(trace.abort_index) + ": " +
           trace.abort_message;
  }
  return out;
}

std::string error_info_text(const FailureCase& failure) {
  if (failure.step_index < 0 || failure.record.steps.empty())
    return "the episode ended without solving the task";
  const StepRecord& step = failure.record.steps[failure.step_index];
  if (step.error_kind == StepErrorKind::none)
    return "the task was not solved within the step budget";
  std::string info = to_string(step.error_kind);
  if (!step.error_message.empty()) info += ": " + step.error_message;
  return info;
}

}  // namespace

std::vector<Candidate> Learner::action_learn(const ActionLibrary& library,
                                             const FailureCase& failure) {
  const Instance* instance = bundle_.find_instance(failure.instance_id);
  std::string goal_text = "Goal: ";
  if (instance) {
    Episode probe(bundle_.domain, *instance);
    probe.reset();
    goal_text += probe.goal_text();
  }

  std::vector<Candidate> candidates;
  for (int k = 0; k < options_.samples; ++k) {
    auto prompt = prompts_.render_learning(
        bundle_.instruction, goal_text, bundle_.basic_action_example, bundle_.learning_example,
        library.joint_source(), failure.action_name,
        render_trajectory(failure.record, failure.step_index), error_info_text(failure),
        render_subprocess(failure.sub_trace));
    ChatRequest request;
    request.messages = prompt.messages;
    request.model = learner_llm_.config().model;
    std::string digest = ChatGateway::digest(request);

    Candidate candidate;
    candidate.request_digest = digest;
    candidate.library = library;
    candidate.library.version = library.version + 1;

    std::string completion;
    try {
      completion = learner_llm_.complete(request);
    } catch (const GatewayError& e) {
      candidate.invalid = true;
      candidate.invalid_reason = e.what();
      candidates.push_back(std::move(candidate));
      continue;
    }

    auto improvement = parse_improvement(completion);
    if (!improvement) {
      // Unparseable improvement: keep the library unchanged and score
      // it honestly.
      candidates.push_back(std::move(candidate));
      continue;
    }

    if (improvement->kind == Improvement::Kind::note) {
      ActionEntry* entry = candidate.library.find(improvement->target);
      if (entry && !improvement->content.empty()) entry->notes.push_back(improvement->content);
      candidates.push_back(std::move(candidate));
      continue;
    }

    std::string code = extract_code_fence(completion);
    if (code.empty()) code = extract_code_fence(improvement->content);
    if (code.empty()) {
      candidates.push_back(std::move(candidate));
      continue;
    }
    ActionLibrary revised = candidate.library;
    std::vector<std::string> changed;
    for (auto& [name, source] : split_functions(code)) {
      if (ActionEntry* existing = revised.find(name)) {
        if (existing->source != source) {
          existing->source = source;
          changed.push_back(name);
        }
      } else {
        ActionEntry entry;
        entry.name = name;
        entry.source = source;
        revised.entries.push_back(std::move(entry));
        changed.push_back(name);
      }
    }
    try {
      revised.validate(bundle_.domain);
    } catch (const Error& e) {
      candidate.invalid = true;
      candidate.invalid_reason = e.what();
      candidates.push_back(std::move(candidate));
      continue;
    }
    candidate.library = std::move(revised);
    attach_instructions(candidate.library, changed);
    candidates.push_back(std::move(candidate));
  }
  return candidates;
}

CandidateScore Learner::score(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw ValidationError("score requires at least one episode record");
  CandidateScore s;
  s.instance_count = static_cast<long long>(records.size());
  for (const auto& record : records) {
    s.successes += record.reward == 1 ? 1 : 0;
    s.atomic_ok += record.atomic_ok;
    s.atomic_total += record.atomic_total;
  }
  return s;
}

TrainResult Learner::train(const std::vector<Instance>& train_instances, LearnState* progress) {
  if (train_instances.empty()) throw ValidationError("training set is empty");

  std::vector<Candidate> candidates = action_creation();
  TrainResult result;
  ActionLibrary chosen;
  for (int iteration = 1; iteration <= options_.maxiter; ++iteration) {
    std::vector<CandidateScore> scores(candidates.size());
    std::vector<std::vector<EpisodeRecord>> all_records(candidates.size());
    for (size_t k = 0; k < candidates.size(); ++k) {
      if (candidates[k].invalid) {
        scores[k].failed_sample = true;
        scores[k].instance_count = static_cast<long long>(train_instances.size());
        continue;
      }
      for (const auto& instance : train_instances)
        all_records[k].push_back(solve_problem(instance, candidates[k].library));
      scores[k] = score(all_records[k]);
    }

    size_t best = 0;
    for (size_t k = 1; k < candidates.size(); ++k)
      if (CandidateScore::compare(scores[k], scores[best]) > 0) best = k;
    if (candidates[best].invalid)
      throw Error("every candidate in iteration " + std::to_string(iteration) + " is invalid");

    chosen = candidates[best].library;

    IterationLog log;
    log.iteration = iteration;
    log.scores = scores;
    log.chosen_index = static_cast<int>(best);
    log.chosen_mu = scores[best].mu();

    auto failure = select_error_case(all_records[best]);
    if (!failure) {
      log.stopped_clean = true;
      result.state.iterations.push_back(log);
      if (progress) progress->iterations.push_back(std::move(log));
      break;
    }
    log.failure_instance = failure->instance_id;
    log.failure_action = failure->action_name;
    result.state.iterations.push_back(log);
    if (progress) progress->iterations.push_back(std::move(log));

    if (iteration == options_.maxiter) break;
    candidates = action_learn(chosen, *failure);
  }

  chosen.provenance.iterations = static_cast<int>(result.state.iterations.size());
  chosen.provenance.scores.clear();
  for (const auto& log : result.state.iterations) chosen.provenance.scores.push_back(log.chosen_mu);
  result.library = std::move(chosen);
  return result;
}

}  // namespace learnact
