#include "learnact/harness.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "learnact/util.hpp"

namespace learnact {

using nlohmann::json;

namespace {

std::vector<ScriptItem> load_script(const std::filesystem::path& path, bool* strict) {
  json j = json::parse(read_file(path));
  if (strict) *strict = j.value("strict", true);
  std::vector<ScriptItem> items;
  for (const auto& item : j.at("items")) {
    ScriptItem s;
    s.expect = item.value("expect", "");
    s.match_suffix = item.value("suffix", false);
    s.response = item.at("response").get<std::string>();
    s.times = item.value("times", 1);
    items.push_back(std::move(s));
  }
  return items;
}

void apply_backend_key(BackendConfig& backend, const std::string& key, const std::string& value,
                       std::string* script_path) {
  if (key == "backend")
    backend.kind = backend_kind_from_string(value);
  else if (key == "endpoint")
    backend.endpoint = value;
  else if (key == "path")
    backend.path = value;
  else if (key == "model")
    backend.model = value;
  else if (key == "credential_env")
    backend.credential_env = value;
  else if (key == "cache_dir")
    backend.cache_dir = value;
  else if (key == "script")
    *script_path = value;
  else if (key == "max_attempts")
    backend.retry.max_attempts = std::stoi(value);
  else
    throw ValidationError("unknown backend config key '" + key + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (domain_dir.empty()) throw ValidationError("config requires a domain directory");
  if (train_size < 1) throw ValidationError("train_size must be >= 1");
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (maxiter < 1) throw ValidationError("maxiter must be >= 1");
  if (repetitions < 1) throw ValidationError("repetitions must be >= 1");
  agent.validate();
  learner.validate();
}

json ExperimentConfig::to_json() const {
  json j;
  j["domain"] = domain_dir;
  j["instances"] = instances_dir;
  j["seed"] = seed;
  j["train_size"] = train_size;
  j["samples"] = samples;
  j["maxiter"] = maxiter;
  j["max_steps"] = max_steps;
  j["repetitions"] = repetitions;
  j["max_prompt_chars"] = max_prompt_chars;
  j["out"] = out_dir;
  j["templates_dir"] = templates_dir;
  auto backend_json = [](const BackendConfig& b) {
    return json{{"kind", to_string(b.kind)},
                {"endpoint", b.endpoint},
                {"path", b.path},
                {"model", b.model},
                {"credential_env", b.credential_env},
                {"cache_dir", b.cache_dir}};
  };
  j["agent"] = backend_json(agent);
  j["learner"] = backend_json(learner);
  return j;
}

std::string ExperimentConfig::digest() const { return sha256_hex(to_json().dump()); }

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::string agent_script, learner_script;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    size_t eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", number, 1);
    auto trim = [](std::string s) {
      size_t first = s.find_first_not_of(" \t\r");
      if (first == std::string::npos) return std::string();
      size_t last = s.find_last_not_of(" \t\r");
      return s.substr(first, last - first + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key.rfind("agent.", 0) == 0)
      apply_backend_key(config.agent, key.substr(6), value, &agent_script);
    else if (key.rfind("learner.", 0) == 0)
      apply_backend_key(config.learner, key.substr(8), value, &learner_script);
    else if (key == "domain")
      config.domain_dir = value;
    else if (key == "instances")
      config.instances_dir = value;
    else if (key == "seed")
      config.seed = std::stoull(value);
    else if (key == "train_size")
      config.train_size = std::stoi(value);
    else if (key == "samples")
      config.samples = std::stoi(value);
    else if (key == "maxiter")
      config.maxiter = std::stoi(value);
    else if (key == "max_steps")
      config.max_steps = std::stoi(value);
    else if (key == "repetitions")
      config.repetitions = std::stoi(value);
    else if (key == "max_prompt_chars")
      config.max_prompt_chars = std::stoull(value);
    else if (key == "out")
      config.out_dir = value;
    else if (key == "templates_dir")
      config.templates_dir = value;
    else
      throw ValidationError("unknown config key '" + key + "' (line " + std::to_string(number) +
                            ")");
  }
  if (!agent_script.empty()) config.agent.script = load_script(agent_script, &config.agent.script_strict);
  if (!learner_script.empty())
    config.learner.script = load_script(learner_script, &config.learner.script_strict);
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_file(path));
}

DatasetSplit split_dataset(const std::vector<Instance>& instances, unsigned long long seed,
                           int train_size) {
  if (train_size >= static_cast<int>(instances.size()))
    throw ValidationError("train_size (" + std::to_string(train_size) +
                          ") must be smaller than the instance count (" +
                          std::to_string(instances.size()) + ")");
  std::vector<std::string> ids;
  ids.reserve(instances.size());
  for (const auto& inst : instances) ids.push_back(inst.id);
  // Pinned Fisher-Yates so splits are stable across standard libraries.
  std::mt19937_64 rng(seed);
  for (size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng() % i]);
  DatasetSplit split;
  split.train_ids.assign(ids.begin(), ids.begin() + train_size);
  split.test_ids.assign(ids.begin() + train_size, ids.end());
  return split;
}

namespace {

struct LoadedExperiment {
  DomainBundle bundle;
  PromptKit prompts;
  DatasetSplit split;
};

LoadedExperiment load_experiment(const ExperimentConfig& config) {
  LoadedExperiment exp{load_bundle(config.domain_dir),
                       config.templates_dir.empty()
                           ? PromptKit::builtin()
                           : PromptKit::from_directory(config.templates_dir),
                       {}};
  if (!config.instances_dir.empty()) {
    exp.bundle.instances.clear();
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(config.instances_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      Instance inst;
      inst.id = path.stem().string();
      inst.state = parse_instance(read_file(path), exp.bundle.domain);
      exp.bundle.instances.push_back(std::move(inst));
    }
  }
  exp.split = split_dataset(exp.bundle.instances, config.seed, config.train_size);
  return exp;
}

BackendConfig with_default_cache(BackendConfig backend, const std::filesystem::path& out_dir,
                                 const std::string& role) {
  if (backend.cache_dir.empty() && backend.kind != BackendKind::replay)
    backend.cache_dir = (out_dir / "cache" / role).string();
  return backend;
}

std::vector<UsageStat> usage_from_records(const std::vector<EpisodeRecord>& records) {
  std::map<std::string, UsageStat> stats;
  for (const auto& record : records) {
    for (const auto& step : record.steps) {
      if (!step.learned_action || !step.parsed) continue;
      UsageStat& s = stats[step.parsed->name];
      s.action = step.parsed->name;
      s.invocations += 1;
      s.valid_invocations += step.valid ? 1 : 0;
    }
  }
  std::vector<UsageStat> out;
  for (auto& [name, s] : stats) out.push_back(s);
  return out;
}

json usage_to_json(const std::vector<UsageStat>& usage) {
  json out = json::array();
  for (const auto& s : usage)
    out.push_back({{"action", s.action},
                   {"invocations", s.invocations},
                   {"valid_invocations", s.valid_invocations}});
  return out;
}

std::vector<UsageStat> usage_from_json(const json& j) {
  std::vector<UsageStat> out;
  for (const auto& item : j) {
    UsageStat s;
    s.action = item.at("action").get<std::string>();
    s.invocations = item.at("invocations").get<long long>();
    s.valid_invocations = item.at("valid_invocations").get<long long>();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TrainRunResult run_train(const ExperimentConfig& config) {
  config.validate();
  LoadedExperiment exp = load_experiment(config);
  std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  ChatGateway agent(with_default_cache(config.agent, out_dir, "agent"));
  ChatGateway learner_llm(with_default_cache(config.learner, out_dir, "learner"));

  std::vector<Instance> train_instances;
  for (const auto& id : exp.split.train_ids) train_instances.push_back(*exp.bundle.find_instance(id));

  LearnerOptions options;
  options.samples = config.samples;
  options.maxiter = config.maxiter;
  options.max_steps = config.max_steps;
  options.max_prompt_chars = config.max_prompt_chars;
  Learner learner(exp.bundle, exp.prompts, agent, learner_llm, options);

  TrainRunResult out;
  out.library_path = out_dir / "library.json";
  out.state_path = out_dir / "learn_state.json";

  LearnState progress;
  auto state_json = [&](bool aborted, const std::string& error) {
    json j;
    j["schema_version"] = 1;
    j["domain"] = exp.bundle.name;
    j["config_digest"] = config.digest();
    j["train_ids"] = exp.split.train_ids;
    j["aborted"] = aborted;
    if (!error.empty()) j["error"] = error;
    json iterations = json::array();
    for (const auto& log : progress.iterations) {
      json scores = json::array();
      for (const auto& s : log.scores)
        scores.push_back({{"p_succ", s.p_succ()},
                          {"p_stepacc", s.p_stepacc()},
                          {"mu", s.failed_sample ? json() : json(s.mu())},
                          {"failed_sample", s.failed_sample}});
      iterations.push_back({{"iteration", log.iteration},
                            {"scores", scores},
                            {"chosen_index", log.chosen_index},
                            {"chosen_mu", log.chosen_mu},
                            {"stopped_clean", log.stopped_clean},
                            {"failure_instance", log.failure_instance},
                            {"failure_action", log.failure_action}});
    }
    j["iterations"] = iterations;
    j["agent_calls"] = agent.calls_total();
    j["learner_calls"] = learner_llm.calls_total();
    return j;
  };

  try {
    out.result = learner.train(train_instances, &progress);
  } catch (const Error& e) {
    // Keep the partial history around for postmortems.
    write_file_atomic(out.state_path, state_json(true, e.what()).dump(2) + "\n");
    throw;
  }
  out.result.library.save(out.library_path, exp.bundle.name);
  write_file_atomic(out.state_path, state_json(false, "").dump(2) + "\n");
  return out;
}

RunReport run_test(const ExperimentConfig& config, const std::filesystem::path& library_path) {
  config.validate();
  LoadedExperiment exp = load_experiment(config);
  std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  ActionLibrary library = ActionLibrary::load(library_path);
  library.validate(exp.bundle.domain, /*require_descriptions=*/true);

  ChatGateway agent(with_default_cache(config.agent, out_dir, "agent_test"));
  // Deterministic repetitions are pointless under replay.
  int repetitions = config.agent.kind == BackendKind::replay ? 1 : config.repetitions;

  LearnerOptions options;
  options.max_steps = config.max_steps;
  options.max_prompt_chars = config.max_prompt_chars;

  RunReport report;
  report.domain = exp.bundle.name;
  report.config_digest = config.digest();
  report.library_version = library.version;
  report.test_ids = exp.split.test_ids;

  double success_sum = 0.0, accuracy_sum = 0.0;
  std::map<std::string, UsageStat> totals;
  for (int rep = 1; rep <= repetitions; ++rep) {
    std::vector<EpisodeRecord> records;
    for (const auto& id : exp.split.test_ids) {
      const Instance* instance = exp.bundle.find_instance(id);
      if (!instance) throw ValidationError("unknown test instance '" + id + "'");
      records.push_back(
          run_act_episode(exp.bundle, exp.prompts, agent, *instance, library, options));
    }
    RepetitionReport rr;
    rr.repetition = rep;
    rr.episodes = static_cast<long long>(records.size());
    double acc = 0.0;
    for (const auto& record : records) {
      rr.successes += record.reward == 1 ? 1 : 0;
      acc += step_accuracy(record);
    }
    rr.mean_step_accuracy = records.empty() ? 0.0 : acc / static_cast<double>(records.size());
    rr.usage = usage_from_records(records);
    for (const auto& s : rr.usage) {
      UsageStat& t = totals[s.action];
      t.action = s.action;
      t.invocations += s.invocations;
      t.valid_invocations += s.valid_invocations;
    }
    success_sum += rr.episodes == 0
                       ? 0.0
                       : static_cast<double>(rr.successes) / static_cast<double>(rr.episodes);
    accuracy_sum += rr.mean_step_accuracy;
    report.repetitions.push_back(std::move(rr));
  }
  report.success_rate = success_sum / static_cast<double>(repetitions);
  report.mean_step_accuracy = accuracy_sum / static_cast<double>(repetitions);
  for (auto& [name, s] : totals) report.usage_totals.push_back(s);

  write_file_atomic(out_dir / "report.json", report.to_json().dump(2) + "\n");
  write_file_atomic(out_dir / "report.txt", report.table());
  return report;
}

json RunReport::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["domain"] = domain;
  j["config_digest"] = config_digest;
  j["library_version"] = library_version;
  j["test_ids"] = test_ids;
  j["success_rate"] = success_rate;
  j["mean_step_accuracy"] = mean_step_accuracy;
  json reps = json::array();
  for (const auto& rr : repetitions)
    reps.push_back({{"repetition", rr.repetition},
                    {"successes", rr.successes},
                    {"episodes", rr.episodes},
                    {"mean_step_accuracy", rr.mean_step_accuracy},
                    {"usage", usage_to_json(rr.usage)}});
  j["repetitions"] = reps;
  j["usage_totals"] = usage_to_json(usage_totals);
  return j;
}

RunReport RunReport::from_json(const json& j) {
  RunReport report;
  report.domain = j.at("domain").get<std::string>();
  report.config_digest = j.value("config_digest", "");
  report.library_version = j.value("library_version", 0);
  for (const auto& id : j.value("test_ids", json::array()))
    report.test_ids.push_back(id.get<std::string>());
  report.success_rate = j.at("success_rate").get<double>();
  report.mean_step_accuracy = j.at("mean_step_accuracy").get<double>();
  for (const auto& rep : j.value("repetitions", json::array())) {
    RepetitionReport rr;
    rr.repetition = rep.at("repetition").get<int>();
    rr.successes = rep.at("successes").get<long long>();
    rr.episodes = rep.at("episodes").get<long long>();
    rr.mean_step_accuracy = rep.at("mean_step_accuracy").get<double>();
    rr.usage = usage_from_json(rep.value("usage", json::array()));
    report.repetitions.push_back(std::move(rr));
  }
  report.usage_totals = usage_from_json(j.value("usage_totals", json::array()));
  return report;
}

std::string RunReport::table() const {
  std::ostringstream out;
  out << "domain: " << domain << "  library v" << library_version << "\n";
  out << "test instances: " << test_ids.size() << "  repetitions: " << repetitions.size() << "\n";
  out << std::fixed << std::setprecision(4);
  out << "success rate:       " << success_rate << "\n";
  out << "mean step accuracy: " << mean_step_accuracy << "\n";
  out << "\nrep  successes/episodes  step_acc\n";
  for (const auto& rr : repetitions) {
    out << std::setw(3) << rr.repetition << "  " << std::setw(9) << rr.successes << "/"
        << rr.episodes << std::setw(12) << rr.mean_step_accuracy << "\n";
  }
  out << "\nlearned-action usage (all repetitions)\n";
  if (usage_totals.empty()) out << "  (none)\n";
  for (const auto& s : usage_totals) {
    double accuracy = s.invocations == 0 ? 0.0
                                         : static_cast<double>(s.valid_invocations) /
                                               static_cast<double>(s.invocations);
    out << "  " << s.action << ": " << s.invocations << " invocation(s), " << s.valid_invocations
        << " valid (" << accuracy << ")\n";
  }
  return out.str();
}

std::string compare_reports(const RunReport& before, const RunReport& after) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "before: library v" << before.library_version << "  success " << before.success_rate
      << "\n";
  out << "after:  library v" << after.library_version << "  success " << after.success_rate
      << "\n\n";
  std::map<std::string, std::pair<UsageStat, UsageStat>> merged;
  for (const auto& s : before.usage_totals) merged[s.action].first = s;
  for (const auto& s : after.usage_totals) merged[s.action].second = s;
  out << "action usage (invocations, accuracy): before -> after\n";
  auto ratio = [](const UsageStat& s) {
    return s.invocations == 0 ? 0.0
                              : static_cast<double>(s.valid_invocations) /
                                    static_cast<double>(s.invocations);
  };
  for (const auto& [name, pair] : merged) {
    out << "  " << name << ": " << pair.first.invocations << " (" << ratio(pair.first) << ") -> "
        << pair.second.invocations << " (" << ratio(pair.second) << ")\n";
  }
  return out.str();
}

}  // namespace learnact
