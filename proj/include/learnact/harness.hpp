#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "learnact/bundle.hpp"
#include "learnact/gateway.hpp"
#include "learnact/learner.hpp"

namespace learnact {

/// Full experiment configuration; parsed from a key = value config file
/// with CLI flag overrides (see docs/config_format.md).
struct ExperimentConfig {
  std::string domain_dir;
  std::string instances_dir;  // optional override of <domain_dir>/instances
  unsigned long long seed = 7;
  int train_size = 3;  // M
  int samples = 4;     // K
  int maxiter = 3;
  int max_steps = 40;
  int repetitions = 3;
  size_t max_prompt_chars = 0;
  std::string out_dir = "runs/out";
  std::string templates_dir;  // optional prompt template override
  BackendConfig agent;
  BackendConfig learner;

  void validate() const;
  /// Digest over the canonical JSON form; stamped into reports.
  std::string digest() const;
  nlohmann::json to_json() const;
};

ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Seeded uniform shuffle (pinned Fisher-Yates, stable across
/// platforms); first M instances train, the rest test.
struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};
DatasetSplit split_dataset(const std::vector<Instance>& instances, unsigned long long seed,
                           int train_size);

/// Per-action usage statistics for the report.
struct UsageStat {
  std::string action;
  long long invocations = 0;
  long long valid_invocations = 0;
};

struct RepetitionReport {
  int repetition = 0;
  long long successes = 0;
  long long episodes = 0;
  double mean_step_accuracy = 0.0;
  std::vector<UsageStat> usage;
};

struct RunReport {
  std::string domain;
  std::string config_digest;
  int library_version = 0;
  std::vector<std::string> test_ids;
  double success_rate = 0.0;        // averaged over repetitions
  double mean_step_accuracy = 0.0;  // averaged over repetitions
  std::vector<RepetitionReport> repetitions;
  std::vector<UsageStat> usage_totals;

  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& j);
  /// Human-readable table.
  std::string table() const;
};

struct TrainRunResult {
  std::filesystem::path library_path;
  std::filesystem::path state_path;
  TrainResult result;
};

/// Runs learner.train on the config's training split and persists the
/// library JSON plus the per-iteration score table under out_dir.
TrainRunResult run_train(const ExperimentConfig& config);

/// Evaluates a frozen library on the test split; writes report JSON and
/// the human table under out_dir.
RunReport run_test(const ExperimentConfig& config, const std::filesystem::path& library_path);

/// Side-by-side usage comparison of two reports (library versions
/// before/after learning).
std::string compare_reports(const RunReport& before, const RunReport& after);

}  // namespace learnact
