// learnact command-line front end. Talks to the core exclusively
// through the C API in learnact.h.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "learnact.h"

namespace {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

[[noreturn]] void fail(const std::string& context) {
  std::cerr << "error: " << context;
  const char* detail = la_last_error();
  if (detail && *detail) std::cerr << ": " << detail;
  std::cerr << "\n";
  std::exit(1);
}

// Returned strings from the C API, RAII-released.
struct CString {
  char* value = nullptr;
  ~CString() { la_string_free(value); }
  std::string str() const { return value ? value : ""; }
};

struct CommonOptions {
  std::string config_path;
  std::string domain;
  std::string instances;
  std::optional<unsigned long long> seed;
  std::optional<int> train_size;
  std::optional<int> samples;
  std::optional<int> maxiter;
  std::optional<int> max_steps;
  std::optional<int> repetitions;
  std::string backend;
  std::string cache_dir;
  std::string out_dir;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (key = value lines)");
    cmd->add_option("--domain", domain, "domain bundle directory");
    cmd->add_option("--instances", instances, "instance directory override");
    cmd->add_option("--seed", seed, "split seed");
    cmd->add_option("--train-size", train_size, "training instances M");
    cmd->add_option("--samples", samples, "sampling number K");
    cmd->add_option("--maxiter", maxiter, "maximum learning iterations");
    cmd->add_option("--max-steps", max_steps, "episode step budget");
    cmd->add_option("--repetitions", repetitions, "test repetitions");
    cmd->add_option("--backend", backend, "backend kind for both roles: live|replay|scripted");
    cmd->add_option("--cache-dir", cache_dir, "response cache directory for both roles");
    cmd->add_option("--out", out_dir, "output directory");
  }

  // Flag overrides are appended to the config text; later assignments
  // win in the config format.
  std::string config_text() const {
    std::string text;
    if (!config_path.empty()) text = read_text_file(config_path);
    std::ostringstream extra;
    extra << "\n";
    if (!domain.empty()) extra << "domain = " << domain << "\n";
    if (!instances.empty()) extra << "instances = " << instances << "\n";
    if (seed) extra << "seed = " << *seed << "\n";
    if (train_size) extra << "train_size = " << *train_size << "\n";
    if (samples) extra << "samples = " << *samples << "\n";
    if (maxiter) extra << "maxiter = " << *maxiter << "\n";
    if (max_steps) extra << "max_steps = " << *max_steps << "\n";
    if (repetitions) extra << "repetitions = " << *repetitions << "\n";
    if (!backend.empty()) {
      extra << "agent.backend = " << backend << "\n";
      extra << "learner.backend = " << backend << "\n";
    }
    if (!cache_dir.empty()) {
      extra << "agent.cache_dir = " << cache_dir << "/agent\n";
      extra << "learner.cache_dir = " << cache_dir << "/learner\n";
    }
    if (!out_dir.empty()) extra << "out = " << out_dir << "\n";
    return text + extra.str();
  }
};

int cmd_split(const CommonOptions& options) {
  CString out;
  if (la_split(options.config_text().c_str(), &out.value) != LA_OK) fail("split failed");
  std::cout << out.str() << "\n";
  return 0;
}

int cmd_train(const CommonOptions& options) {
  CString out;
  if (la_run_train(options.config_text().c_str(), &out.value) != LA_OK) fail("train failed");
  std::cout << out.str() << "\n";
  return 0;
}

int cmd_test(const CommonOptions& options, const std::string& library_path) {
  CString out;
  if (la_run_test(options.config_text().c_str(), library_path.c_str(), &out.value) != LA_OK)
    fail("test failed");
  std::cout << out.str() << "\n";
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& compare_path) {
  std::string report_json = read_text_file(report_path);
  CString out;
  if (compare_path.empty()) {
    if (la_report_table(report_json.c_str(), &out.value) != LA_OK) fail("report failed");
  } else {
    std::string before_json = read_text_file(compare_path);
    if (la_report_compare(before_json.c_str(), report_json.c_str(), &out.value) != LA_OK)
      fail("report comparison failed");
  }
  std::cout << out.str();
  return 0;
}

int cmd_replay_verify(const CommonOptions& options, const std::string& library_path) {
  auto run_once = [&](const std::string& suffix, std::string* library_out) {
    CommonOptions run = options;
    run.backend = "replay";
    std::string base_out = options.out_dir.empty() ? "runs/replay_verify" : options.out_dir;
    run.out_dir = base_out + suffix;
    CString train_out;
    if (la_run_train(run.config_text().c_str(), &train_out.value) != LA_OK)
      fail("replay train failed");
    *library_out = run.out_dir + "/library.json";
    CString test_out;
    if (la_run_test(run.config_text().c_str(), library_out->c_str(), &test_out.value) != LA_OK)
      fail("replay test failed");
    return run.out_dir;
  };
  (void)library_path;
  std::string lib_a, lib_b;
  std::string dir_a = run_once("/a", &lib_a);
  std::string dir_b = run_once("/b", &lib_b);
  bool same_library = read_text_file(lib_a) == read_text_file(lib_b);
  bool same_report =
      read_text_file(dir_a + "/report.json") == read_text_file(dir_b + "/report.json");
  std::cout << "library identical: " << (same_library ? "yes" : "NO") << "\n";
  std::cout << "report identical:  " << (same_report ? "yes" : "NO") << "\n";
  if (!same_library || !same_report) {
    std::cerr << "replay-verify: outputs differ between runs\n";
    return 1;
  }
  return 0;
}

// Replays a plan file and prints the canonical Goal/Observation/Action
// transcript; also how the bundled example transcripts are produced.
int cmd_walkthrough(const std::string& domain_path, const std::string& instance_path,
                    const std::string& plan_path, int max_steps) {
  fs::path domain_file(domain_path);
  if (fs::is_directory(domain_file)) domain_file /= "domain.txt";

  la_domain* domain = nullptr;
  if (la_domain_load(domain_file.string().c_str(), &domain) != LA_OK) fail("cannot load domain");
  la_instance* instance = nullptr;
  if (la_instance_load(domain, instance_path.c_str(), &instance) != LA_OK)
    fail("cannot load instance");
  la_env* env = nullptr;
  if (la_env_create(domain, instance, nullptr, max_steps, &env) != LA_OK)
    fail("cannot create environment");

  CString reset_json;
  if (la_env_reset(env, &reset_json.value) != LA_OK) fail("reset failed");
  CString goal_text;
  if (la_env_goal_text(env, &goal_text.value) != LA_OK) fail("goal rendering failed");
  std::cout << "Goal: " << goal_text.str() << "\n";

  // Minimal JSON field scraping; responses are flat one-level objects.
  auto field = [](const std::string& json_text, const std::string& name) {
    std::string marker = "\"" + name + "\":\"";
    size_t start = json_text.find(marker);
    if (start == std::string::npos) return std::string();
    start += marker.size();
    std::string out;
    for (size_t i = start; i < json_text.size() && json_text[i] != '"'; ++i) {
      if (json_text[i] == '\\' && i + 1 < json_text.size()) ++i;
      out += json_text[i];
    }
    return out;
  };

  std::istringstream plan(read_text_file(plan_path));
  std::cout << "Observation: " << field(reset_json.str(), "text") << "\n";
  std::string line;
  while (std::getline(plan, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    size_t last = line.find_last_not_of(" \t\r");
    std::string invocation = line.substr(first, last - first + 1);
    CString step_json;
    if (la_env_step(env, invocation.c_str(), &step_json.value) != LA_OK) fail("step failed");
    std::cout << "Action: " << invocation << "\n";
    std::cout << "Observation: " << field(step_json.str(), "text") << "\n";
  }
  la_env_free(env);
  la_instance_free(instance);
  la_domain_free(domain);
  return 0;
}

int cmd_serve_env(const std::string& domain_path, const std::string& instance_path,
                  const std::string& library_path, int max_steps) {
  fs::path domain_file(domain_path);
  if (fs::is_directory(domain_file)) domain_file /= "domain.txt";

  la_domain* domain = nullptr;
  if (la_domain_load(domain_file.string().c_str(), &domain) != LA_OK)
    fail("cannot load domain");
  la_instance* instance = nullptr;
  if (la_instance_load(domain, instance_path.c_str(), &instance) != LA_OK)
    fail("cannot load instance");
  la_library* library = nullptr;
  if (!library_path.empty() && la_library_load(library_path.c_str(), &library) != LA_OK)
    fail("cannot load library");

  la_env* env = nullptr;
  if (la_env_create(domain, instance, library, max_steps, &env) != LA_OK)
    fail("cannot create environment");
  la_status status = la_env_serve_stdio(env);
  la_env_free(env);
  la_library_free(library);
  la_instance_free(instance);
  la_domain_free(domain);
  if (status != LA_OK) fail("serve-env failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("learnact ") + la_version() +
               " - open-action learning for planning agents"};
  app.require_subcommand(1);

  CommonOptions options;

  auto* split = app.add_subcommand("split", "print the seeded train/test split");
  options.add_flags(split);

  auto* train = app.add_subcommand("train", "run the learning loop and persist the library");
  options.add_flags(train);

  std::string library_path;
  auto* test = app.add_subcommand("test", "evaluate a learned library on the test split");
  options.add_flags(test);
  test->add_option("--library", library_path, "library JSON path")->required();

  std::string report_path, compare_path;
  auto* report = app.add_subcommand("report", "render a report (or compare two)");
  report->add_option("report", report_path, "report JSON path")->required();
  report->add_option("--compare", compare_path, "earlier report to diff against");

  auto* verify = app.add_subcommand("replay-verify",
                                    "run train+test twice in replay mode and compare bytes");
  options.add_flags(verify);

  std::string serve_domain, serve_instance, serve_library;
  int serve_max_steps = 40;
  auto* serve = app.add_subcommand("serve-env", "serve one environment over stdio");
  serve->add_option("--domain", serve_domain, "domain file or bundle directory")->required();
  serve->add_option("--instance", serve_instance, "instance file")->required();
  serve->add_option("--library", serve_library, "optional library JSON");
  serve->add_option("--max-steps", serve_max_steps, "episode step budget");

  std::string walk_domain, walk_instance, walk_plan;
  int walk_max_steps = 100;
  auto* walk = app.add_subcommand("walkthrough", "replay a plan file and print the transcript");
  walk->add_option("--domain", walk_domain, "domain file or bundle directory")->required();
  walk->add_option("--instance", walk_instance, "instance file")->required();
  walk->add_option("--plan", walk_plan, "plan file (one invocation per line)")->required();
  walk->add_option("--max-steps", walk_max_steps, "episode step budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (split->parsed()) return cmd_split(options);
    if (train->parsed()) return cmd_train(options);
    if (test->parsed()) return cmd_test(options, library_path);
    if (report->parsed()) return cmd_report(report_path, compare_path);
    if (verify->parsed()) return cmd_replay_verify(options, library_path);
    if (serve->parsed())
      return cmd_serve_env(serve_domain, serve_instance, serve_library, serve_max_steps);
    if (walk->parsed())
      return cmd_walkthrough(walk_domain, walk_instance, walk_plan, walk_max_steps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
