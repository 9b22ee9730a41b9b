#include "learnact.h"

#include <cstring>
#include <iostream>
#include <memory>
#include <string>

#include "json.hpp"
#include "learnact/bundle.hpp"
#include "learnact/env_adapter.hpp"
#include "learnact/episode.hpp"
#include "learnact/harness.hpp"
#include "learnact/library.hpp"
#include "learnact/util.hpp"

using nlohmann::json;

struct la_domain {
  learnact::DomainDefinition def;
};

struct la_instance {
  learnact::Instance inst;
};

struct la_library {
  learnact::ActionLibrary lib;
};

// The env owns copies of everything the episode references, so handle
// lifetimes are independent of each other.
struct la_env {
  learnact::DomainDefinition domain;
  learnact::Instance instance;
  learnact::dsl::Program program;
  std::unique_ptr<learnact::Episode> episode;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

la_status classify(const std::exception& e) {
  if (dynamic_cast<const learnact::ParseError*>(&e)) return LA_ERR_PARSE;
  if (dynamic_cast<const learnact::ValidationError*>(&e)) return LA_ERR_VALIDATION;
  if (dynamic_cast<const learnact::StateError*>(&e)) return LA_ERR_STATE;
  if (dynamic_cast<const learnact::IoError*>(&e)) return LA_ERR_IO;
  if (dynamic_cast<const learnact::GatewayError*>(&e)) return LA_ERR_BACKEND;
  if (dynamic_cast<const learnact::Error*>(&e)) return LA_ERR_INTERNAL;
  return LA_ERR_INTERNAL;
}

template <typename Fn>
la_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return classify(e);
  } catch (...) {
    g_last_error = "unknown error";
    return LA_ERR_INTERNAL;
  }
}

la_status require(bool condition, const char* message) {
  if (condition) return LA_OK;
  g_last_error = message;
  return LA_ERR_INVALID_ARG;
}

json observation_json(const learnact::Observation& obs) {
  return json{{"text", obs.text}, {"valid", obs.valid}, {"done", obs.done}};
}

json record_json(const learnact::EpisodeRecord& record) {
  json steps = json::array();
  for (const auto& step : record.steps) {
    steps.push_back({{"invocation", step.invocation_text},
                     {"valid", step.valid},
                     {"done", step.done},
                     {"error_kind", learnact::to_string(step.error_kind)},
                     {"learned_action", step.learned_action},
                     {"observation", step.observation},
                     {"atomic_steps", step.sub_trace.steps.size()}});
  }
  return json{{"instance", record.instance_id},
              {"initial_observation", record.initial_observation},
              {"reward", record.reward},
              {"atomic_total", record.atomic_total},
              {"atomic_ok", record.atomic_ok},
              {"step_accuracy", learnact::step_accuracy(record)},
              {"steps", steps}};
}

}  // namespace

extern "C" {

const char* la_version(void) { return "0.1.0"; }

const char* la_last_error(void) { return g_last_error.c_str(); }

void la_string_free(char* s) { std::free(s); }

la_status la_domain_parse(const char* text, la_domain** out) {
  if (require(text && out, "text and out must be non-null") != LA_OK) return LA_ERR_INVALID_ARG;
  return guarded([&] {
    auto handle = std::make_unique<la_domain>();
    handle->def = learnact::parse_domain(text);
    *out = handle.release();
    return LA_OK;
  });
}

la_status la_domain_load(const char* path, la_domain** out) {
  if (require(path && out, "path and out must be non-null") != LA_OK) return LA_ERR_INVALID_ARG;
  return guarded([&] {
    auto handle = std::make_unique<la_domain>();
    handle->def = learnact::parse_domain(learnact::read_file(path));
    *out = handle.release();
    return LA_OK;
  });
}

void la_domain_free(la_domain* domain) { delete domain; }

const char* la_domain_name(const la_domain* domain) {
  return domain ? domain->def.name.c_str() : "";
}

int la_domain_schema_count(const la_domain* domain) {
  return domain ? static_cast<int>(domain->def.schemas.size()) : 0;
}

la_status la_instance_parse(const la_domain* domain, const char* text, const char* id,
                            la_instance** out) {
  if (require(domain && text && out, "domain, text and out must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    auto handle = std::make_unique<la_instance>();
    handle->inst.id = id ? id : "instance";
    handle->inst.state = learnact::parse_instance(text, domain->def);
    *out = handle.release();
    return LA_OK;
  });
}

la_status la_instance_load(const la_domain* domain, const char* path, la_instance** out) {
  if (require(domain && path && out, "domain, path and out must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    auto handle = std::make_unique<la_instance>();
    handle->inst.id = std::filesystem::path(path).stem().string();
    handle->inst.state = learnact::parse_instance(learnact::read_file(path), domain->def);
    *out = handle.release();
    return LA_OK;
  });
}

void la_instance_free(la_instance* instance) { delete instance; }

la_status la_library_load(const char* path, la_library** out) {
  if (require(path && out, "path and out must be non-null") != LA_OK) return LA_ERR_INVALID_ARG;
  return guarded([&] {
    auto handle = std::make_unique<la_library>();
    handle->lib = learnact::ActionLibrary::load(path);
    *out = handle.release();
    return LA_OK;
  });
}

la_status la_library_parse_json(const char* json_text, la_library** out) {
  if (require(json_text && out, "json_text and out must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    auto handle = std::make_unique<la_library>();
    handle->lib = learnact::ActionLibrary::from_json(json::parse(json_text));
    *out = handle.release();
    return LA_OK;
  });
}

void la_library_free(la_library* library) { delete library; }

la_status la_library_validate(const la_library* library, const la_domain* domain) {
  if (require(library && domain, "library and domain must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    library->lib.validate(domain->def);
    return LA_OK;
  });
}

la_status la_env_create(const la_domain* domain, const la_instance* instance,
                        const la_library* library, int max_steps, la_env** out) {
  if (require(domain && instance && out, "domain, instance and out must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  if (require(max_steps > 0, "max_steps must be positive") != LA_OK) return LA_ERR_INVALID_ARG;
  return guarded([&] {
    auto env = std::make_unique<la_env>();
    env->domain = domain->def;
    env->instance = instance->inst;
    if (library) {
      library->lib.validate(env->domain);
      env->program = library->lib.compile();
    }
    env->episode = std::make_unique<learnact::Episode>(
        env->domain, env->instance, &env->program, learnact::EpisodeOptions{max_steps});
    *out = env.release();
    return LA_OK;
  });
}

void la_env_free(la_env* env) { delete env; }

la_status la_env_reset(la_env* env, char** out_json) {
  if (require(env && out_json, "env and out_json must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    *out_json = dup_string(observation_json(env->episode->reset()).dump());
    return LA_OK;
  });
}

la_status la_env_step(la_env* env, const char* invocation, char** out_json) {
  if (require(env && invocation && out_json, "env, invocation and out_json must be non-null") !=
      LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::StepResult result = env->episode->step(invocation);
    json j = observation_json(result.observation);
    j["error_kind"] = learnact::to_string(result.error_kind);
    *out_json = dup_string(j.dump());
    return LA_OK;
  });
}

la_status la_env_goal_text(const la_env* env, char** out_text) {
  if (require(env && out_text, "env and out_text must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    *out_text = dup_string(env->episode->goal_text());
    return LA_OK;
  });
}

la_status la_env_record(const la_env* env, char** out_json) {
  if (require(env && out_json, "env and out_json must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    *out_json = dup_string(record_json(env->episode->record()).dump(2));
    return LA_OK;
  });
}

la_status la_env_serve_stdio(la_env* env) {
  if (require(env != nullptr, "env must be non-null") != LA_OK) return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::serve_environment(*env->episode, std::cin, std::cout);
    return LA_OK;
  });
}

la_status la_config_parse(const char* config_text, char** out_json) {
  if (require(config_text && out_json, "config_text and out_json must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::ExperimentConfig config = learnact::parse_config_text(config_text);
    json j = config.to_json();
    j["digest"] = config.digest();
    *out_json = dup_string(j.dump(2));
    return LA_OK;
  });
}

la_status la_split(const char* config_text, char** out_json) {
  if (require(config_text && out_json, "config_text and out_json must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::ExperimentConfig config = learnact::parse_config_text(config_text);
    learnact::DomainBundle bundle = learnact::load_bundle(config.domain_dir);
    learnact::DatasetSplit split =
        learnact::split_dataset(bundle.instances, config.seed, config.train_size);
    json j;
    j["seed"] = config.seed;
    j["train"] = split.train_ids;
    j["test"] = split.test_ids;
    *out_json = dup_string(j.dump(2));
    return LA_OK;
  });
}

la_status la_run_train(const char* config_text, char** out_json) {
  if (require(config_text && out_json, "config_text and out_json must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::ExperimentConfig config = learnact::parse_config_text(config_text);
    learnact::TrainRunResult result = learnact::run_train(config);
    json j;
    j["library_path"] = result.library_path.string();
    j["state_path"] = result.state_path.string();
    j["iterations"] = result.result.state.iterations.size();
    if (!result.result.state.iterations.empty())
      j["final_mu"] = result.result.state.iterations.back().chosen_mu;
    j["actions"] = result.result.library.entries.size();
    *out_json = dup_string(j.dump(2));
    return LA_OK;
  });
}

la_status la_run_test(const char* config_text, const char* library_path, char** out_json) {
  if (require(config_text && library_path && out_json,
              "config_text, library_path and out_json must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::ExperimentConfig config = learnact::parse_config_text(config_text);
    learnact::RunReport report = learnact::run_test(config, library_path);
    *out_json = dup_string(report.to_json().dump(2));
    return LA_OK;
  });
}

la_status la_report_table(const char* report_json, char** out_text) {
  if (require(report_json && out_text, "report_json and out_text must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::RunReport report = learnact::RunReport::from_json(json::parse(report_json));
    *out_text = dup_string(report.table());
    return LA_OK;
  });
}

la_status la_report_compare(const char* before_json, const char* after_json, char** out_text) {
  if (require(before_json && after_json && out_text, "all arguments must be non-null") != LA_OK)
    return LA_ERR_INVALID_ARG;
  return guarded([&] {
    learnact::RunReport before = learnact::RunReport::from_json(json::parse(before_json));
    learnact::RunReport after = learnact::RunReport::from_json(json::parse(after_json));
    *out_text = dup_string(learnact::compare_reports(before, after));
    return LA_OK;
  });
}

}  // extern "C"
