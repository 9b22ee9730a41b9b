#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "learnact/gateway.hpp"

#include <chrono>
#include <filesystem>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "learnact/util.hpp"

namespace learnact {

using nlohmann::json;

BackendKind backend_kind_from_string(const std::string& name) {
  if (name == "live") return BackendKind::live;
  if (name == "replay") return BackendKind::replay;
  if (name == "scripted") return BackendKind::scripted;
  throw ValidationError("unknown backend kind '" + name + "' (expected live|replay|scripted)");
}

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::live: return "live";
    case BackendKind::replay: return "replay";
    case BackendKind::scripted: return "scripted";
  }
  return "scripted";
}

void BackendConfig::validate() const {
  if (kind == BackendKind::live) {
    if (endpoint.empty()) throw ValidationError("live backend requires an endpoint");
    if (credential_env.empty())
      throw ValidationError("live backend requires a credential environment variable name");
  }
  if (kind == BackendKind::replay && cache_dir.empty())
    throw ValidationError("replay backend requires a cache directory");
}

ChatGateway::ChatGateway(BackendConfig config) : config_(std::move(config)) {
  config_.validate();
  script_remaining_.reserve(config_.script.size());
  for (const auto& item : config_.script) script_remaining_.push_back(item.times);
}

std::string ChatGateway::digest(const ChatRequest& request) {
  json canonical;
  canonical["model"] = request.model;
  canonical["temperature"] = request.temperature;
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  canonical["messages"] = messages;
  return sha256_hex(canonical.dump());
}

bool ChatGateway::cache_lookup(const std::string& digest, std::string* response) const {
  if (config_.cache_dir.empty()) return false;
  auto path = std::filesystem::path(config_.cache_dir) / (digest + ".json");
  if (!std::filesystem::exists(path)) return false;
  json entry = json::parse(read_file(path));
  *response = entry.at("response").get<std::string>();
  return true;
}

void ChatGateway::cache_store(const ChatRequest& request, const std::string& digest,
                              const std::string& response) const {
  if (config_.cache_dir.empty()) return;
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json entry;
  entry["digest"] = digest;
  entry["request"] = {{"model", request.model},
                      {"temperature", request.temperature},
                      {"messages", messages}};
  entry["response"] = response;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  entry["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  auto path = std::filesystem::path(config_.cache_dir) / (digest + ".json");
  write_file_atomic(path, entry.dump(2) + "\n");
}

std::string ChatGateway::complete(const ChatRequest& request) {
  if (request.messages.empty()) throw ValidationError("chat request has no messages");
  if (request.temperature < 0) throw ValidationError("temperature must be >= 0");

  std::string key = digest(request);
  std::string response;
  switch (config_.kind) {
    case BackendKind::replay:
      if (!cache_lookup(key, &response))
        throw GatewayError("replay cache miss for digest " + key, key);
      break;
    case BackendKind::live:
      if (cache_lookup(key, &response)) {
        cache_hits_.fetch_add(1);
      } else {
        response = complete_live(request, key);
        cache_store(request, key, response);
      }
      break;
    case BackendKind::scripted:
      response = complete_scripted(request);
      cache_store(request, key, response);
      break;
  }
  calls_total_.fetch_add(1);
  return response;
}

std::string ChatGateway::complete_live(const ChatRequest& request, const std::string& digest) {
  json body;
  body["model"] = request.model;
  body["temperature"] = request.temperature;
  if (request.max_tokens > 0) body["max_tokens"] = request.max_tokens;
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = messages;

  const char* key = config_.credential_env.empty() ? nullptr
                                                   : std::getenv(config_.credential_env.c_str());
  httplib::Headers headers;
  if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error;
  int backoff = config_.retry.initial_backoff_ms;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    upstream_http_calls_.fetch_add(1);
    httplib::Client client(config_.endpoint);
    client.set_read_timeout(120, 0);
    client.set_connection_timeout(15, 0);
    auto result = client.Post(config_.path, headers, body.dump(), "application/json");
    if (result && result->status >= 200 && result->status < 300) {
      try {
        json parsed = json::parse(result->body);
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        last_error = std::string("malformed completion response: ") + e.what();
      }
    } else if (result) {
      last_error = "HTTP " + std::to_string(result->status) + ": " + result->body;
    } else {
      last_error = "transport error: " + httplib::to_string(result.error());
    }
    if (attempt < config_.retry.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw GatewayError("upstream failure after " + std::to_string(config_.retry.max_attempts) +
                         " attempt(s): " + last_error,
                     digest);
}

namespace {

bool item_matches(const ScriptItem& item, const std::string& prompt) {
  if (item.expect.empty()) return true;
  if (item.match_suffix) {
    return prompt.size() >= item.expect.size() &&
           prompt.compare(prompt.size() - item.expect.size(), item.expect.size(), item.expect) == 0;
  }
  return prompt.find(item.expect) != std::string::npos;
}

}  // namespace

std::string ChatGateway::complete_scripted(const ChatRequest& request) {
  std::string prompt;
  for (const auto& m : request.messages) {
    if (!prompt.empty()) prompt += "\n";
    prompt += m.content;
  }

  std::lock_guard<std::mutex> lock(mutex_);
  if (config_.script_strict) {
    while (script_pos_ < config_.script.size() && script_remaining_[script_pos_] == 0)
      ++script_pos_;
    if (script_pos_ >= config_.script.size())
      throw GatewayError("scripted backend exhausted after " +
                         std::to_string(config_.script.size()) + " response(s)");
    const ScriptItem& item = config_.script[script_pos_];
    if (!item_matches(item, prompt))
      throw GatewayError("scripted backend expectation mismatch at item " +
                         std::to_string(script_pos_) + ": expected to see \"" + item.expect +
                         "\"");
    if (script_remaining_[script_pos_] > 0) --script_remaining_[script_pos_];
    return item.response;
  }
  for (size_t i = 0; i < config_.script.size(); ++i) {
    if (script_remaining_[i] == 0) continue;
    if (!item_matches(config_.script[i], prompt)) continue;
    if (script_remaining_[i] > 0) --script_remaining_[i];
    return config_.script[i].response;
  }
  throw GatewayError("scripted backend has no rule matching the prompt");
}

}  // namespace learnact
