#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "learnact/errors.hpp"

namespace learnact {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 0;  // 0 = backend default
  std::string model;
};

enum class BackendKind { live, replay, scripted };

BackendKind backend_kind_from_string(const std::string& name);
std::string to_string(BackendKind kind);

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 250;
};

/// One scripted response. In strict mode items are consumed in order
/// and `expect` (when nonempty) must occur in the prompt. In rules mode
/// the first matching unexhausted item wins; `times` < 0 means
/// unlimited.
struct ScriptItem {
  std::string expect;
  bool match_suffix = false;
  std::string response;
  int times = 1;
};

struct BackendConfig {
  BackendKind kind = BackendKind::scripted;
  std::string endpoint;             // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4";
  std::string credential_env;       // name of the env var holding the key
  std::string cache_dir;            // response cache; required for replay
  RetryPolicy retry;
  std::vector<ScriptItem> script;
  bool script_strict = true;

  void validate() const;
};

/// Uniform chat-completion backend: live HTTP, deterministic replay
/// from the cache, or scripted responses for tests. Live and scripted
/// completions are written to the cache (one JSON file per digest) when
/// a cache directory is configured. Shareable across threads.
class ChatGateway {
 public:
  explicit ChatGateway(BackendConfig config);

  /// Returns the completion text. Throws GatewayError on upstream
  /// failure after retries, replay cache miss (carries the digest), or
  /// scripted exhaustion/mismatch.
  std::string complete(const ChatRequest& request);

  /// Completions served (any backend kind); drives complexity bounds.
  std::uint64_t calls_total() const { return calls_total_.load(); }
  /// Actual HTTP requests issued; stays 0 for replay/scripted.
  std::uint64_t upstream_http_calls() const { return upstream_http_calls_.load(); }
  std::uint64_t cache_hits() const { return cache_hits_.load(); }

  const BackendConfig& config() const { return config_; }

  /// Stable content digest of (model, temperature, messages); the cache
  /// key. Field order and unrelated config never affect it.
  static std::string digest(const ChatRequest& request);

 private:
  std::string complete_live(const ChatRequest& request, const std::string& digest);
  std::string complete_scripted(const ChatRequest& request);
  bool cache_lookup(const std::string& digest, std::string* response) const;
  void cache_store(const ChatRequest& request, const std::string& digest,
                   const std::string& response) const;

  BackendConfig config_;
  std::mutex mutex_;  // guards script state
  size_t script_pos_ = 0;
  std::vector<int> script_remaining_;
  std::atomic<std::uint64_t> calls_total_{0};
  std::atomic<std::uint64_t> upstream_http_calls_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
};

}  // namespace learnact
