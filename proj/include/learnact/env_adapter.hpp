#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "learnact/episode.hpp"

namespace learnact {

/// Serves an environment over newline-delimited JSON on the given
/// streams: {"op":"reset"} and {"op":"step","invocation":...} requests,
/// {"text":...,"valid":...,"done":...} responses. Returns when the
/// input stream closes. Protocol errors answer {"error":...} without
/// terminating the loop.
void serve_environment(Environment& env, std::istream& in, std::ostream& out);

/// Client half of the adapter: spawns a child process and drives a
/// remote environment through its stdio. Lets external simulators plug
/// into the episode loop later.
class StdioEnvClient final : public Environment {
 public:
  explicit StdioEnvClient(const std::vector<std::string>& argv);
  ~StdioEnvClient() override;

  StdioEnvClient(const StdioEnvClient&) = delete;
  StdioEnvClient& operator=(const StdioEnvClient&) = delete;

  Observation reset() override;
  StepResult step(const std::string& invocation_text) override;

 private:
  std::string roundtrip(const std::string& request_line);

  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace learnact
