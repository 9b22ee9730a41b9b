#include "learnact/env_adapter.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace learnact {

using nlohmann::json;

void serve_environment(Environment& env, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json response;
    try {
      json request = json::parse(line);
      std::string op = request.at("op").get<std::string>();
      if (op == "reset") {
        Observation obs = env.reset();
        response = {{"text", obs.text}, {"valid", obs.valid}, {"done", obs.done}};
      } else if (op == "step") {
        StepResult result = env.step(request.at("invocation").get<std::string>());
        response = {{"text", result.observation.text},
                    {"valid", result.observation.valid},
                    {"done", result.observation.done}};
      } else {
        response = {{"error", "unknown op '" + op + "'"}};
      }
    } catch (const std::exception& e) {
      response = {{"error", e.what()}};
    }
    out << response.dump() << "\n" << std::flush;
  }
}

StdioEnvClient::StdioEnvClient(const std::vector<std::string>& argv) {
  if (argv.empty()) throw ValidationError("adapter needs a command to spawn");
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw IoError("pipe() failed: " + std::string(std::strerror(errno)));
  pid_t pid = fork();
  if (pid < 0) throw IoError("fork() failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> args;
    for (const auto& arg : argv) args.push_back(const_cast<char*>(arg.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  child_pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

StdioEnvClient::~StdioEnvClient() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (child_pid_ > 0) {
    int status = 0;
    waitpid(child_pid_, &status, 0);
  }
}

std::string StdioEnvClient::roundtrip(const std::string& request_line) {
  std::string payload = request_line + "\n";
  size_t written = 0;
  while (written < payload.size()) {
    ssize_t n = write(to_child_, payload.data() + written, payload.size() - written);
    if (n <= 0) throw IoError("adapter write failed");
    written += static_cast<size_t>(n);
  }
  while (true) {
    size_t newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return line;
    }
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n <= 0) throw IoError("adapter closed the stream");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

Observation StdioEnvClient::reset() {
  json response = json::parse(roundtrip(R"({"op":"reset"})"));
  if (response.contains("error"))
    throw StateError("adapter error: " + response["error"].get<std::string>());
  Observation obs;
  obs.text = response.at("text").get<std::string>();
  obs.valid = response.at("valid").get<bool>();
  obs.done = response.at("done").get<bool>();
  return obs;
}

StepResult StdioEnvClient::step(const std::string& invocation_text) {
  json request = {{"op", "step"}, {"invocation", invocation_text}};
  json response = json::parse(roundtrip(request.dump()));
  if (response.contains("error"))
    throw StateError("adapter error: " + response["error"].get<std::string>());
  StepResult result;
  result.observation.text = response.at("text").get<std::string>();
  result.observation.valid = response.at("valid").get<bool>();
  result.observation.done = response.at("done").get<bool>();
  // The wire format carries validity only; remote failures map to the
  // generic error kind.
  result.error_kind =
      result.observation.valid ? StepErrorKind::none : StepErrorKind::precondition_failed;
  return result;
}

}  // namespace learnact
