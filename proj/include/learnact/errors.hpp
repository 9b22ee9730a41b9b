#pragma once

#include <stdexcept>
#include <string>

namespace learnact {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by the domain, instance, and DSL parsers. Carries a 1-based
/// source position so callers can surface a diagnostic.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " (line " + std::to_string(line) + ", col " +
              std::to_string(col) + ")"),
        line_(line),
        col_(col),
        raw_(msg) {}

  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& raw_message() const { return raw_; }

 private:
  int line_;
  int col_;
  std::string raw_;
};

/// Semantic validation failure (undeclared predicate, arity mismatch,
/// name collision, instance/domain mismatch, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operation called in an illegal state (stepping a finished episode,
/// applying an inapplicable action, ...).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / IO failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// LLM backend failure. `digest` is set for replay cache misses.
class GatewayError : public Error {
 public:
  explicit GatewayError(const std::string& msg, std::string digest = "")
      : Error(msg), digest_(std::move(digest)) {}
  const std::string& digest() const { return digest_; }

 private:
  std::string digest_;
};

}  // namespace learnact
