#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "learnact/dsl.hpp"
#include "learnact/strips.hpp"

namespace learnact {

/// One learned action: DSL source plus the policy-instruction pieces
/// the agent prompt is assembled from.
struct ActionEntry {
  std::string name;
  std::string source;
  std::string description;
  std::string usage_example;
  std::vector<std::string> notes;
};

/// The learned action library (the open part of the action space) and
/// its accumulated policy instructions.
struct ActionLibrary {
  std::vector<ActionEntry> entries;
  int version = 0;

  struct Provenance {
    int iterations = 0;
    std::vector<double> scores;  // chosen mu per iteration
  };
  Provenance provenance;

  bool empty() const { return entries.empty(); }
  const ActionEntry* find(std::string_view name) const;
  ActionEntry* find(std::string_view name);

  /// All entry sources joined; must parse as one program.
  std::string joint_source() const;

  /// Parses the joint source. Throws ParseError/ValidationError.
  dsl::Program compile() const;

  /// Joint parse plus cross-checks: entry names match the parsed
  /// functions, no name collides with an atomic schema. When
  /// `require_descriptions` is set every entry must carry a description
  /// (agents only see described actions).
  void validate(const DomainDefinition& domain, bool require_descriptions = false) const;

  /// Policy-instruction block: per entry the description followed by
  /// accumulated "Note:" lines.
  std::string instructions_text() const;

  /// Usage-example block for the agent prompt.
  std::string usage_text() const;

  nlohmann::json to_json(const std::string& domain_name) const;
  static ActionLibrary from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path, const std::string& domain_name) const;
  static ActionLibrary load(const std::filesystem::path& path);
};

}  // namespace learnact
