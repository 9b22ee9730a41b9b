#pragma once

#include <memory>
#include <string>

#include "learnact/strips.hpp"

namespace learnact {

/// Deterministic, order-canonical natural-language rendering of states
/// and goals. Each bundled domain has its own sentence templates; a
/// generic fallback prints sorted atoms for unknown domains.
class ObservationRenderer {
 public:
  virtual ~ObservationRenderer() = default;

  virtual std::string render_state(const WorldState& state) const = 0;
  virtual std::string render_goal(const WorldState& state) const = 0;

  /// Picks the renderer for a domain by name.
  static std::unique_ptr<ObservationRenderer> for_domain(const std::string& domain_name);
};

/// Sentence used verbatim whenever a step fails to execute.
extern const char* const kInvalidActionSentence;

/// Suffix appended (with its leading space) when the goal holds.
extern const char* const kGoalSatisfiedSuffix;

}  // namespace learnact
