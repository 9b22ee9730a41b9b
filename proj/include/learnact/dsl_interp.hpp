#pragma once

#include <string>
#include <vector>

#include "learnact/dsl.hpp"
#include "learnact/strips.hpp"
#include "learnact/values.hpp"

namespace learnact::dsl {

/// One atomic action issued by a learned-action execution.
struct SubStep {
  GroundAction action;
  bool valid = false;
  std::string observation;
};

/// Trace of a single learned-action call. When aborted by a failed
/// atomic step, that step is the last (and only invalid) entry and
/// abort_index points at it; runtime errors abort without appending.
struct SubTrace {
  std::vector<SubStep> steps;
  bool completed = false;
  int abort_index = -1;
  StepErrorKind abort_kind = StepErrorKind::none;
  std::string abort_message;

  long long valid_count() const {
    long long n = 0;
    for (const auto& s : steps) n += s.valid ? 1 : 0;
    return n;
  }
};

/// Environment surface the interpreter drives. The interpreter has no
/// other way to affect the world: no files, network, or clock exist in
/// the language.
class DslEnv {
 public:
  virtual ~DslEnv() = default;

  struct AtomicOutcome {
    GroundResult ground;      // on grounding failure no step was issued
    bool valid = false;       // grounded, applicable, and applied
    std::string observation;  // state rendering or the invalid sentinel
  };

  virtual AtomicOutcome atomic_step(const std::string& name,
                                    const std::vector<std::string>& args) = 0;
  virtual bool holds(const Atom& atom) const = 0;
  /// Atomic steps this call may still issue; 0 aborts the execution.
  virtual long long budget_remaining() const = 0;
};

/// Runs `function(args)` against the environment with eager evaluation.
/// Never throws for in-language failures: aborts are recorded in the
/// returned trace. Throws ValidationError only for an unknown function
/// name (callers dispatch on names before executing).
SubTrace execute(const Program& program, const std::string& function,
                 const std::vector<Value>& args, DslEnv& env);

/// Result of a pure expansion: the atomic actions `execute` would issue
/// (including the trailing failed attempt when the simulated run aborts
/// on a precondition), plus the simulated trace and final state.
struct Expansion {
  std::vector<GroundAction> actions;
  SubTrace trace;
  WorldState final_state;
};

/// Macro-expands a call against a simulated copy of `start`; no episode
/// or environment is touched.
Expansion expand(const Program& program, const std::string& function,
                 const std::vector<Value>& args, const DomainDefinition& domain,
                 const WorldState& start);

}  // namespace learnact::dsl
