#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "learnact/gateway.hpp"

namespace learnact {

enum class TemplateId { creation, description, usage, learning, agent };

std::string to_string(TemplateId id);

struct PromptTemplate {
  TemplateId id;
  std::string body;
  std::vector<std::string> required_slots;  // every {{slot}} in the body
};

struct RenderedPrompt {
  std::vector<ChatMessage> messages;
  std::string template_id;
  std::string slot_digest;  // changes iff any slot content changes

  /// All message contents joined; convenient for tests and matching.
  std::string text() const;
};

/// One (action, observation) exchange of an episode, used to render the
/// agent prompt's history block.
struct HistoryStep {
  std::string action;
  std::string observation;
};

/// Loads and renders the five prompt templates. Templates are plain
/// text with {{slot}} markers; defaults are compiled in and any
/// directory with the same file names can replace them.
class PromptKit {
 public:
  /// Compiled-in templates.
  static PromptKit builtin();
  /// Reads creation.txt, description.txt, usage.txt, learning.txt,
  /// agent.txt from `dir`.
  static PromptKit from_directory(const std::filesystem::path& dir);

  /// Generic rendering; used by the typed helpers below. Throws
  /// ValidationError when a required slot is missing. Slot content is
  /// fence-escaped so template structure survives injection.
  RenderedPrompt render(TemplateId id, const std::map<std::string, std::string>& slots) const;

  RenderedPrompt render_creation(const std::string& basic_task_instruction,
                                 const std::string& basic_action_example,
                                 const std::string& created_action_example) const;

  RenderedPrompt render_description(const std::string& basic_task_instruction,
                                    const std::string& description_examples,
                                    const std::string& func_name,
                                    const std::string& function_source) const;

  RenderedPrompt render_usage(const std::string& basic_task_instruction,
                              const std::string& format_instruction,
                              const std::string& usage_examples,
                              const std::string& function_source) const;

  RenderedPrompt render_learning(const std::string& basic_task_instruction,
                                 const std::string& task_goal, const std::string& action_example,
                                 const std::string& in_context_example,
                                 const std::string& library_sources,
                                 const std::string& function_name,
                                 const std::string& agent_trajectory,
                                 const std::string& error_info,
                                 const std::string& error_subprocess) const;

  /// Assembles the Act-format agent prompt. The history block is
  /// "Observation:"/"Action:" lines ending with a bare "Action:" line;
  /// when the rendered prompt would exceed max_prompt_chars (0 = no
  /// limit), the oldest history pairs are dropped first.
  RenderedPrompt render_agent(const std::string& basic_instruction,
                              const std::string& learned_action_instructions,
                              const std::string& usage_examples, const std::string& goal,
                              const std::string& initial_observation,
                              const std::vector<HistoryStep>& history,
                              size_t max_prompt_chars = 0) const;

  const PromptTemplate& get(TemplateId id) const;

  /// Grammar summary injected into the creation and learning prompts.
  static const std::string& dsl_grammar_summary();
  /// System message used for the agent prompt.
  static const std::string& agent_system_prompt();

 private:
  std::map<TemplateId, PromptTemplate> templates_;
};

}  // namespace learnact
