#include "learnact/prompts.hpp"

#include <algorithm>

#include "json.hpp"
#include "learnact/errors.hpp"
#include "learnact/util.hpp"

namespace learnact {

// Generated from templates/*.txt at build time.
namespace embedded_templates {
extern const char* const creation;
extern const char* const description;
extern const char* const usage;
extern const char* const learning;
extern const char* const agent;
}  // namespace embedded_templates

std::string to_string(TemplateId id) {
  switch (id) {
    case TemplateId::creation: return "creation";
    case TemplateId::description: return "description";
    case TemplateId::usage: return "usage";
    case TemplateId::learning: return "learning";
    case TemplateId::agent: return "agent";
  }
  return "creation";
}

std::string RenderedPrompt::text() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n";
    out += m.content;
  }
  return out;
}

namespace {

std::vector<std::string> scan_slots(const std::string& body) {
  std::vector<std::string> slots;
  size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string::npos) {
    size_t end = body.find("}}", pos + 2);
    if (end == std::string::npos) break;
    std::string name = body.substr(pos + 2, end - pos - 2);
    if (std::find(slots.begin(), slots.end(), name) == slots.end()) slots.push_back(name);
    pos = end + 2;
  }
  return slots;
}

PromptTemplate make_template(TemplateId id, std::string body) {
  while (!body.empty() && body.back() == '\n') body.pop_back();
  PromptTemplate t;
  t.id = id;
  t.required_slots = scan_slots(body);
  t.body = std::move(body);
  return t;
}

// Breaks any code fence appearing inside slot content so the template's
// own fences stay balanced.
std::string escape_fences(const std::string& value) {
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t hit = value.find("```", pos);
    if (hit == std::string::npos) {
      out += value.substr(pos);
      return out;
    }
    out += value.substr(pos, hit - pos);
    out += "` ` `";
    pos = hit + 3;
  }
}

std::string collapse_blank_runs(const std::string& text) {
  std::string out;
  int newlines = 0;
  for (char c : text) {
    if (c == '\n') {
      if (++newlines <= 2) out += c;
    } else {
      newlines = 0;
      out += c;
    }
  }
  return out;
}

}  // namespace

PromptKit PromptKit::builtin() {
  PromptKit kit;
  kit.templates_.emplace(TemplateId::creation,
                         make_template(TemplateId::creation, embedded_templates::creation));
  kit.templates_.emplace(TemplateId::description,
                         make_template(TemplateId::description, embedded_templates::description));
  kit.templates_.emplace(TemplateId::usage,
                         make_template(TemplateId::usage, embedded_templates::usage));
  kit.templates_.emplace(TemplateId::learning,
                         make_template(TemplateId::learning, embedded_templates::learning));
  kit.templates_.emplace(TemplateId::agent,
                         make_template(TemplateId::agent, embedded_templates::agent));
  return kit;
}

PromptKit PromptKit::from_directory(const std::filesystem::path& dir) {
  PromptKit kit;
  for (TemplateId id : {TemplateId::creation, TemplateId::description, TemplateId::usage,
                        TemplateId::learning, TemplateId::agent}) {
    auto path = dir / (to_string(id) + ".txt");
    kit.templates_.emplace(id, make_template(id, read_file(path)));
  }
  return kit;
}

const PromptTemplate& PromptKit::get(TemplateId id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ValidationError("template not loaded: " + to_string(id));
  return it->second;
}

RenderedPrompt PromptKit::render(TemplateId id,
                                 const std::map<std::string, std::string>& slots) const {
  const PromptTemplate& tmpl = get(id);
  std::map<std::string, std::string> bound = slots;
  bound.emplace("dsl_grammar", dsl_grammar_summary());

  std::string body = tmpl.body;
  for (const auto& slot : tmpl.required_slots) {
    auto it = bound.find(slot);
    if (it == bound.end())
      throw ValidationError("missing slot '" + slot + "' for template " + to_string(id));
    std::string marker = "{{" + slot + "}}";
    std::string value = slot == "dsl_grammar" ? it->second : escape_fences(it->second);
    size_t pos = 0;
    while ((pos = body.find(marker, pos)) != std::string::npos) {
      body.replace(pos, marker.size(), value);
      pos += value.size();
    }
  }
  body = collapse_blank_runs(body);

  RenderedPrompt out;
  out.template_id = to_string(id);
  nlohmann::json provenance;
  provenance["template"] = out.template_id;
  provenance["slots"] = bound;
  out.slot_digest = sha256_hex(provenance.dump());
  if (id == TemplateId::agent)
    out.messages.push_back({"system", agent_system_prompt()});
  out.messages.push_back({"user", std::move(body)});
  return out;
}

RenderedPrompt PromptKit::render_creation(const std::string& basic_task_instruction,
                                          const std::string& basic_action_example,
                                          const std::string& created_action_example) const {
  if (basic_task_instruction.empty() || basic_action_example.empty() ||
      created_action_example.empty())
    throw ValidationError("creation prompt slots must be nonempty");
  return render(TemplateId::creation, {{"basic_task_instruction", basic_task_instruction},
                                       {"basic_action_example", basic_action_example},
                                       {"created_action_example", created_action_example}});
}

RenderedPrompt PromptKit::render_description(const std::string& basic_task_instruction,
                                             const std::string& description_examples,
                                             const std::string& func_name,
                                             const std::string& function_source) const {
  return render(TemplateId::description,
                {{"basic_task_instruction", basic_task_instruction},
                 {"action_description_examples", description_examples},
                 {"func_name", func_name},
                 {"function", function_source}});
}

RenderedPrompt PromptKit::render_usage(const std::string& basic_task_instruction,
                                       const std::string& format_instruction,
                                       const std::string& usage_examples,
                                       const std::string& function_source) const {
  return render(TemplateId::usage, {{"basic_task_instruction", basic_task_instruction},
                                    {"format_instruction", format_instruction},
                                    {"action_usage_examples", usage_examples},
                                    {"function", function_source}});
}

RenderedPrompt PromptKit::render_learning(
    const std::string& basic_task_instruction, const std::string& task_goal,
    const std::string& action_example, const std::string& in_context_example,
    const std::string& library_sources, const std::string& function_name,
    const std::string& agent_trajectory, const std::string& error_info,
    const std::string& error_subprocess) const {
  return render(TemplateId::learning,
                {{"basic_task_instruction", basic_task_instruction},
                 {"task_goal", task_goal},
                 {"action_example", action_example},
                 {"in_context_example", in_context_example},
                 {"actions", library_sources},
                 {"function_name", function_name},
                 {"agent_trajectory", agent_trajectory},
                 {"error_info", error_info},
                 {"error_subprocess",
                  error_subprocess.empty() ? "(no atomic steps executed)" : error_subprocess}});
}

RenderedPrompt PromptKit::render_agent(const std::string& basic_instruction,
                                       const std::string& learned_action_instructions,
                                       const std::string& usage_examples, const std::string& goal,
                                       const std::string& initial_observation,
                                       const std::vector<HistoryStep>& history,
                                       size_t max_prompt_chars) const {
  size_t drop = 0;
  while (true) {
    std::string block = "Observation: " + initial_observation;
    for (size_t i = drop; i < history.size(); ++i) {
      block += "\nAction: " + history[i].action;
      block += "\nObservation: " + history[i].observation;
    }
    RenderedPrompt prompt =
        render(TemplateId::agent, {{"basic_instruction", basic_instruction},
                                   {"learned_action_instructions", learned_action_instructions},
                                   {"usage_examples", usage_examples},
                                   {"goal", goal},
                                   {"history", block}});
    if (max_prompt_chars == 0 || prompt.text().size() <= max_prompt_chars ||
        drop >= history.size())
      return prompt;
    ++drop;  // drop oldest action/observation pairs, keep goal + tail
  }
}

const std::string& PromptKit::dsl_grammar_summary() {
  static const std::string grammar =
      "The action language is a small Python-like language:\n"
      "- `def name(param1, param2):` defines a high-level step; the body is indented.\n"
      "- Statements: action calls `Name(arg, ...)`, `for x in list:` or "
      "`for x, y in pairs(list):`, `if cond:` with optional `else:`, `let name = expr`, "
      "`break`, `assert cond, \"message\"`.\n"
      "- Expressions: string literals like 'b1', integers, booleans, lists like "
      "['b1','b2'], `==`, `!=`, `and`, `or`, `not`, indexing `xs[0]`, and the builtins "
      "len(xs), reverse(xs), zip(xs, ys), pairs(xs), slice(xs, start, end), and "
      "holds('predicate', arg, ...), which tests whether a fact holds right now.\n"
      "- No recursion and no arithmetic; loops iterate over finite lists only.";
  return grammar;
}

const std::string& PromptKit::agent_system_prompt() {
  static const std::string prompt = "You are a master in planning.";
  return prompt;
}

}  // namespace learnact
