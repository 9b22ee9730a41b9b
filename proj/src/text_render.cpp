#include "learnact/text_render.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <vector>

namespace learnact {

const char* const kInvalidActionSentence =
    "The action is not valid and therefore takes no effect. "
    "Please remember to satisfy the restriction of actions.";

const char* const kGoalSatisfiedSuffix = " The goal is satisfied.";

namespace {

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += " ";
    out += s;
  }
  return out;
}

// Replaces {0}, {1}, ... with the atom's arguments.
std::string fill(const std::string& fmt, const std::vector<std::string>& args) {
  std::string out;
  for (size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] == '{' && i + 2 < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[i + 1])) &&
        fmt[i + 2] == '}') {
      size_t idx = static_cast<size_t>(fmt[i + 1] - '0');
      if (idx < args.size()) out += args[idx];
      i += 2;
    } else {
      out += fmt[i];
    }
  }
  return out;
}

std::string goal_sentence_list(const WorldState& state,
                               const std::map<std::string, std::string>& goal_fmt) {
  std::vector<std::string> parts;
  for (const auto& atom : state.goal) {
    auto it = goal_fmt.find(atom.pred);
    parts.push_back(it != goal_fmt.end() ? fill(it->second, atom.args) : atom.str() + ".");
  }
  std::string joined;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) joined += ", ";
    joined += parts[i];
  }
  return "The goal is to satisfy the following conditions: " + joined;
}

class BlockworldRenderer final : public ObservationRenderer {
 public:
  std::string render_state(const WorldState& state) const override {
    std::vector<std::string> sentences;

    std::map<std::string, std::string> on;     // above -> below
    std::vector<std::string> table, clear;
    std::string held;
    bool armempty = false;
    for (const auto& atom : state.atoms) {
      if (atom.pred == "on")
        on[atom.args[0]] = atom.args[1];
      else if (atom.pred == "ontable")
        table.push_back(atom.args[0]);
      else if (atom.pred == "clear")
        clear.push_back(atom.args[0]);
      else if (atom.pred == "holding")
        held = atom.args[0];
      else if (atom.pred == "armempty")
        armempty = true;
    }
    std::sort(table.begin(), table.end());
    std::sort(clear.begin(), clear.end());

    // Stacks of height >= 2, ordered by bottom block, rendered top-down
    // ending with the bottom's table sentence.
    std::map<std::string, std::string> below_to_above;
    for (const auto& [above, below] : on) below_to_above[below] = above;
    std::vector<std::string> singles;
    for (const auto& bottom : table) {
      if (!below_to_above.count(bottom)) {
        singles.push_back(bottom);
        continue;
      }
      std::vector<std::string> chain{bottom};
      while (below_to_above.count(chain.back())) chain.push_back(below_to_above[chain.back()]);
      for (size_t i = chain.size(); i-- > 1;)
        sentences.push_back(chain[i] + " is on " + chain[i - 1] + ".");
      sentences.push_back(bottom + " is on the table.");
    }
    for (const auto& block : singles) sentences.push_back(block + " is on the table.");

    if (armempty) sentences.push_back("Robot arm is empty.");
    if (!held.empty()) sentences.push_back("You are holding " + held + ".");
    for (const auto& block : clear) sentences.push_back("The " + block + " is clear.");
    return join_sentences(sentences);
  }

  std::string render_goal(const WorldState& state) const override {
    return goal_sentence_list(state, {{"on", "{0} is on {1}."},
                                      {"ontable", "{0} is on the table."},
                                      {"clear", "The {0} is clear."},
                                      {"holding", "you are holding {0}."},
                                      {"armempty", "the robot arm is empty."}});
  }
};

// Ordered predicate -> sentence rules; within one rule atoms come out in
// canonical (sorted) order. Predicates without a rule are not rendered,
// which is how static bookkeeping facts are suppressed.
class TemplateRenderer final : public ObservationRenderer {
 public:
  TemplateRenderer(std::vector<std::pair<std::string, std::string>> state_rules,
                   std::map<std::string, std::string> goal_fmt)
      : state_rules_(std::move(state_rules)), goal_fmt_(std::move(goal_fmt)) {}

  std::string render_state(const WorldState& state) const override {
    std::vector<std::string> sentences;
    for (const auto& [pred, fmt] : state_rules_) {
      for (const auto& atom : state.atoms) {
        if (atom.pred == pred) sentences.push_back(fill(fmt, atom.args));
      }
    }
    return join_sentences(sentences);
  }

  std::string render_goal(const WorldState& state) const override {
    return goal_sentence_list(state, goal_fmt_);
  }

 private:
  std::vector<std::pair<std::string, std::string>> state_rules_;
  std::map<std::string, std::string> goal_fmt_;
};

class GenericRenderer final : public ObservationRenderer {
 public:
  std::string render_state(const WorldState& state) const override {
    std::vector<std::string> sentences;
    for (const auto& atom : state.atoms) sentences.push_back(atom.str() + ".");
    return join_sentences(sentences);
  }

  std::string render_goal(const WorldState& state) const override {
    return goal_sentence_list(state, {});
  }
};

}  // namespace

std::unique_ptr<ObservationRenderer> ObservationRenderer::for_domain(
    const std::string& domain_name) {
  if (domain_name == "blockworld") return std::make_unique<BlockworldRenderer>();
  if (domain_name == "gripper") {
    return std::make_unique<TemplateRenderer>(
        std::vector<std::pair<std::string, std::string>>{
            {"at_robby", "Robby is in {0}."},
            {"at", "{0} is in {1}."},
            {"carry", "Your {1} gripper is carrying {0}."},
            {"free", "Your {0} gripper is free."},
        },
        std::map<std::string, std::string>{{"at", "{0} is in {1}."},
                                           {"at_robby", "Robby is in {0}."},
                                           {"carry", "your {1} gripper is carrying {0}."}});
  }
  if (domain_name == "barman") {
    return std::make_unique<TemplateRenderer>(
        std::vector<std::pair<std::string, std::string>>{
            {"handempty", "Your {0} hand is empty."},
            {"holding", "Your {0} hand is holding {1}."},
            {"ontable", "{0} is on the table."},
            {"clean", "{0} is clean."},
            {"empty", "{0} is empty."},
            {"contains", "{0} contains {1}."},
            {"used", "{0} has been used for {1}."},
            {"shaker_level", "{0} is at level {1}."},
            {"unshaked", "{0} is unshaked."},
            {"shaked", "{0} is shaked."},
            {"dispenses", "{0} dispenses {1}."},
            {"cocktail_part1", "The first ingredient of {0} is {1}."},
            {"cocktail_part2", "The second ingredient of {0} is {1}."},
        },
        std::map<std::string, std::string>{{"contains", "{0} contains {1}."}});
  }
  if (domain_name == "tyreworld") {
    return std::make_unique<TemplateRenderer>(
        std::vector<std::pair<std::string, std::string>>{
            {"open", "{0} is open."},
            {"closed", "{0} is closed."},
            {"in", "{0} is in {1}."},
            {"have", "You have {0}."},
            {"have_nut", "You have {0}."},
            {"on", "{0} is on {1}."},
            {"on_ground", "{0} is on the ground."},
            {"jacked_up", "{0} is jacked up."},
            {"free", "{0} is free."},
            {"loose", "{0} is loose on {1}."},
            {"tight", "{0} is tight on {1}."},
            {"fastened", "{0} is fastened."},
            {"unfastened", "{0} is unfastened."},
            {"intact", "{0} is intact."},
            {"flat", "{0} is flat."},
            {"inflated", "{0} is inflated."},
        },
        std::map<std::string, std::string>{{"on", "{0} is on {1}."},
                                           {"in", "{0} is in {1}."},
                                           {"tight", "{0} is tight on {1}."},
                                           {"inflated", "{0} is inflated."},
                                           {"closed", "{0} is closed."},
                                           {"have", "you have {0}."}});
  }
  return std::make_unique<GenericRenderer>();
}

}  // namespace learnact
