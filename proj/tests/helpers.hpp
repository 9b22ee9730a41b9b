// Shared fixtures for the test suites.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "learnact/bundle.hpp"
#include "learnact/gateway.hpp"
#include "learnact/library.hpp"
#include "learnact/strips.hpp"
#include "oracles.hpp"

namespace testkit {

#ifndef LEARNACT_SOURCE_DIR
#error "LEARNACT_SOURCE_DIR must be defined by the build"
#endif

inline std::string source_dir() { return LEARNACT_SOURCE_DIR; }
inline std::string domain_dir(const std::string& name) { return source_dir() + "/domains/" + name; }

inline const learnact::DomainBundle& blockworld_bundle() {
  static learnact::DomainBundle bundle = learnact::load_bundle(domain_dir("blockworld"));
  return bundle;
}

// Blockworld state from oracle-style atom strings.
inline learnact::WorldState state_from_atoms(const std::vector<std::string>& blocks,
                                             const oracle::Atoms& atoms,
                                             const std::set<std::string>& goal = {}) {
  learnact::WorldState state;
  for (const auto& b : blocks) state.objects.push_back({b, "block"});
  auto parse_atom = [](const std::string& text) {
    learnact::Atom atom;
    size_t paren = text.find('(');
    if (paren == std::string::npos) {
      atom.pred = text;
      return atom;
    }
    atom.pred = text.substr(0, paren);
    size_t pos = paren + 1;
    while (pos < text.size() && text[pos] != ')') {
      size_t comma = text.find_first_of(",)", pos);
      atom.args.push_back(text.substr(pos, comma - pos));
      pos = comma + (text[comma] == ',' ? 1 : 0);
    }
    return atom;
  };
  for (const auto& a : atoms) state.atoms.insert(parse_atom(a));
  for (const auto& g : goal) state.goal.insert(parse_atom(g));
  return state;
}

inline oracle::Atoms atoms_from_state(const learnact::WorldState& state) {
  oracle::Atoms out;
  for (const auto& atom : state.atoms) out.insert(atom.str());
  return out;
}

// The two learned blockworld actions, in DSL form.
inline std::string dismantle_source() {
  return "def dismantle_stack_until(block_list, block_target):\n"
         "    for top_block, bottom_block in pairs(block_list):\n"
         "        if top_block == block_target:\n"
         "            break\n"
         "        Unstack(top_block, bottom_block)\n"
         "        Putdown(top_block)";
}

inline std::string construct_source_fixed() {
  return "def construct_stack(block_list):\n"
         "    for top_block, bottom_block in reverse(pairs(block_list)):\n"
         "        Pickup(top_block)\n"
         "        Stack(top_block, bottom_block)";
}

// Wrong loop direction: builds bottom pair first, so the second Pickup
// hits a covered block.
inline std::string construct_source_buggy() {
  return "def construct_stack(block_list):\n"
         "    for top_block, bottom_block in pairs(block_list):\n"
         "        Pickup(top_block)\n"
         "        Stack(top_block, bottom_block)";
}

inline learnact::ActionLibrary learned_library(bool buggy_construct = false) {
  learnact::ActionLibrary lib;
  learnact::ActionEntry dismantle;
  dismantle.name = "dismantle_stack_until";
  dismantle.source = dismantle_source();
  dismantle.description =
      "dismantle_stack_until(block_list, block_target): unstacks blocks from the top of the "
      "listed stack and puts them on the table until the target block is reached.";
  dismantle.usage_example =
      "Action: dismantle_stack_until(['b3','b2','b1'], 'b1')";
  lib.entries.push_back(dismantle);
  learnact::ActionEntry construct;
  construct.name = "construct_stack";
  construct.source = buggy_construct ? construct_source_buggy() : construct_source_fixed();
  construct.description =
      "construct_stack(block_list): stacks the listed clear table blocks into one tower, "
      "ordered top to bottom as given.";
  construct.usage_example = "Action: construct_stack(['b1','b2','b3'])";
  lib.entries.push_back(construct);
  return lib;
}

// Scripted learner-LLM items for one full scripted training run: K
// creation samples emitting the buggy pair, then K Update samples with
// the corrected construct_stack. Strict order with one item per call.
inline std::vector<learnact::ScriptItem> learner_script(int k) {
  std::vector<learnact::ScriptItem> items;
  std::string creation_response =
      "Here are the high-level steps:\n```dsl\n" + dismantle_source() + "\n\n" +
      construct_source_buggy() + "\n```\n";
  std::string dismantle_desc =
      "dismantle_stack_until(block_list, block_target): unstacks blocks top-down from the "
      "listed stack onto the table, stopping at the target block.";
  std::string dismantle_usage = "Action: dismantle_stack_until(['b3','b2','b1'], 'b1')";
  std::string construct_desc =
      "construct_stack(block_list): builds one tower from the listed clear table blocks, "
      "ordered top to bottom as given.";
  std::string construct_usage = "Action: construct_stack(['b1','b2','b3'])";
  for (int i = 0; i < k; ++i) {
    items.push_back({"Now please write your solution:", false, creation_response, 1});
    items.push_back({"high-level step dismantle_stack_until", false, dismantle_desc, 1});
    items.push_back({"def dismantle_stack_until", false, dismantle_usage, 1});
    items.push_back({"high-level step construct_stack", false, construct_desc, 1});
    items.push_back({"def construct_stack", false, construct_usage, 1});
  }
  std::string update_response =
      "Failed reason: The loop builds the bottom pair first, so the next block to pick is "
      "already covered.\n"
      "Improve: Update: construct_stack\n"
      "Content: ```dsl\n" + construct_source_fixed() + "\n```\n"
      "Test case: construct_stack(['b1','b2'])\n";
  for (int i = 0; i < k; ++i) {
    items.push_back({"Failed reason:", false, update_response, 1});
    items.push_back({"high-level step construct_stack", false, construct_desc, 1});
    items.push_back({"def construct_stack", false, construct_usage, 1});
  }
  return items;
}

// Pattern rules that drive the scripted agent over the bw_b / bw_c /
// bw_d instances: dismantle, then construct, then harmless no-ops.
inline std::vector<learnact::ScriptItem> agent_script() {
  auto suffix_rule = [](std::string pattern, std::string response) {
    return learnact::ScriptItem{std::move(pattern), true, std::move(response), -1};
  };
  const std::string all3 =
      "b1 is on the table. b2 is on the table. b3 is on the table. Robot arm is empty. "
      "The b1 is clear. The b2 is clear. The b3 is clear.";
  const std::string all4 =
      "b1 is on the table. b2 is on the table. b3 is on the table. b4 is on the table. "
      "Robot arm is empty. The b1 is clear. The b2 is clear. The b3 is clear. The b4 is clear.";
  std::vector<learnact::ScriptItem> items;
  items.push_back(suffix_rule(
      "Observation: b3 is on b2. b2 is on b1. b1 is on the table. Robot arm is empty. "
      "The b3 is clear.\nAction:",
      "dismantle_stack_until(['b3','b2','b1'], 'b1')"));
  items.push_back(suffix_rule(
      "Observation: b1 is on b2. b2 is on b3. b3 is on the table. Robot arm is empty. "
      "The b1 is clear.\nAction:",
      "dismantle_stack_until(['b1','b2','b3'], 'b3')"));
  items.push_back(suffix_rule(
      "Observation: b4 is on b3. b3 is on b2. b2 is on b1. b1 is on the table. "
      "Robot arm is empty. The b4 is clear.\nAction:",
      "dismantle_stack_until(['b4','b3','b2','b1'], 'b1')"));
  items.push_back(suffix_rule(
      "Action: dismantle_stack_until(['b3','b2','b1'], 'b1')\nObservation: " + all3 + "\nAction:",
      "construct_stack(['b1','b2','b3'])"));
  items.push_back(suffix_rule(
      "Action: dismantle_stack_until(['b1','b2','b3'], 'b3')\nObservation: " + all3 + "\nAction:",
      "construct_stack(['b3','b2','b1'])"));
  items.push_back(suffix_rule(
      "Action: dismantle_stack_until(['b4','b3','b2','b1'], 'b1')\nObservation: " + all4 +
          "\nAction:",
      "construct_stack(['b1','b2','b3','b4'])"));
  items.push_back({"", false, "Noop()", -1});
  return items;
}

inline learnact::BackendConfig scripted_backend(std::vector<learnact::ScriptItem> items,
                                                bool strict) {
  learnact::BackendConfig config;
  config.kind = learnact::BackendKind::scripted;
  config.script = std::move(items);
  config.script_strict = strict;
  return config;
}

// The three training instances used by the scripted-learning fixtures.
inline std::vector<learnact::Instance> scripted_train_instances() {
  const auto& bundle = blockworld_bundle();
  return {*bundle.find_instance("bw_b"), *bundle.find_instance("bw_c"),
          *bundle.find_instance("bw_d")};
}

}  // namespace testkit
