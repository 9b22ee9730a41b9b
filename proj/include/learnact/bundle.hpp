#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "learnact/strips.hpp"

namespace learnact {

/// Everything a task ships with: the domain definition, its prompt
/// pack (instruction, in-context example and the creation seeds), the
/// instances, and a hand-written reference plan per instance.
struct DomainBundle {
  std::string name;
  DomainDefinition domain;

  std::string instruction;              // basic task instruction
  std::string in_context_example;       // single example episode
  std::string basic_action_example;     // atomic-action seed for creation
  std::string created_action_example;   // seed example of a composite action
  std::string description_examples;     // seeds for the description prompt
  std::string usage_examples_seed;      // seeds for the usage prompt
  std::string format_instruction;       // usage prompt format note
  std::string learning_example;         // in-context example for learning

  std::vector<Instance> instances;      // sorted by id
  std::map<std::string, std::vector<std::string>> plans;  // id -> invocations

  const Instance* find_instance(std::string_view id) const;
};

/// Loads a bundle directory: domain.txt, instruction.txt, example.txt,
/// seed_*.txt, learning_example.txt, instances/*.txt, plans/*.txt.
DomainBundle load_bundle(const std::filesystem::path& dir);

}  // namespace learnact
