#include "learnact/library.hpp"

#include "learnact/util.hpp"

namespace learnact {

const ActionEntry* ActionLibrary::find(std::string_view name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

ActionEntry* ActionLibrary::find(std::string_view name) {
  for (auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::string ActionLibrary::joint_source() const {
  std::string out;
  for (const auto& e : entries) {
    if (!out.empty()) out += "\n\n";
    out += e.source;
  }
  return out;
}

dsl::Program ActionLibrary::compile() const { return dsl::parse_program(joint_source()); }

void ActionLibrary::validate(const DomainDefinition& domain, bool require_descriptions) const {
  dsl::Program program = compile();
  if (program.functions.size() != entries.size())
    throw ValidationError("library entries and parsed functions disagree (" +
                          std::to_string(entries.size()) + " entries, " +
                          std::to_string(program.functions.size()) + " functions)");
  for (const auto& entry : entries) {
    if (!program.find(entry.name))
      throw ValidationError("library entry '" + entry.name + "' has no matching function");
    if (domain.find_schema(entry.name))
      throw ValidationError("learned action '" + entry.name +
                            "' collides with an atomic action");
    if (require_descriptions && entry.description.empty())
      throw ValidationError("learned action '" + entry.name + "' has no description");
  }
  // Calls that resolve to neither a defined function nor a schema would
  // fail at runtime; reject them here.
  for (const auto& callee : dsl::external_calls(program)) {
    if (!domain.find_schema(callee))
      throw ValidationError("library calls unknown action '" + callee + "'");
  }
}

std::string ActionLibrary::instructions_text() const {
  std::string out;
  for (const auto& entry : entries) {
    if (entry.description.empty() && entry.notes.empty()) continue;
    if (!out.empty()) out += "\n";
    out += entry.description;
    for (const auto& note : entry.notes) out += "\nNote (" + entry.name + "): " + note;
  }
  return out;
}

std::string ActionLibrary::usage_text() const {
  std::string out;
  for (const auto& entry : entries) {
    if (entry.usage_example.empty()) continue;
    if (!out.empty()) out += "\n";
    out += entry.usage_example;
  }
  return out;
}

nlohmann::json ActionLibrary::to_json(const std::string& domain_name) const {
  nlohmann::json j;
  j["domain"] = domain_name;
  j["version"] = version;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& entry : entries) {
    list.push_back({{"name", entry.name},
                    {"source", entry.source},
                    {"description", entry.description},
                    {"usage_example", entry.usage_example},
                    {"notes", entry.notes}});
  }
  j["entries"] = list;
  j["provenance"] = {{"iterations", provenance.iterations}, {"scores", provenance.scores}};
  return j;
}

ActionLibrary ActionLibrary::from_json(const nlohmann::json& j) {
  ActionLibrary lib;
  lib.version = j.value("version", 0);
  for (const auto& item : j.at("entries")) {
    ActionEntry entry;
    entry.name = item.at("name").get<std::string>();
    entry.source = item.at("source").get<std::string>();
    entry.description = item.value("description", "");
    entry.usage_example = item.value("usage_example", "");
    for (const auto& note : item.value("notes", nlohmann::json::array()))
      entry.notes.push_back(note.get<std::string>());
    lib.entries.push_back(std::move(entry));
  }
  if (j.contains("provenance")) {
    lib.provenance.iterations = j["provenance"].value("iterations", 0);
    for (const auto& s : j["provenance"].value("scores", nlohmann::json::array()))
      lib.provenance.scores.push_back(s.get<double>());
  }
  return lib;
}

void ActionLibrary::save(const std::filesystem::path& path,
                         const std::string& domain_name) const {
  write_file_atomic(path, to_json(domain_name).dump(2) + "\n");
}

ActionLibrary ActionLibrary::load(const std::filesystem::path& path) {
  return from_json(nlohmann::json::parse(read_file(path)));
}

}  // namespace learnact
