#include "learnact/bundle.hpp"

#include <algorithm>
#include <cctype>

#include "learnact/util.hpp"

namespace learnact {

namespace {

std::string read_optional(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return "";
  std::string text = read_file(path);
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

std::string read_required(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw IoError("bundle file missing: " + path.string());
  std::string text = read_file(path);
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

std::vector<std::string> plan_lines(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first != std::string::npos) out.push_back(line.substr(first));
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return out;
}

}  // namespace

const Instance* DomainBundle::find_instance(std::string_view id) const {
  for (const auto& inst : instances)
    if (inst.id == id) return &inst;
  return nullptr;
}

DomainBundle load_bundle(const std::filesystem::path& dir) {
  DomainBundle bundle;
  bundle.domain = parse_domain(read_file(dir / "domain.txt"));
  bundle.name = bundle.domain.name;
  bundle.instruction = read_required(dir / "instruction.txt");
  bundle.in_context_example = read_required(dir / "example.txt");
  bundle.basic_action_example = read_optional(dir / "seed_action_example.txt");
  bundle.created_action_example = read_optional(dir / "seed_created_example.txt");
  bundle.description_examples = read_optional(dir / "seed_description_examples.txt");
  bundle.usage_examples_seed = read_optional(dir / "seed_usage_examples.txt");
  bundle.format_instruction = read_optional(dir / "format_instruction.txt");
  bundle.learning_example = read_optional(dir / "learning_example.txt");

  auto instances_dir = dir / "instances";
  if (!std::filesystem::is_directory(instances_dir))
    throw IoError("bundle has no instances directory: " + instances_dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(instances_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    Instance inst;
    inst.id = path.stem().string();
    inst.state = parse_instance(read_file(path), bundle.domain);
    bundle.instances.push_back(std::move(inst));
  }
  if (bundle.instances.empty())
    throw ValidationError("bundle declares no instances: " + dir.string());

  auto plans_dir = dir / "plans";
  if (std::filesystem::is_directory(plans_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(plans_dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
      bundle.plans[entry.path().stem().string()] = plan_lines(read_file(entry.path()));
    }
  }
  return bundle;
}

}  // namespace learnact
