#include "learnact/strips.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace learnact {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Line {
  std::string text;
  int number = 0;
  bool indented = false;
};

// Strips comments and trailing whitespace, drops blank lines, records
// whether the line started with whitespace.
std::vector<Line> significant_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++number;
    std::string line(raw);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    bool indented = !line.empty() && std::isspace(static_cast<unsigned char>(line.front()));
    std::string trimmed = line;
    size_t first = trimmed.find_first_not_of(" \t");
    if (first != std::string::npos) trimmed.erase(0, first);
    if (!trimmed.empty()) out.push_back({trimmed, number, indented});
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

// Cursor over one line for atom-list parsing.
struct LineCursor {
  const std::string& s;
  size_t i = 0;
  int line;

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, static_cast<int>(i) + 1);
  }
  std::string ident() {
    skip_ws();
    if (i >= s.size() || !is_ident_start(s[i])) fail("expected identifier");
    size_t start = i;
    while (i < s.size() && is_ident_char(s[i])) ++i;
    return s.substr(start, i - start);
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
};

Atom parse_atom(LineCursor& cur) {
  Atom atom;
  atom.pred = cur.ident();
  if (cur.eat('(')) {
    if (!cur.eat(')')) {
      do {
        atom.args.push_back(cur.ident());
      } while (cur.eat(','));
      cur.expect(')');
    }
  }
  return atom;
}

std::vector<Literal> parse_literal_list(const std::string& body, int line, bool allow_negation) {
  std::vector<Literal> out;
  LineCursor cur{body, 0, line};
  if (cur.done()) return out;
  do {
    Literal lit;
    cur.skip_ws();
    if (cur.eat('!')) {
      if (!allow_negation) cur.fail("negation is only allowed in preconditions");
      lit.negated = true;
    }
    lit.atom = parse_atom(cur);
    out.push_back(std::move(lit));
  } while (cur.eat(','));
  if (!cur.done()) cur.fail("trailing characters after atom list");
  return out;
}

void check_atom_against_params(const Atom& atom, const ActionSchema& schema,
                               const DomainDefinition& domain, int line) {
  const PredicateDecl* pred = domain.find_predicate(atom.pred);
  if (!pred)
    throw ValidationError("action '" + schema.name + "' uses undeclared predicate '" +
                          atom.pred + "' (line " + std::to_string(line) + ")");
  if (pred->arity() != static_cast<int>(atom.args.size()))
    throw ValidationError("predicate '" + atom.pred + "' expects " +
                          std::to_string(pred->arity()) + " argument(s), got " +
                          std::to_string(atom.args.size()) + " in action '" + schema.name +
                          "' (line " + std::to_string(line) + ")");
  for (size_t i = 0; i < atom.args.size(); ++i) {
    auto it = std::find_if(schema.params.begin(), schema.params.end(),
                           [&](const Parameter& p) { return p.name == atom.args[i]; });
    if (it == schema.params.end())
      throw ValidationError("atom argument '" + atom.args[i] + "' in action '" + schema.name +
                            "' is not a parameter (line " + std::to_string(line) + ")");
    if (it->type != pred->param_types[i])
      throw ValidationError("parameter '" + it->name + "' of type '" + it->type +
                            "' does not match predicate '" + atom.pred + "' position " +
                            std::to_string(i + 1) + " type '" + pred->param_types[i] +
                            "' (line " + std::to_string(line) + ")");
  }
}

}  // namespace

std::string Atom::str() const {
  if (args.empty()) return pred;
  std::string out = pred + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i];
  }
  return out + ")";
}

std::string to_string(StepErrorKind kind) {
  switch (kind) {
    case StepErrorKind::none: return "none";
    case StepErrorKind::unknown_action: return "unknown-action";
    case StepErrorKind::bad_arity: return "bad-arity";
    case StepErrorKind::precondition_failed: return "precondition-failed";
    case StepErrorKind::dsl_runtime_error: return "dsl-runtime-error";
  }
  return "none";
}

const ActionSchema* DomainDefinition::find_schema(std::string_view name) const {
  for (const auto& s : schemas)
    if (s.name == name) return &s;
  return nullptr;
}

const PredicateDecl* DomainDefinition::find_predicate(std::string_view name) const {
  for (const auto& p : predicates)
    if (p.name == name) return &p;
  return nullptr;
}

const TypedObject* WorldState::find_object(std::string_view name) const {
  for (const auto& o : objects)
    if (o.name == name) return &o;
  return nullptr;
}

std::string GroundAction::invocation_text() const {
  std::string out = schema->name + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += "'" + args[i] + "'";
  }
  return out + ")";
}

DomainDefinition parse_domain(std::string_view text) {
  DomainDefinition domain;
  auto lines = significant_lines(text);
  size_t idx = 0;

  auto head_word = [](const std::string& s) {
    size_t sp = s.find_first_of(" \t");
    return sp == std::string::npos ? s : s.substr(0, sp);
  };
  auto rest_after = [](const std::string& s) {
    size_t sp = s.find_first_of(" \t");
    if (sp == std::string::npos) return std::string();
    size_t start = s.find_first_not_of(" \t", sp);
    return start == std::string::npos ? std::string() : s.substr(start);
  };

  if (idx >= lines.size() || head_word(lines[idx].text) != "domain")
    throw ParseError("domain file must start with 'domain <name>'",
                     idx < lines.size() ? lines[idx].number : 1, 1);
  {
    LineCursor cur{lines[idx].text, 6, lines[idx].number};
    domain.name = cur.ident();
    if (!cur.done()) cur.fail("trailing characters after domain name");
  }
  ++idx;

  std::set<std::string> type_names;
  while (idx < lines.size()) {
    const Line& line = lines[idx];
    std::string kw = head_word(line.text);
    if (kw == "predicate") {
      // predicate <name>/<arity> <type>...
      std::string body = rest_after(line.text);
      LineCursor cur{body, 0, line.number};
      PredicateDecl decl;
      decl.name = cur.ident();
      cur.expect('/');
      cur.skip_ws();
      size_t start = cur.i;
      while (cur.i < body.size() && std::isdigit(static_cast<unsigned char>(body[cur.i]))) ++cur.i;
      if (cur.i == start) cur.fail("expected arity digit after '/'");
      int arity = std::stoi(body.substr(start, cur.i - start));
      while (!cur.done()) decl.param_types.push_back(cur.ident());
      if (static_cast<int>(decl.param_types.size()) != arity)
        throw ValidationError("predicate '" + decl.name + "' declares arity " +
                              std::to_string(arity) + " but lists " +
                              std::to_string(decl.param_types.size()) + " type(s) (line " +
                              std::to_string(line.number) + ")");
      if (domain.find_predicate(decl.name))
        throw ValidationError("duplicate predicate '" + decl.name + "' (line " +
                              std::to_string(line.number) + ")");
      for (const auto& t : decl.param_types) type_names.insert(t);
      domain.predicates.push_back(std::move(decl));
      ++idx;
    } else if (kw == "action") {
      std::string body = rest_after(line.text);
      LineCursor cur{body, 0, line.number};
      ActionSchema schema;
      schema.name = cur.ident();
      cur.expect('(');
      if (!cur.eat(')')) {
        do {
          Parameter p;
          p.name = cur.ident();
          cur.expect(':');
          p.type = cur.ident();
          for (const auto& existing : schema.params)
            if (existing.name == p.name)
              cur.fail("duplicate parameter '" + p.name + "'");
          schema.params.push_back(std::move(p));
        } while (cur.eat(','));
        cur.expect(')');
      }
      if (!cur.done()) cur.fail("trailing characters after action header");
      if (domain.find_schema(schema.name))
        throw ValidationError("duplicate schema name '" + schema.name + "' (line " +
                              std::to_string(line.number) + ")");
      ++idx;
      while (idx < lines.size() && lines[idx].indented) {
        const Line& section = lines[idx];
        size_t colon = section.text.find(':');
        if (colon == std::string::npos)
          throw ParseError("expected 'pre:', 'add:' or 'del:' section", section.number, 1);
        std::string label = section.text.substr(0, colon);
        std::string atoms = section.text.substr(colon + 1);
        if (label == "pre") {
          for (auto& lit : parse_literal_list(atoms, section.number, true)) {
            check_atom_against_params(lit.atom, schema, domain, section.number);
            schema.pre.push_back(std::move(lit));
          }
        } else if (label == "add" || label == "del") {
          for (auto& lit : parse_literal_list(atoms, section.number, false)) {
            check_atom_against_params(lit.atom, schema, domain, section.number);
            auto& list = label == "add" ? schema.add : schema.del;
            list.push_back(std::move(lit.atom));
          }
        } else {
          throw ParseError("unknown section '" + label + "'", section.number, 1);
        }
        ++idx;
      }
      for (const auto& p : schema.params) type_names.insert(p.type);
      domain.schemas.push_back(std::move(schema));
    } else {
      throw ParseError("expected 'predicate' or 'action', got '" + kw + "'", line.number, 1);
    }
  }

  if (domain.schemas.empty())
    throw ValidationError("domain must declare at least one action");

  // Atoms were validated against declarations as they were parsed;
  // cross-atom checks happen over the assembled definition.
  for (const auto& schema : domain.schemas) {
    for (const auto& atom : schema.add)
      if (std::find(schema.del.begin(), schema.del.end(), atom) != schema.del.end())
        throw ValidationError("action '" + schema.name + "': atom '" + atom.str() +
                              "' appears in both add and del");
    for (const auto& p : schema.params) {
      bool used = false;
      auto mentions = [&](const Atom& a) {
        return std::find(a.args.begin(), a.args.end(), p.name) != a.args.end();
      };
      for (const auto& lit : schema.pre) used = used || mentions(lit.atom);
      for (const auto& atom : schema.add) used = used || mentions(atom);
      for (const auto& atom : schema.del) used = used || mentions(atom);
      if (!used)
        throw ValidationError("action '" + schema.name + "': parameter '" + p.name +
                              "' is never referenced");
    }
  }

  domain.types.assign(type_names.begin(), type_names.end());
  return domain;
}

WorldState parse_instance(std::string_view text, const DomainDefinition& domain) {
  WorldState state;
  auto lines = significant_lines(text);
  size_t idx = 0;

  enum class Section { none, objects, init, goal };
  Section current = Section::none;
  bool saw_objects = false, saw_init = false, saw_goal = false;

  auto validate_ground_atom = [&](const Atom& atom, int line) {
    const PredicateDecl* pred = domain.find_predicate(atom.pred);
    if (!pred)
      throw ValidationError("undeclared predicate '" + atom.pred + "' (line " +
                            std::to_string(line) + ")");
    if (pred->arity() != static_cast<int>(atom.args.size()))
      throw ValidationError("predicate '" + atom.pred + "' expects " +
                            std::to_string(pred->arity()) + " argument(s) (line " +
                            std::to_string(line) + ")");
    for (size_t i = 0; i < atom.args.size(); ++i) {
      const TypedObject* obj = state.find_object(atom.args[i]);
      if (!obj)
        throw ValidationError("unknown object '" + atom.args[i] + "' (line " +
                              std::to_string(line) + ")");
      if (obj->type != pred->param_types[i])
        throw ValidationError("object '" + obj->name + "' of type '" + obj->type +
                              "' does not match predicate '" + atom.pred + "' position " +
                              std::to_string(i + 1) + " (line " + std::to_string(line) + ")");
    }
  };

  for (; idx < lines.size(); ++idx) {
    const Line& line = lines[idx];
    if (!line.indented && line.text == "objects") {
      current = Section::objects;
      saw_objects = true;
      continue;
    }
    if (!line.indented && line.text == "init") {
      current = Section::init;
      saw_init = true;
      continue;
    }
    if (!line.indented && line.text == "goal") {
      current = Section::goal;
      saw_goal = true;
      continue;
    }
    switch (current) {
      case Section::none:
        throw ParseError("expected 'objects', 'init' or 'goal' section header", line.number, 1);
      case Section::objects: {
        LineCursor cur{line.text, 0, line.number};
        do {
          TypedObject obj;
          obj.name = cur.ident();
          cur.expect(':');
          obj.type = cur.ident();
          if (state.find_object(obj.name))
            throw ValidationError("duplicate object '" + obj.name + "' (line " +
                                  std::to_string(line.number) + ")");
          if (std::find(domain.types.begin(), domain.types.end(), obj.type) == domain.types.end())
            throw ValidationError("object '" + obj.name + "' has unknown type '" + obj.type +
                                  "' (line " + std::to_string(line.number) + ")");
          state.objects.push_back(std::move(obj));
        } while (cur.eat(','));
        if (!cur.done()) cur.fail("trailing characters in objects line");
        break;
      }
      case Section::init:
      case Section::goal: {
        for (auto& lit : parse_literal_list(line.text, line.number, false)) {
          validate_ground_atom(lit.atom, line.number);
          if (current == Section::init)
            state.atoms.insert(std::move(lit.atom));
          else
            state.goal.insert(std::move(lit.atom));
        }
        break;
      }
    }
  }

  if (!saw_objects || !saw_init || !saw_goal)
    throw ValidationError("instance file must contain objects, init and goal sections");
  std::sort(state.objects.begin(), state.objects.end());
  return state;
}

std::string pretty_print(const DomainDefinition& domain) {
  std::ostringstream out;
  out << "domain " << domain.name << "\n";
  for (const auto& pred : domain.predicates) {
    out << "predicate " << pred.name << "/" << pred.arity();
    for (const auto& t : pred.param_types) out << " " << t;
    out << "\n";
  }
  auto atom_list = [&](const std::vector<Atom>& atoms) {
    std::string s;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (i) s += ", ";
      s += atoms[i].str();
    }
    return s;
  };
  for (const auto& schema : domain.schemas) {
    out << "action " << schema.name << "(";
    for (size_t i = 0; i < schema.params.size(); ++i) {
      if (i) out << ", ";
      out << schema.params[i].name << ":" << schema.params[i].type;
    }
    out << ")\n";
    if (!schema.pre.empty()) {
      out << "  pre: ";
      for (size_t i = 0; i < schema.pre.size(); ++i) {
        if (i) out << ", ";
        if (schema.pre[i].negated) out << "!";
        out << schema.pre[i].atom.str();
      }
      out << "\n";
    }
    if (!schema.add.empty()) out << "  add: " << atom_list(schema.add) << "\n";
    if (!schema.del.empty()) out << "  del: " << atom_list(schema.del) << "\n";
  }
  return out.str();
}

std::string pretty_print_instance(const WorldState& state) {
  std::ostringstream out;
  out << "objects\n";
  for (const auto& obj : state.objects) out << "  " << obj.name << ":" << obj.type << "\n";
  out << "init\n";
  for (const auto& atom : state.atoms) out << "  " << atom.str() << "\n";
  out << "goal\n";
  for (const auto& atom : state.goal) out << "  " << atom.str() << "\n";
  return out.str();
}

GroundResult ground(const DomainDefinition& domain, const WorldState& state,
                    const std::string& name, const std::vector<std::string>& args) {
  GroundResult result;
  const ActionSchema* schema = domain.find_schema(name);
  if (!schema) {
    result.error = StepErrorKind::unknown_action;
    result.message = "unknown action '" + name + "'";
    return result;
  }
  if (schema->arity() != static_cast<int>(args.size())) {
    result.error = StepErrorKind::bad_arity;
    result.message = "action '" + name + "' expects " + std::to_string(schema->arity()) +
                     " argument(s), got " + std::to_string(args.size());
    return result;
  }
  for (size_t i = 0; i < args.size(); ++i) {
    const TypedObject* obj = state.find_object(args[i]);
    if (!obj) {
      result.error = StepErrorKind::bad_arity;
      result.message = "unknown object '" + args[i] + "' in action '" + name + "'";
      return result;
    }
    if (obj->type != schema->params[i].type) {
      result.error = StepErrorKind::bad_arity;
      result.message = "object '" + args[i] + "' of type '" + obj->type +
                       "' does not match parameter '" + schema->params[i].name + ":" +
                       schema->params[i].type + "'";
      return result;
    }
    for (size_t j = 0; j < i; ++j) {
      if (args[j] == args[i]) {
        result.error = StepErrorKind::bad_arity;
        result.message = "repeated argument '" + args[i] + "' in action '" + name + "'";
        return result;
      }
    }
  }
  result.action = GroundAction{schema, args};
  return result;
}

namespace {

Atom substitute(const Atom& atom, const ActionSchema& schema,
                const std::vector<std::string>& args) {
  Atom ground_atom;
  ground_atom.pred = atom.pred;
  ground_atom.args.reserve(atom.args.size());
  for (const auto& param_name : atom.args) {
    for (size_t i = 0; i < schema.params.size(); ++i) {
      if (schema.params[i].name == param_name) {
        ground_atom.args.push_back(args[i]);
        break;
      }
    }
  }
  return ground_atom;
}

}  // namespace

bool applicable(const WorldState& state, const GroundAction& action) {
  for (const auto& lit : action.schema->pre) {
    Atom atom = substitute(lit.atom, *action.schema, action.args);
    bool holds = state.atoms.count(atom) > 0;
    if (lit.negated == holds) return false;
  }
  return true;
}

WorldState apply(const WorldState& state, const GroundAction& action) {
  if (!applicable(state, action))
    throw StateError("apply called with inapplicable action " + action.invocation_text());
  WorldState next = state;
  for (const auto& atom : action.schema->del)
    next.atoms.erase(substitute(atom, *action.schema, action.args));
  for (const auto& atom : action.schema->add)
    next.atoms.insert(substitute(atom, *action.schema, action.args));
  return next;
}

bool goal_satisfied(const WorldState& state) {
  return std::includes(state.atoms.begin(), state.atoms.end(), state.goal.begin(),
                       state.goal.end());
}

}  // namespace learnact
