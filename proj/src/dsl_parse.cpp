#include "learnact/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace learnact::dsl {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct SourceLine {
  int indent = 0;
  std::string text;
  int number = 0;
};

// Strips comments outside string literals; rejects tabs in indentation.
std::vector<SourceLine> logical_lines(std::string_view source) {
  std::vector<SourceLine> out;
  int number = 0;
  size_t pos = 0;
  while (pos <= source.size()) {
    size_t eol = source.find('\n', pos);
    std::string line(source.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                      : eol - pos));
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string stripped;
    char quote = 0;
    for (char c : line) {
      if (quote) {
        stripped += c;
        if (c == quote) quote = 0;
      } else if (c == '\'' || c == '"') {
        stripped += c;
        quote = c;
      } else if (c == '#') {
        break;
      } else {
        stripped += c;
      }
    }
    while (!stripped.empty() && std::isspace(static_cast<unsigned char>(stripped.back())))
      stripped.pop_back();

    int indent = 0;
    size_t i = 0;
    while (i < stripped.size() && (stripped[i] == ' ' || stripped[i] == '\t')) {
      if (stripped[i] == '\t')
        throw ParseError("tab in indentation; use spaces", number, static_cast<int>(i) + 1);
      ++indent;
      ++i;
    }
    if (i < stripped.size()) out.push_back({indent, stripped.substr(i), number});
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

struct Cursor {
  const std::string& s;
  int line;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size() && s[i] == ' ') ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, static_cast<int>(i) + 1);
  }
  bool peek(char c) {
    skip_ws();
    return i < s.size() && s[i] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  bool eat_word(std::string_view word) {
    skip_ws();
    size_t end = i + word.size();
    if (end > s.size() || s.compare(i, word.size(), word) != 0) return false;
    if (end < s.size() && is_ident_char(s[end])) return false;
    i = end;
    return true;
  }
  std::string ident() {
    skip_ws();
    if (i >= s.size() || !is_ident_start(s[i])) fail("expected identifier");
    size_t start = i;
    while (i < s.size() && is_ident_char(s[i])) ++i;
    return s.substr(start, i - start);
  }
  std::string string_lit() {
    skip_ws();
    char quote = s[i];
    ++i;
    std::string value;
    while (i < s.size() && s[i] != quote) value += s[i++];
    if (i >= s.size()) fail("unterminated string literal");
    ++i;
    return value;
  }
};

constexpr const char* kBuiltins[] = {"len", "reverse", "zip", "pairs", "slice", "holds"};

class Parser {
 public:
  explicit Parser(std::string_view source) : lines_(logical_lines(source)) {}

  Program parse() {
    Program program;
    while (pos_ < lines_.size()) {
      const SourceLine& line = lines_[pos_];
      if (line.indent != 0)
        throw ParseError("unexpected indentation at top level", line.number, line.indent + 1);
      program.functions.push_back(parse_function());
    }
    validate(program);
    return program;
  }

 private:
  FunctionDef parse_function() {
    const SourceLine& header = lines_[pos_];
    Cursor cur{header.text, header.number};
    if (!cur.eat_word("def")) cur.fail("expected 'def'");
    FunctionDef fn;
    fn.line = header.number;
    fn.name = cur.ident();
    if (is_builtin(fn.name))
      throw ValidationError("function name '" + fn.name + "' collides with a builtin (line " +
                            std::to_string(header.number) + ")");
    cur.expect('(');
    if (!cur.eat(')')) {
      do {
        std::string p = cur.ident();
        if (std::find(fn.params.begin(), fn.params.end(), p) != fn.params.end())
          cur.fail("duplicate parameter '" + p + "'");
        fn.params.push_back(std::move(p));
      } while (cur.eat(','));
      cur.expect(')');
    }
    cur.expect(':');
    if (!cur.done()) cur.fail("trailing characters after function header");
    ++pos_;
    fn.body = parse_block(0, header.number);
    return fn;
  }

  Block parse_block(int parent_indent, int header_line) {
    if (pos_ >= lines_.size() || lines_[pos_].indent <= parent_indent)
      throw ParseError("expected an indented block", header_line, 1);
    int block_indent = lines_[pos_].indent;
    Block block;
    while (pos_ < lines_.size() && lines_[pos_].indent == block_indent)
      block.push_back(parse_statement(block_indent));
    if (pos_ < lines_.size() && lines_[pos_].indent > parent_indent &&
        lines_[pos_].indent != block_indent)
      throw ParseError("inconsistent indentation", lines_[pos_].number, lines_[pos_].indent + 1);
    return block;
  }

  Stmt parse_statement(int indent) {
    const SourceLine& line = lines_[pos_];
    Cursor cur{line.text, line.number};
    Stmt stmt;
    stmt.line = line.number;

    if (cur.eat_word("for")) {
      stmt.kind = Stmt::Kind::for_loop;
      stmt.loop_vars.push_back(cur.ident());
      if (cur.eat(',')) stmt.loop_vars.push_back(cur.ident());
      if (!cur.eat_word("in")) cur.fail("expected 'in'");
      stmt.iterable = parse_expr(cur);
      cur.expect(':');
      if (!cur.done()) cur.fail("trailing characters after for header");
      ++pos_;
      stmt.body = parse_block(indent, line.number);
      return stmt;
    }
    if (cur.eat_word("if")) {
      stmt.kind = Stmt::Kind::if_else;
      stmt.condition = parse_expr(cur);
      cur.expect(':');
      if (!cur.done()) cur.fail("trailing characters after if header");
      ++pos_;
      stmt.then_body = parse_block(indent, line.number);
      if (pos_ < lines_.size() && lines_[pos_].indent == indent) {
        Cursor else_cur{lines_[pos_].text, lines_[pos_].number};
        if (else_cur.eat_word("else")) {
          else_cur.expect(':');
          if (!else_cur.done()) else_cur.fail("trailing characters after else");
          int else_line = lines_[pos_].number;
          ++pos_;
          stmt.else_body = parse_block(indent, else_line);
        }
      }
      return stmt;
    }
    if (cur.eat_word("let")) {
      stmt.kind = Stmt::Kind::let;
      stmt.let_name = cur.ident();
      cur.expect('=');
      stmt.let_value = parse_expr(cur);
      if (!cur.done()) cur.fail("trailing characters after let");
      ++pos_;
      return stmt;
    }
    if (cur.eat_word("break")) {
      stmt.kind = Stmt::Kind::break_;
      if (!cur.done()) cur.fail("trailing characters after break");
      ++pos_;
      return stmt;
    }
    if (cur.eat_word("assert")) {
      stmt.kind = Stmt::Kind::assert_;
      stmt.assert_cond = parse_expr(cur);
      if (cur.eat(',')) {
        cur.skip_ws();
        if (cur.i >= cur.s.size() || (cur.s[cur.i] != '\'' && cur.s[cur.i] != '"'))
          cur.fail("expected string literal message");
        stmt.assert_message = cur.string_lit();
      }
      if (!cur.done()) cur.fail("trailing characters after assert");
      ++pos_;
      return stmt;
    }

    stmt.kind = Stmt::Kind::call;
    stmt.call_name = cur.ident();
    if (is_builtin(stmt.call_name))
      throw ValidationError("builtin '" + stmt.call_name + "' cannot be used as an action (line " +
                            std::to_string(line.number) + ")");
    cur.expect('(');
    if (!cur.eat(')')) {
      do {
        stmt.call_args.push_back(parse_expr(cur));
      } while (cur.eat(','));
      cur.expect(')');
    }
    if (!cur.done()) cur.fail("trailing characters after call");
    ++pos_;
    return stmt;
  }

  ExprPtr parse_expr(Cursor& cur) { return parse_or(cur); }

  ExprPtr parse_or(Cursor& cur) {
    auto lhs = parse_and(cur);
    while (cur.eat_word("or")) {
      auto node = Expr::make(Expr::Kind::or_, cur.line);
      node->items.push_back(std::move(lhs));
      node->items.push_back(parse_and(cur));
      lhs = std::move(node);
    }
    return lhs;
  }

  ExprPtr parse_and(Cursor& cur) {
    auto lhs = parse_not(cur);
    while (cur.eat_word("and")) {
      auto node = Expr::make(Expr::Kind::and_, cur.line);
      node->items.push_back(std::move(lhs));
      node->items.push_back(parse_not(cur));
      lhs = std::move(node);
    }
    return lhs;
  }

  ExprPtr parse_not(Cursor& cur) {
    if (cur.eat_word("not")) {
      auto node = Expr::make(Expr::Kind::not_, cur.line);
      node->items.push_back(parse_not(cur));
      return node;
    }
    return parse_cmp(cur);
  }

  ExprPtr parse_cmp(Cursor& cur) {
    auto lhs = parse_postfix(cur);
    cur.skip_ws();
    if (cur.i + 1 < cur.s.size() &&
        ((cur.s[cur.i] == '=' && cur.s[cur.i + 1] == '=') ||
         (cur.s[cur.i] == '!' && cur.s[cur.i + 1] == '='))) {
      auto kind = cur.s[cur.i] == '=' ? Expr::Kind::eq : Expr::Kind::ne;
      cur.i += 2;
      auto node = Expr::make(kind, cur.line);
      node->items.push_back(std::move(lhs));
      node->items.push_back(parse_postfix(cur));
      return node;
    }
    return lhs;
  }

  ExprPtr parse_postfix(Cursor& cur) {
    auto base = parse_primary(cur);
    while (cur.eat('[')) {
      auto node = Expr::make(Expr::Kind::index, cur.line);
      node->items.push_back(std::move(base));
      node->items.push_back(parse_expr(cur));
      cur.expect(']');
      base = std::move(node);
    }
    return base;
  }

  ExprPtr parse_primary(Cursor& cur) {
    cur.skip_ws();
    if (cur.i >= cur.s.size()) cur.fail("expected expression");
    char c = cur.s[cur.i];
    if (c == '\'' || c == '"') {
      auto node = Expr::make(Expr::Kind::string_lit, cur.line);
      node->text = cur.string_lit();
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && cur.i + 1 < cur.s.size() &&
         std::isdigit(static_cast<unsigned char>(cur.s[cur.i + 1])))) {
      size_t start = cur.i;
      if (c == '-') ++cur.i;
      while (cur.i < cur.s.size() && std::isdigit(static_cast<unsigned char>(cur.s[cur.i])))
        ++cur.i;
      auto node = Expr::make(Expr::Kind::int_lit, cur.line);
      node->int_value = std::stoll(cur.s.substr(start, cur.i - start));
      return node;
    }
    if (c == '[') {
      ++cur.i;
      auto node = Expr::make(Expr::Kind::list, cur.line);
      if (!cur.eat(']')) {
        do {
          node->items.push_back(parse_expr(cur));
        } while (cur.eat(','));
        cur.expect(']');
      }
      return node;
    }
    if (c == '(') {
      ++cur.i;
      auto inner = parse_expr(cur);
      cur.expect(')');
      return inner;
    }
    if (is_ident_start(c)) {
      std::string name = cur.ident();
      if (name == "true" || name == "false") {
        auto node = Expr::make(Expr::Kind::bool_lit, cur.line);
        node->bool_value = name == "true";
        return node;
      }
      if (cur.peek('(')) {
        if (!is_builtin(name))
          cur.fail("only builtins (len, reverse, zip, pairs, slice, holds) may be called in "
                   "expressions; '" + name + "' is not one");
        cur.eat('(');
        auto node = Expr::make(Expr::Kind::builtin, cur.line);
        node->text = name;
        if (!cur.eat(')')) {
          do {
            node->items.push_back(parse_expr(cur));
          } while (cur.eat(','));
          cur.expect(')');
        }
        check_builtin_arity(*node);
        return node;
      }
      auto node = Expr::make(Expr::Kind::var, cur.line);
      node->text = name;
      return node;
    }
    cur.fail("unexpected character in expression");
  }

  static void check_builtin_arity(const Expr& node) {
    size_t n = node.items.size();
    auto fail = [&](const std::string& expected) {
      throw ParseError("builtin '" + node.text + "' expects " + expected + " argument(s)",
                       node.line, 1);
    };
    if (node.text == "len" && n != 1) fail("1");
    if (node.text == "reverse" && n != 1) fail("1");
    if (node.text == "zip" && n != 2) fail("2");
    if (node.text == "pairs" && n != 1) fail("1");
    if (node.text == "slice" && (n < 2 || n > 3)) fail("2 or 3");
    if (node.text == "holds" && n < 1) fail("at least 1");
  }

  // Scope rules, break placement, and recursion over defined functions.
  void validate(const Program& program) {
    std::set<std::string> names;
    for (const auto& fn : program.functions) {
      if (!names.insert(fn.name).second)
        throw ValidationError("duplicate function '" + fn.name + "' (line " +
                              std::to_string(fn.line) + ")");
    }
    for (const auto& fn : program.functions) {
      std::vector<std::string> scope(fn.params);
      check_block(fn.body, scope, false);
    }

    std::map<std::string, std::vector<std::string>> graph;
    for (const auto& fn : program.functions) {
      auto& edges = graph[fn.name];
      collect_calls(fn.body, program, edges);
    }
    std::set<std::string> visiting, done;
    for (const auto& fn : program.functions) check_cycle(fn.name, graph, visiting, done);
  }

  void check_block(const Block& block, std::vector<std::string> scope, bool in_loop) {
    for (const auto& stmt : block) {
      switch (stmt.kind) {
        case Stmt::Kind::call:
          for (const auto& arg : stmt.call_args) check_expr(*arg, scope);
          break;
        case Stmt::Kind::for_loop: {
          check_expr(*stmt.iterable, scope);
          auto inner = scope;
          for (const auto& v : stmt.loop_vars) inner.push_back(v);
          check_block(stmt.body, inner, true);
          break;
        }
        case Stmt::Kind::if_else:
          check_expr(*stmt.condition, scope);
          check_block(stmt.then_body, scope, in_loop);
          check_block(stmt.else_body, scope, in_loop);
          break;
        case Stmt::Kind::let:
          check_expr(*stmt.let_value, scope);
          scope.push_back(stmt.let_name);
          break;
        case Stmt::Kind::break_:
          if (!in_loop)
            throw ValidationError("break outside a loop (line " + std::to_string(stmt.line) + ")");
          break;
        case Stmt::Kind::assert_:
          check_expr(*stmt.assert_cond, scope);
          break;
      }
    }
  }

  void check_expr(const Expr& expr, const std::vector<std::string>& scope) {
    if (expr.kind == Expr::Kind::var) {
      if (std::find(scope.begin(), scope.end(), expr.text) == scope.end())
        throw ValidationError("undefined variable '" + expr.text + "' (line " +
                              std::to_string(expr.line) + ")");
    }
    for (const auto& item : expr.items) check_expr(*item, scope);
  }

  static void collect_calls(const Block& block, const Program& program,
                            std::vector<std::string>& out) {
    for (const auto& stmt : block) {
      if (stmt.kind == Stmt::Kind::call && program.find(stmt.call_name))
        out.push_back(stmt.call_name);
      collect_calls(stmt.body, program, out);
      collect_calls(stmt.then_body, program, out);
      collect_calls(stmt.else_body, program, out);
    }
  }

  static void check_cycle(const std::string& name,
                          const std::map<std::string, std::vector<std::string>>& graph,
                          std::set<std::string>& visiting, std::set<std::string>& done) {
    if (done.count(name)) return;
    if (!visiting.insert(name).second)
      throw ValidationError("recursion cycle through function '" + name + "'");
    auto it = graph.find(name);
    if (it != graph.end())
      for (const auto& callee : it->second) check_cycle(callee, graph, visiting, done);
    visiting.erase(name);
    done.insert(name);
  }

  std::vector<SourceLine> lines_;
  size_t pos_ = 0;
};

}  // namespace

const FunctionDef* Program::find(std::string_view name) const {
  for (const auto& fn : functions)
    if (fn.name == name) return &fn;
  return nullptr;
}

bool is_builtin(std::string_view name) {
  for (const char* b : kBuiltins)
    if (name == b) return true;
  return false;
}

Program parse_program(std::string_view source) { return Parser(source).parse(); }

std::vector<std::string> external_calls(const Program& program) {
  std::set<std::string> out;
  // Walk all statements; names that are not defined functions are
  // assumed to be atomic actions.
  struct Walker {
    const Program& program;
    std::set<std::string>& out;
    void walk(const Block& block) {
      for (const auto& stmt : block) {
        if (stmt.kind == Stmt::Kind::call && !program.find(stmt.call_name))
          out.insert(stmt.call_name);
        walk(stmt.body);
        walk(stmt.then_body);
        walk(stmt.else_body);
      }
    }
  } walker{program, out};
  for (const auto& fn : program.functions) walker.walk(fn.body);
  return {out.begin(), out.end()};
}

}  // namespace learnact::dsl
