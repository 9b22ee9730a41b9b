#include "learnact/dsl_interp.hpp"

#include <algorithm>
#include <map>

#include "learnact/text_render.hpp"

namespace learnact::dsl {

namespace {

// Internal control-flow signal for aborting an execution.
struct AbortSignal {
  StepErrorKind kind;
  std::string message;
};

[[noreturn]] void abort_run(StepErrorKind kind, const std::string& message) {
  throw AbortSignal{kind, message};
}

[[noreturn]] void type_error(const std::string& message, int line) {
  abort_run(StepErrorKind::dsl_runtime_error,
            message + " (line " + std::to_string(line) + ")");
}

using Frame = std::map<std::string, Value>;

enum class Flow { normal, broke };

class Interpreter {
 public:
  Interpreter(const Program& program, DslEnv& env) : program_(program), env_(env) {}

  SubTrace run(const std::string& function, const std::vector<Value>& args) {
    const FunctionDef* fn = program_.find(function);
    if (!fn) throw ValidationError("unknown function '" + function + "'");
    try {
      call_function(*fn, args, 0);
      trace_.completed = true;
    } catch (const AbortSignal& signal) {
      trace_.completed = false;
      trace_.abort_kind = signal.kind;
      trace_.abort_message = signal.message;
      // A failed atomic step is already appended; runtime errors point
      // past the last issued step.
      trace_.abort_index = static_cast<int>(trace_.steps.size());
      if (signal.kind == StepErrorKind::precondition_failed && !trace_.steps.empty())
        trace_.abort_index = static_cast<int>(trace_.steps.size()) - 1;
    }
    return std::move(trace_);
  }

 private:
  void call_function(const FunctionDef& fn, const std::vector<Value>& args, int call_line) {
    if (args.size() != fn.params.size())
      abort_run(StepErrorKind::dsl_runtime_error,
                "function '" + fn.name + "' expects " + std::to_string(fn.params.size()) +
                    " argument(s), got " + std::to_string(args.size()) +
                    (call_line ? " (line " + std::to_string(call_line) + ")" : ""));
    Frame frame;
    for (size_t i = 0; i < args.size(); ++i) frame[fn.params[i]] = args[i];
    run_block(fn.body, frame);
  }

  Flow run_block(const Block& block, Frame& frame) {
    for (const auto& stmt : block) {
      switch (stmt.kind) {
        case Stmt::Kind::call: {
          std::vector<Value> args;
          args.reserve(stmt.call_args.size());
          for (const auto& arg : stmt.call_args) args.push_back(eval(*arg, frame));
          if (const FunctionDef* fn = program_.find(stmt.call_name)) {
            call_function(*fn, args, stmt.line);
          } else {
            issue_atomic(stmt, args);
          }
          break;
        }
        case Stmt::Kind::for_loop: {
          Value iterable = eval(*stmt.iterable, frame);
          if (!iterable.is_list()) type_error("for-loop iterable must be a list", stmt.line);
          for (const Value& element : iterable.as_list()) {
            if (stmt.loop_vars.size() == 2) {
              if (!element.is_list() || element.as_list().size() != 2)
                type_error("cannot destructure a non-pair element", stmt.line);
              frame[stmt.loop_vars[0]] = element.as_list()[0];
              frame[stmt.loop_vars[1]] = element.as_list()[1];
            } else {
              frame[stmt.loop_vars[0]] = element;
            }
            if (run_block(stmt.body, frame) == Flow::broke) break;
          }
          break;
        }
        case Stmt::Kind::if_else: {
          Value cond = eval(*stmt.condition, frame);
          if (!cond.is_bool()) type_error("if condition must be a boolean", stmt.line);
          Flow flow = run_block(cond.as_bool() ? stmt.then_body : stmt.else_body, frame);
          if (flow == Flow::broke) return Flow::broke;
          break;
        }
        case Stmt::Kind::let:
          frame[stmt.let_name] = eval(*stmt.let_value, frame);
          break;
        case Stmt::Kind::break_:
          return Flow::broke;
        case Stmt::Kind::assert_: {
          Value cond = eval(*stmt.assert_cond, frame);
          if (!cond.is_bool()) type_error("assert condition must be a boolean", stmt.line);
          if (!cond.as_bool())
            abort_run(StepErrorKind::dsl_runtime_error,
                      "assertion failed" +
                          (stmt.assert_message.empty() ? std::string()
                                                       : ": " + stmt.assert_message) +
                          " (line " + std::to_string(stmt.line) + ")");
          break;
        }
      }
    }
    return Flow::normal;
  }

  void issue_atomic(const Stmt& stmt, const std::vector<Value>& args) {
    std::vector<std::string> names;
    names.reserve(args.size());
    for (const auto& value : args) {
      if (!value.is_string())
        type_error("arguments of action '" + stmt.call_name + "' must be object names",
                   stmt.line);
      names.push_back(value.as_string());
    }
    if (env_.budget_remaining() <= 0)
      abort_run(StepErrorKind::dsl_runtime_error, "step budget exhausted");
    DslEnv::AtomicOutcome outcome = env_.atomic_step(stmt.call_name, names);
    if (!outcome.ground.ok())
      abort_run(StepErrorKind::dsl_runtime_error,
                outcome.ground.message + " (line " + std::to_string(stmt.line) + ")");
    trace_.steps.push_back({*outcome.ground.action, outcome.valid, outcome.observation});
    if (!outcome.valid)
      abort_run(StepErrorKind::precondition_failed,
                "precondition failed for " + outcome.ground.action->invocation_text());
  }

  Value eval(const Expr& expr, Frame& frame) {
    switch (expr.kind) {
      case Expr::Kind::string_lit:
        return Value(expr.text);
      case Expr::Kind::int_lit:
        return Value(static_cast<std::int64_t>(expr.int_value));
      case Expr::Kind::bool_lit:
        return Value(expr.bool_value);
      case Expr::Kind::var: {
        auto it = frame.find(expr.text);
        if (it == frame.end())
          type_error("undefined variable '" + expr.text + "'", expr.line);
        return it->second;
      }
      case Expr::Kind::list: {
        Value::List items;
        items.reserve(expr.items.size());
        for (const auto& item : expr.items) items.push_back(eval(*item, frame));
        return Value(std::move(items));
      }
      case Expr::Kind::eq:
      case Expr::Kind::ne: {
        Value lhs = eval(*expr.items[0], frame);
        Value rhs = eval(*expr.items[1], frame);
        bool equal = lhs == rhs;
        return Value(expr.kind == Expr::Kind::eq ? equal : !equal);
      }
      case Expr::Kind::and_: {
        Value lhs = eval(*expr.items[0], frame);
        if (!lhs.is_bool()) type_error("'and' operands must be booleans", expr.line);
        if (!lhs.as_bool()) return Value(false);
        Value rhs = eval(*expr.items[1], frame);
        if (!rhs.is_bool()) type_error("'and' operands must be booleans", expr.line);
        return rhs;
      }
      case Expr::Kind::or_: {
        Value lhs = eval(*expr.items[0], frame);
        if (!lhs.is_bool()) type_error("'or' operands must be booleans", expr.line);
        if (lhs.as_bool()) return Value(true);
        Value rhs = eval(*expr.items[1], frame);
        if (!rhs.is_bool()) type_error("'or' operands must be booleans", expr.line);
        return rhs;
      }
      case Expr::Kind::not_: {
        Value operand = eval(*expr.items[0], frame);
        if (!operand.is_bool()) type_error("'not' operand must be a boolean", expr.line);
        return Value(!operand.as_bool());
      }
      case Expr::Kind::index: {
        Value base = eval(*expr.items[0], frame);
        Value idx = eval(*expr.items[1], frame);
        if (!base.is_list()) type_error("only lists can be indexed", expr.line);
        if (!idx.is_int()) type_error("list index must be an integer", expr.line);
        long long n = static_cast<long long>(base.as_list().size());
        long long i = idx.as_int();
        if (i < 0) i += n;
        if (i < 0 || i >= n) type_error("list index out of range", expr.line);
        return base.as_list()[static_cast<size_t>(i)];
      }
      case Expr::Kind::builtin:
        return eval_builtin(expr, frame);
    }
    type_error("unreachable expression kind", expr.line);
  }

  Value eval_builtin(const Expr& expr, Frame& frame) {
    std::vector<Value> args;
    args.reserve(expr.items.size());
    for (const auto& item : expr.items) args.push_back(eval(*item, frame));
    const std::string& name = expr.text;

    auto want_list = [&](const Value& value) -> const Value::List& {
      if (!value.is_list())
        type_error("builtin '" + name + "' expects a list argument", expr.line);
      return value.as_list();
    };

    if (name == "len") {
      if (args[0].is_list()) return Value(static_cast<std::int64_t>(args[0].as_list().size()));
      if (args[0].is_string()) return Value(static_cast<std::int64_t>(args[0].as_string().size()));
      type_error("len expects a list or string", expr.line);
    }
    if (name == "reverse") {
      Value::List out = want_list(args[0]);
      std::reverse(out.begin(), out.end());
      return Value(std::move(out));
    }
    if (name == "zip") {
      const auto& a = want_list(args[0]);
      const auto& b = want_list(args[1]);
      Value::List out;
      size_t n = std::min(a.size(), b.size());
      out.reserve(n);
      for (size_t i = 0; i < n; ++i) out.push_back(Value(Value::List{a[i], b[i]}));
      return Value(std::move(out));
    }
    if (name == "pairs") {
      // pairs(l) = zip(l, l[1:]): consecutive (element, next) pairs.
      const auto& list = want_list(args[0]);
      Value::List out;
      if (list.size() >= 2) {
        out.reserve(list.size() - 1);
        for (size_t i = 0; i + 1 < list.size(); ++i)
          out.push_back(Value(Value::List{list[i], list[i + 1]}));
      }
      return Value(std::move(out));
    }
    if (name == "slice") {
      const auto& list = want_list(args[0]);
      if (!args[1].is_int() || (args.size() == 3 && !args[2].is_int()))
        type_error("slice bounds must be integers", expr.line);
      long long n = static_cast<long long>(list.size());
      auto clamp = [n](long long v) {
        if (v < 0) v += n;
        return std::max(0LL, std::min(v, n));
      };
      long long start = clamp(args[1].as_int());
      long long end = args.size() == 3 ? clamp(args[2].as_int()) : n;
      Value::List out;
      for (long long i = start; i < end; ++i) out.push_back(list[static_cast<size_t>(i)]);
      return Value(std::move(out));
    }
    if (name == "holds") {
      Atom atom;
      if (!args[0].is_string()) type_error("holds expects a predicate name string", expr.line);
      atom.pred = args[0].as_string();
      for (size_t i = 1; i < args.size(); ++i) {
        if (!args[i].is_string())
          type_error("holds arguments must be object names", expr.line);
        atom.args.push_back(args[i].as_string());
      }
      return Value(env_.holds(atom));
    }
    type_error("unknown builtin '" + name + "'", expr.line);
  }

  const Program& program_;
  DslEnv& env_;
  SubTrace trace_;
};

// Simulated environment for pure expansion: applies actions to a state
// copy and renders nothing.
class SimEnv final : public DslEnv {
 public:
  SimEnv(const DomainDefinition& domain, WorldState state)
      : domain_(domain), state_(std::move(state)) {}

  AtomicOutcome atomic_step(const std::string& name,
                            const std::vector<std::string>& args) override {
    AtomicOutcome outcome;
    outcome.ground = ground(domain_, state_, name, args);
    if (!outcome.ground.ok()) return outcome;
    attempts_.push_back(*outcome.ground.action);
    if (applicable(state_, *outcome.ground.action)) {
      state_ = apply(state_, *outcome.ground.action);
      outcome.valid = true;
    } else {
      outcome.valid = false;
      outcome.observation = kInvalidActionSentence;
    }
    return outcome;
  }

  bool holds(const Atom& atom) const override { return state_.atoms.count(atom) > 0; }

  long long budget_remaining() const override { return 1LL << 40; }

  const WorldState& state() const { return state_; }
  const std::vector<GroundAction>& attempts() const { return attempts_; }

 private:
  const DomainDefinition& domain_;
  WorldState state_;
  std::vector<GroundAction> attempts_;
};

}  // namespace

SubTrace execute(const Program& program, const std::string& function,
                 const std::vector<Value>& args, DslEnv& env) {
  return Interpreter(program, env).run(function, args);
}

Expansion expand(const Program& program, const std::string& function,
                 const std::vector<Value>& args, const DomainDefinition& domain,
                 const WorldState& start) {
  SimEnv sim(domain, start);
  Expansion out;
  out.trace = Interpreter(program, sim).run(function, args);
  out.actions = sim.attempts();
  out.final_state = sim.state();
  return out;
}

}  // namespace learnact::dsl
