// MiniLang semantic checker and evaluator.

#include "../minilang_interp.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "../minilang_arith.hpp"

namespace wbfuzz::minilang {

namespace {

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::Int: return "int";
    case ValueType::Float: return "float";
    case ValueType::Str: return "str";
    case ValueType::Bool: return "bool";
  }
  return "?";
}

bool numeric(ValueType t) { return t == ValueType::Int || t == ValueType::Float; }

class Checker {
 public:
  Checker(std::span<const BuiltinInfo> builtins, Diag& diag) : builtins_(builtins), diag_(diag) {}

  bool run(Program& prog) {
    for (auto& stmt : prog.stmts) {
      switch (stmt.kind) {
        case Stmt::Kind::Let:
          if (!check_expr(stmt.expr)) return false;
          env_[stmt.name] = stmt.expr->type;
          break;
        case Stmt::Kind::Print:
          if (!check_expr(stmt.expr)) return false;
          break;
        case Stmt::Kind::Call:
          for (auto& a : stmt.args) {
            if (!check_expr(a)) return false;
          }
          break;
      }
    }
    return true;
  }

 private:
  bool check_expr(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit: e->type = ValueType::Int; return true;
      case ExprKind::FloatLit: e->type = ValueType::Float; return true;
      case ExprKind::StrLit: e->type = ValueType::Str; return true;
      case ExprKind::BoolLit: e->type = ValueType::Bool; return true;
      case ExprKind::Var: {
        auto it = env_.find(e->str_val);
        if (it == env_.end()) {
          return fail(e->line, "unknown name '" + e->str_val + "'");
        }
        e->type = it->second;
        return true;
      }
      case ExprKind::Neg: {
        if (!check_expr(e->args[0])) return false;
        if (!numeric(e->args[0]->type)) {
          return fail(e->line, "unary '-' needs a numeric operand");
        }
        e->type = e->args[0]->type;
        return true;
      }
      case ExprKind::Bin:
        return check_binary(e);
      case ExprKind::Call:
        return check_call(e);
      case ExprKind::Fma: {
        for (auto& a : e->args) {
          if (!check_expr(a)) return false;
        }
        e->type = ValueType::Int;
        return true;
      }
    }
    return fail(e->line, "malformed expression");
  }

  bool check_binary(const ExprPtr& e) {
    if (!check_expr(e->args[0]) || !check_expr(e->args[1])) return false;
    ValueType a = e->args[0]->type;
    ValueType b = e->args[1]->type;
    switch (e->op) {
      case BinOp::Add:
        if (a == ValueType::Str && b == ValueType::Str) {
          e->type = ValueType::Str;
          return true;
        }
        [[fallthrough]];
      case BinOp::Sub:
      case BinOp::Mul:
      case BinOp::Div:
        if (numeric(a) && numeric(b)) {
          e->type = (a == ValueType::Float || b == ValueType::Float) ? ValueType::Float
                                                                     : ValueType::Int;
          return true;
        }
        return fail(e->line, std::string("arithmetic needs numeric operands, got ") +
                                 type_name(a) + " and " + type_name(b));
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge:
        if ((numeric(a) && numeric(b)) || (a == ValueType::Str && b == ValueType::Str)) {
          e->type = ValueType::Bool;
          return true;
        }
        return fail(e->line, "ordering needs two numbers or two strings");
      case BinOp::Eq:
      case BinOp::Ne:
        if ((numeric(a) && numeric(b)) || a == b) {
          e->type = ValueType::Bool;
          return true;
        }
        return fail(e->line, std::string("cannot compare ") + type_name(a) + " with " +
                                 type_name(b));
    }
    return fail(e->line, "malformed operator");
  }

  bool check_call(const ExprPtr& e) {
    for (auto& a : e->args) {
      if (!check_expr(a)) return false;
    }
    for (const auto& b : builtins_) {
      if (b.id != e->builtin) continue;
      if (b.id == BuiltinId::Repeat) {
        if (e->args[0]->type != ValueType::Str || e->args[1]->type != ValueType::Int) {
          return fail(e->line, "repeat needs (str, int)");
        }
      }
      e->type = b.result;
      return true;
    }
    return fail(e->line, "unknown builtin");
  }

  bool fail(int line, const std::string& msg) {
    diag_.line = line;
    diag_.message = msg;
    return false;
  }

  std::span<const BuiltinInfo> builtins_;
  Diag& diag_;
  std::map<std::string, ValueType> env_;
};

struct Value {
  ValueType t{ValueType::Int};
  long long i{};
  double f{};
  std::string s;

  double as_float() const { return t == ValueType::Float ? f : static_cast<double>(i); }
};

// Total result-length cap for repeat(); identical in both execution modes.
constexpr std::size_t kMaxStringBytes = 1u << 20;

class Evaluator {
 public:
  Evaluator(const ExecFlags& flags, const ExecSinks& sinks) : flags_(flags), sinks_(sinks) {}

  void run(const Program& prog) {
    for (const auto& stmt : prog.stmts) {
      switch (stmt.kind) {
        case Stmt::Kind::Let:
          env_[stmt.name] = eval(stmt.expr);
          break;
        case Stmt::Kind::Print: {
          Value v = eval(stmt.expr);
          emit_out(format_value(v));
          emit_out("\n");
          break;
        }
        case Stmt::Kind::Call:
          if (stmt.builtin == BuiltinId::CrashProbe) {
            crash_probe();
          }
          break;
      }
    }
  }

 private:
  void crash_probe() {
    if (flags_.planted && flags_.fma_poisoned) {
      emit_err("MINILANG PANIC: crash probe tripped after poisoned multiply-add rewrite\n");
      std::abort();
    }
  }

  Value eval(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit: return int_value(e->int_val);
      case ExprKind::FloatLit: return float_value(e->float_val);
      case ExprKind::StrLit: return str_value(e->str_val);
      case ExprKind::BoolLit: return bool_value(e->int_val != 0);
      case ExprKind::Var: return env_[e->str_val];
      case ExprKind::Neg: {
        Value v = eval(e->args[0]);
        if (v.t == ValueType::Float) return float_value(-v.f);
        return int_value(ml_neg_int(v.i));
      }
      case ExprKind::Bin: return eval_binary(e);
      case ExprKind::Call: return eval_call(e);
      case ExprKind::Fma: {
        Value a = eval(e->args[0]);
        Value b = eval(e->args[1]);
        Value c = eval(e->args[2]);
        return int_value(ml_fma_int(a.i, b.i, c.i));
      }
    }
    return int_value(0);
  }

  Value eval_binary(const ExprPtr& e) {
    Value a = eval(e->args[0]);
    Value b = eval(e->args[1]);
    switch (e->op) {
      case BinOp::Add:
        if (e->type == ValueType::Str) {
          std::string joined = a.s + b.s;
          if (joined.size() > kMaxStringBytes) joined.resize(kMaxStringBytes);
          return str_value(std::move(joined));
        }
        if (e->type == ValueType::Float) return float_value(a.as_float() + b.as_float());
        return int_value(ml_add_int(a.i, b.i));
      case BinOp::Sub:
        if (e->type == ValueType::Float) return float_value(a.as_float() - b.as_float());
        return int_value(ml_sub_int(a.i, b.i));
      case BinOp::Mul:
        if (e->type == ValueType::Float) return float_value(a.as_float() * b.as_float());
        return int_value(ml_mul_int(a.i, b.i));
      case BinOp::Div:
        if (e->type == ValueType::Float) {
          return float_value(a.as_float() / b.as_float());
        }
        return int_value(ml_div_int(a.i, b.i));
      case BinOp::Lt: return bool_value(compare(a, b) < 0);
      case BinOp::Le: return bool_value(compare(a, b) <= 0);
      case BinOp::Gt: return bool_value(compare(a, b) > 0);
      case BinOp::Ge: return bool_value(compare(a, b) >= 0);
      case BinOp::Eq: return bool_value(equal(a, b));
      case BinOp::Ne: return bool_value(!equal(a, b));
    }
    return int_value(0);
  }

  Value eval_call(const ExprPtr& e) {
    if (e->builtin == BuiltinId::Repeat) {
      Value s = eval(e->args[0]);
      Value n = eval(e->args[1]);
      std::string out;
      if (n.i > 0 && !s.s.empty()) {
        std::size_t count = static_cast<std::size_t>(n.i);
        std::size_t cap_count = kMaxStringBytes / s.s.size() + 1;
        if (count > cap_count) count = cap_count;
        out.reserve(std::min(kMaxStringBytes, s.s.size() * count));
        for (std::size_t k = 0; k < count && out.size() < kMaxStringBytes; ++k) {
          out += s.s;
        }
        if (out.size() > kMaxStringBytes) out.resize(kMaxStringBytes);
      }
      return str_value(std::move(out));
    }
    return int_value(0);
  }

  // Three-way compare for two numeric or two string values.
  static int compare(const Value& a, const Value& b) {
    if (a.t == ValueType::Str) {
      return a.s.compare(b.s) < 0 ? -1 : (a.s == b.s ? 0 : 1);
    }
    if (a.t == ValueType::Float || b.t == ValueType::Float) {
      double x = a.as_float();
      double y = b.as_float();
      if (x < y) return -1;
      if (x > y) return 1;
      return 0;
    }
    if (a.i < b.i) return -1;
    if (a.i > b.i) return 1;
    return 0;
  }

  static bool equal(const Value& a, const Value& b) {
    if (a.t == ValueType::Str || b.t == ValueType::Str) return a.s == b.s;
    if (a.t == ValueType::Bool || b.t == ValueType::Bool) return a.i == b.i;
    if (a.t == ValueType::Float || b.t == ValueType::Float) {
      return a.as_float() == b.as_float();
    }
    return a.i == b.i;
  }

  std::string format_value(const Value& v) const {
    switch (v.t) {
      case ValueType::Int: return std::to_string(v.i);
      case ValueType::Float: return format_float(v.f);
      case ValueType::Str: return v.s;
      case ValueType::Bool: return v.i != 0 ? "true" : "false";
    }
    return "";
  }

  static Value int_value(long long i) { return Value{ValueType::Int, i, 0.0, {}}; }
  static Value float_value(double f) { return Value{ValueType::Float, 0, f, {}}; }
  static Value bool_value(bool b) { return Value{ValueType::Bool, b ? 1 : 0, 0.0, {}}; }
  static Value str_value(std::string s) { return Value{ValueType::Str, 0, 0.0, std::move(s)}; }

  void emit_out(std::string_view text) {
    if (sinks_.out) sinks_.out(text);
  }
  void emit_err(std::string_view text) {
    if (sinks_.err) sinks_.err(text);
  }

  const ExecFlags& flags_;
  const ExecSinks& sinks_;
  std::map<std::string, Value> env_;
};

}  // namespace

bool check_program(Program& prog, std::span<const BuiltinInfo> builtins, Diag& diag) {
  Checker checker(builtins, diag);
  return checker.run(prog);
}

void eval_program(const Program& prog, const ExecFlags& flags, const ExecSinks& sinks) {
  Evaluator ev(flags, sinks);
  ev.run(prog);
}

std::string format_float(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace wbfuzz::minilang
