#pragma once

// Internal MiniLang representation shared by the parser, the checker, the
// evaluator and the rewrite passes. The implementation files that the
// optimization collector scans live under src/minilang/; this header stays
// outside that tree on purpose so that scanning only sees the pass bodies.

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace wbfuzz::minilang {

enum class ValueType { Int, Float, Str, Bool };

enum class BinOp { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne };

enum class BuiltinId { Repeat, CrashProbe };

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class ExprKind { IntLit, FloatLit, StrLit, BoolLit, Var, Neg, Bin, Call, Fma };

struct Expr {
  ExprKind kind{};
  ValueType type{ValueType::Int};  // annotated by the checker
  long long int_val{};             // IntLit; BoolLit uses 0/1
  double float_val{};
  std::string str_val;  // StrLit value or Var name
  BinOp op{};
  BuiltinId builtin{};
  std::vector<ExprPtr> args;  // operands / call arguments; Fma has (a, b, c)
  int line{1};
};

struct Stmt {
  enum class Kind { Let, Print, Call } kind{};
  std::string name;  // Let target
  ExprPtr expr;      // Let / Print operand
  BuiltinId builtin{};
  std::vector<ExprPtr> args;  // Call arguments
  int line{1};
};

struct Program {
  std::vector<Stmt> stmts;
};

struct Diag {
  int line = 0;
  std::string message;
};

struct BuiltinInfo {
  std::string name;
  BuiltinId id{};
  int arity = 0;
  bool stmt_only = false;  // callable only as a statement
  ValueType result{ValueType::Int};
};

// Rewrite-pass plumbing. fire() is the instrumentation point: the pipeline
// installs a sink that emits one trigger line per applied rewrite.
struct PassContext {
  bool planted = false;       // planted-bug mode
  bool* poison_flag = nullptr;  // armed by the planted multiply-add rewrite
  std::function<void(std::string_view)> trigger_sink;

  void fire(std::string_view pass_name) const {
    if (trigger_sink) trigger_sink(pass_name);
  }
};

ExprPtr make_expr(ExprKind kind);

}  // namespace wbfuzz::minilang
