// MiniLang rewrite passes. Each rewrite reports its activation through the
// PassContext sink; the pipeline turns those into instrumentation lines.

#include "../minilang_passes.hpp"

#include <cstdlib>

#include "../minilang_arith.hpp"

namespace wbfuzz::minilang {

namespace {

using RewriteFn = ExprPtr (*)(ExprPtr, PassContext&);

// Rewrites every child of `e` with `fn`, in place.
ExprPtr map_children(ExprPtr e, RewriteFn fn, PassContext& ctx) {
  for (auto& child : e->args) {
    child = fn(std::move(child), ctx);
  }
  return e;
}

// True when `e` is a numeric literal.
bool is_const(const ExprPtr& e) {
  return e->kind == ExprKind::IntLit || e->kind == ExprKind::FloatLit;
}

// True when `e` is the integer literal `v`.
bool is_int_value(const ExprPtr& e, long long v) {
  return e->kind == ExprKind::IntLit && e->int_val == v;
}

// Structural equality of two pure expressions.
bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      if (a->int_val != b->int_val) return false;
      break;
    case ExprKind::FloatLit:
      if (a->float_val != b->float_val) return false;
      break;
    case ExprKind::StrLit:
    case ExprKind::Var:
      if (a->str_val != b->str_val) return false;
      break;
    case ExprKind::Bin:
      if (a->op != b->op) return false;
      break;
    case ExprKind::Call:
      if (a->builtin != b->builtin) return false;
      break;
    default:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!same_expr(a->args[i], b->args[i])) return false;
  }
  return true;
}

// Matches `a * b + c` (or `c + a * b`) over integers. Returns the three
// operands through the out parameters.
bool match_mul_add(const ExprPtr& e, ExprPtr& a, ExprPtr& b, ExprPtr& c) {
  if (e->kind != ExprKind::Bin || e->op != BinOp::Add) return false;
  if (e->type != ValueType::Int) return false;
  const ExprPtr& lhs = e->args[0];
  const ExprPtr& rhs = e->args[1];
  if (lhs->kind == ExprKind::Bin && lhs->op == BinOp::Mul && lhs->type == ValueType::Int) {
    a = lhs->args[0];
    b = lhs->args[1];
    c = rhs;
    return true;
  }
  if (rhs->kind == ExprKind::Bin && rhs->op == BinOp::Mul && rhs->type == ValueType::Int) {
    a = rhs->args[0];
    b = rhs->args[1];
    c = lhs;
    return true;
  }
  return false;
}

// Matches a left-leaning string concat chain whose leaves are all the same
// expression. Returns the repeated leaf and the chain length (>= 2).
bool match_concat_chain(const ExprPtr& e, ExprPtr& leaf, long long& count) {
  if (e->kind != ExprKind::Bin || e->op != BinOp::Add || e->type != ValueType::Str) return false;
  long long n = 1;
  ExprPtr cur = e;
  while (cur->kind == ExprKind::Bin && cur->op == BinOp::Add && cur->type == ValueType::Str) {
    ++n;
    leaf = cur->args[1];
    cur = cur->args[0];
  }
  if (!same_expr(cur, leaf)) return false;
  ExprPtr probe = e;
  while (probe->kind == ExprKind::Bin && probe->op == BinOp::Add) {
    if (!same_expr(probe->args[1], leaf)) return false;
    probe = probe->args[0];
  }
  count = n;
  return count >= 2;
}

// True when the expression reads the variable `name`.
bool reads_name(const ExprPtr& e, const std::string& name) {
  if (e->kind == ExprKind::Var) return e->str_val == name;
  for (const auto& child : e->args) {
    if (reads_name(child, name)) return true;
  }
  return false;
}

ExprPtr make_int_node(long long v) {
  ExprPtr node = make_expr(ExprKind::IntLit);
  node->int_val = v;
  node->type = ValueType::Int;
  return node;
}

ExprPtr make_float_node(double v) {
  ExprPtr node = make_expr(ExprKind::FloatLit);
  node->float_val = v;
  node->type = ValueType::Float;
  return node;
}

}  // namespace

// Rewrites arithmetic over numeric literals into a single literal, e.g.
// `1 + 2` becomes `3`. Only applies when both operands are constants per
// is_const; string operands are left alone.
ExprPtr fold_constants(ExprPtr e, PassContext& ctx) {
  e = map_children(std::move(e), &fold_constants, ctx);
  if (e->kind == ExprKind::Neg && is_const(e->args[0])) {
    const ExprPtr& v = e->args[0];
    ctx.fire("fold_constants");
    if (v->kind == ExprKind::FloatLit) return make_float_node(-v->float_val);
    return make_int_node(ml_neg_int(v->int_val));
  }
  if (e->kind != ExprKind::Bin) return e;
  if (e->op != BinOp::Add && e->op != BinOp::Sub && e->op != BinOp::Mul && e->op != BinOp::Div) {
    return e;
  }
  if (e->type != ValueType::Int && e->type != ValueType::Float) return e;
  const ExprPtr& lhs = e->args[0];
  const ExprPtr& rhs = e->args[1];
  if (!is_const(lhs) || !is_const(rhs)) return e;
  ctx.fire("fold_constants");
  if (e->type == ValueType::Float) {
    double a = lhs->kind == ExprKind::FloatLit ? lhs->float_val
                                               : static_cast<double>(lhs->int_val);
    double b = rhs->kind == ExprKind::FloatLit ? rhs->float_val
                                               : static_cast<double>(rhs->int_val);
    double r = 0.0;
    switch (e->op) {
      case BinOp::Add: r = a + b; break;
      case BinOp::Sub: r = a - b; break;
      case BinOp::Mul: r = a * b; break;
      case BinOp::Div: r = a / b; break;
      default: break;
    }
    return make_float_node(r);
  }
  long long a = lhs->int_val;
  long long b = rhs->int_val;
  long long r = 0;
  switch (e->op) {
    case BinOp::Add: r = ml_add_int(a, b); break;
    case BinOp::Sub: r = ml_sub_int(a, b); break;
    case BinOp::Mul: r = ml_mul_int(a, b); break;
    case BinOp::Div: r = ml_div_int(a, b); break;
    default: break;
  }
  return make_int_node(r);
}

// Drops additions of the integer literal zero: `e + 0`, `0 + e` and `e - 0`
// all become `e` when `e` is an integer expression.
ExprPtr add_zero_elim(ExprPtr e, PassContext& ctx) {
  e = map_children(std::move(e), &add_zero_elim, ctx);
  if (e->kind != ExprKind::Bin || e->type != ValueType::Int) return e;
  if (e->op == BinOp::Add) {
    if (is_int_value(e->args[1], 0) && e->args[0]->type == ValueType::Int) {
      ctx.fire("add_zero_elim");
      return e->args[0];
    }
    if (is_int_value(e->args[0], 0) && e->args[1]->type == ValueType::Int) {
      ctx.fire("add_zero_elim");
      return e->args[1];
    }
  }
  if (e->op == BinOp::Sub && is_int_value(e->args[1], 0) &&
      e->args[0]->type == ValueType::Int) {
    ctx.fire("add_zero_elim");
    return e->args[0];
  }
  return e;
}

// Drops multiplications by the integer literal one: `e * 1` and `1 * e`
// become `e` for integer expressions.
ExprPtr mul_one_elim(ExprPtr e, PassContext& ctx) {
  e = map_children(std::move(e), &mul_one_elim, ctx);
  if (e->kind != ExprKind::Bin || e->op != BinOp::Mul || e->type != ValueType::Int) return e;
  if (is_int_value(e->args[1], 1) && e->args[0]->type == ValueType::Int) {
    ctx.fire("mul_one_elim");
    return e->args[0];
  }
  if (is_int_value(e->args[0], 1) && e->args[1]->type == ValueType::Int) {
    ctx.fire("mul_one_elim");
    return e->args[1];
  }
  return e;
}

// Removes double negation: `--e` becomes `e` for numeric `e`. Safe for both
// integers (two's complement round trip) and floats (sign bit round trip).
ExprPtr neg_neg_elim(ExprPtr e, PassContext& ctx) {
  e = map_children(std::move(e), &neg_neg_elim, ctx);
  if (e->kind == ExprKind::Neg && e->args[0]->kind == ExprKind::Neg) {
    ctx.fire("neg_neg_elim");
    return e->args[0]->args[0];
  }
  return e;
}

// Contracts `a * b + c` over integers into a single fused multiply-add node.
// Integer arithmetic wraps, so the contraction is exact. In planted-bug mode
// the rewrite also arms the crash probe: a later crash_if_fused() call will
// abort the process. That planted crash is the reference RunCrash bug.
ExprPtr mul_add_fuse(ExprPtr e, PassContext& ctx) {
  e = map_children(std::move(e), &mul_add_fuse, ctx);
  ExprPtr a, b, c;
  if (!match_mul_add(e, a, b, c)) return e;
  ctx.fire("mul_add_fuse");
  if (ctx.planted && ctx.poison_flag != nullptr) {
    *ctx.poison_flag = true;
  }
  ExprPtr node = make_expr(ExprKind::Fma);
  node->type = ValueType::Int;
  node->args = {a, b, c};
  node->line = e->line;
  return node;
}

// Rewrites a concat chain of one repeated string expression, e.g. `s + s + s`,
// into a single repeat(s, n) call. In planted-bug mode the repeat count is
// off by one; that planted defect is the reference miscompilation bug and is
// caught by the differential oracle.
ExprPtr concat_repeat_fuse(ExprPtr e, PassContext& ctx) {
  e = map_children(std::move(e), &concat_repeat_fuse, ctx);
  ExprPtr leaf;
  long long count = 0;
  if (!match_concat_chain(e, leaf, count)) return e;
  ctx.fire("concat_repeat_fuse");
  if (ctx.planted) {
    count += 1;
  }
  ExprPtr node = make_expr(ExprKind::Call);
  node->builtin = BuiltinId::Repeat;
  node->type = ValueType::Str;
  node->args = {leaf, make_int_node(count)};
  node->line = e->line;
  return node;
}

// Removes a `let` whose binding is overwritten by a later `let` of the same
// name without any intervening read. All MiniLang expressions are pure, so
// dropping the dead store cannot change behavior.
void dead_store_elim(Program& prog, PassContext& ctx) {
  std::vector<bool> dead(prog.stmts.size(), false);
  for (std::size_t i = 0; i < prog.stmts.size(); ++i) {
    const Stmt& s = prog.stmts[i];
    if (s.kind != Stmt::Kind::Let) continue;
    for (std::size_t j = i + 1; j < prog.stmts.size(); ++j) {
      const Stmt& later = prog.stmts[j];
      bool used = false;
      if (later.expr && reads_name(later.expr, s.name)) used = true;
      for (const auto& arg : later.args) {
        if (reads_name(arg, s.name)) used = true;
      }
      if (used) break;
      if (later.kind == Stmt::Kind::Let && later.name == s.name) {
        dead[i] = true;
        ctx.fire("dead_store_elim");
        break;
      }
    }
  }
  std::vector<Stmt> kept;
  kept.reserve(prog.stmts.size());
  for (std::size_t i = 0; i < prog.stmts.size(); ++i) {
    if (!dead[i]) kept.push_back(std::move(prog.stmts[i]));
  }
  prog.stmts = std::move(kept);
}

// Decides comparisons whose two sides are the same pure expression, e.g.
// `x == x` becomes `true` and `x < x` becomes `false`. Floats are skipped
// because a NaN-valued operand would break the identity.
ExprPtr cmp_chain_simplify(ExprPtr e, PassContext& ctx) {
  e = map_children(std::move(e), &cmp_chain_simplify, ctx);
  if (e->kind != ExprKind::Bin || e->type != ValueType::Bool) return e;
  if (e->args[0]->type == ValueType::Float || e->args[1]->type == ValueType::Float) return e;
  if (!same_expr(e->args[0], e->args[1])) return e;
  bool value = false;
  switch (e->op) {
    case BinOp::Le:
    case BinOp::Ge:
    case BinOp::Eq:
      value = true;
      break;
    case BinOp::Lt:
    case BinOp::Gt:
    case BinOp::Ne:
      value = false;
      break;
    default:
      return e;
  }
  ctx.fire("cmp_chain_simplify");
  ExprPtr node = make_expr(ExprKind::BoolLit);
  node->type = ValueType::Bool;
  node->int_val = value ? 1 : 0;
  node->line = e->line;
  return node;
}

}  // namespace wbfuzz::minilang
