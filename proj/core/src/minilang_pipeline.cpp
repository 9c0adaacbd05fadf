#include "wbfuzz/minilang.hpp"

#include <array>
#include <map>

#include "minilang_ast.hpp"
#include "minilang_interp.hpp"
#include "minilang_parse.hpp"
#include "minilang_passes.hpp"
#include "minilang_passes_embedded.hpp"
#include "wbfuzz/common.hpp"
#include "wbfuzz/sut.hpp"

namespace wbfuzz::minilang {

namespace {

// Builtin name strings live here, outside the scanned tree, so that keyword
// scans of the MiniLang sources only ever hit the pass implementations.
const std::array<BuiltinInfo, 2> kBuiltins = {
    BuiltinInfo{"repeat", BuiltinId::Repeat, 2, false, ValueType::Str},
    BuiltinInfo{"crash_if_fused", BuiltinId::CrashProbe, 0, true, ValueType::Int},
};

using ExprPass = ExprPtr (*)(ExprPtr, PassContext&);
using StmtPass = void (*)(Program&, PassContext&);

struct PassEntry {
  const char* name;
  ExprPass expr_pass = nullptr;
  StmtPass stmt_pass = nullptr;
};

// Application order; also the catalog order.
const std::array<PassEntry, 8> kPipeline = {
    PassEntry{"fold_constants", &fold_constants, nullptr},
    PassEntry{"add_zero_elim", &add_zero_elim, nullptr},
    PassEntry{"mul_one_elim", &mul_one_elim, nullptr},
    PassEntry{"neg_neg_elim", &neg_neg_elim, nullptr},
    PassEntry{"mul_add_fuse", &mul_add_fuse, nullptr},
    PassEntry{"concat_repeat_fuse", &concat_repeat_fuse, nullptr},
    PassEntry{"dead_store_elim", nullptr, &dead_store_elim},
    PassEntry{"cmp_chain_simplify", &cmp_chain_simplify, nullptr},
};

void apply_expr_pass(Program& prog, ExprPass pass, PassContext& ctx) {
  for (auto& stmt : prog.stmts) {
    if (stmt.expr) stmt.expr = pass(std::move(stmt.expr), ctx);
    for (auto& arg : stmt.args) arg = pass(std::move(arg), ctx);
  }
}

void optimize(Program& prog, PassContext& ctx) {
  for (const auto& entry : kPipeline) {
    if (entry.expr_pass != nullptr) {
      apply_expr_pass(prog, entry.expr_pass, ctx);
    } else {
      entry.stmt_pass(prog, ctx);
    }
  }
}

struct StubProgram {
  std::string_view pass;
  std::string_view program;
};

// One canonical trigger program per pass. Each is deliberately surgical: it
// activates its own pass and nothing else, which keeps bug deduplication and
// the trigger metrics exact in stub campaigns.
constexpr std::array<StubProgram, 8> kTriggerPrograms = {{
    {"fold_constants", "print(1 + 2);\n"},
    {"add_zero_elim", "let x = 5;\nprint(x + 0);\n"},
    {"mul_one_elim", "let y = 7;\nprint(y * 1);\n"},
    {"neg_neg_elim", "let a = 3;\nprint(--a);\n"},
    {"mul_add_fuse",
     "let a = 2;\nlet b = 3;\nlet c = 4;\nprint(a * b + c);\ncrash_if_fused();\n"},
    {"concat_repeat_fuse", "let s = \"ab\";\nprint(s + s + s);\n"},
    {"dead_store_elim", "let d = 1;\nlet d = 2;\nprint(d);\n"},
    {"cmp_chain_simplify", "let q = 4;\nprint(q == q);\n"},
}};

constexpr std::string_view kBenignProgram = "let z = 9;\nprint(z);\n";

struct Sketch {
  std::string_view pass;
  std::string_view prose;
  std::string_view pseudo;
};

constexpr std::array<Sketch, 8> kSketches = {{
    {"fold_constants",
     "The program must contain an arithmetic expression whose operands are all numeric "
     "literals, so the whole subexpression can be computed at compile time.",
     "print(<int literal> <op> <int literal>);"},
    {"add_zero_elim",
     "The program must add the integer literal zero to an integer expression (or subtract "
     "zero from it); the zero operand is then dropped.",
     "let x = <int>;\nprint(x + 0);"},
    {"mul_one_elim",
     "The program must multiply an integer expression by the integer literal one; the "
     "multiplication is then dropped.",
     "let y = <int>;\nprint(y * 1);"},
    {"neg_neg_elim",
     "The program must negate a numeric expression twice in a row; the double negation is "
     "removed.",
     "let a = <int>;\nprint(--a);"},
    {"mul_add_fuse",
     "The program must contain an integer multiplication whose result feeds an addition, "
     "shaped like a * b + c; the two operations are contracted into one fused multiply-add.",
     "let a = <int>;\nlet b = <int>;\nlet c = <int>;\nprint(a * b + c);"},
    {"concat_repeat_fuse",
     "The program must concatenate the same string expression with itself two or more times "
     "in a row; the chain is rewritten into a single repeat call.",
     "let s = <str>;\nprint(s + s + s);"},
    {"dead_store_elim",
     "The program must bind a name with let and then rebind the same name before any read of "
     "the first binding; the first store is removed.",
     "let d = <int>;\nlet d = <int>;\nprint(d);"},
    {"cmp_chain_simplify",
     "The program must compare a non-float expression with an identical copy of itself; the "
     "comparison is decided at compile time.",
     "let q = <int>;\nprint(q == q);"},
}};

}  // namespace

FrontEndStatus run_program(std::string_view source, const RunOptions& options,
                           const Sinks& sinks) {
  auto emit_err = [&](std::string_view text) {
    if (sinks.err) sinks.err(text);
  };

  Program prog;
  Diag diag;
  if (!parse_program(source, kBuiltins, prog, diag)) {
    emit_err(std::string(kErrorPrefix) + ": line " + std::to_string(diag.line) + ": " +
             diag.message + "\n");
    return FrontEndStatus::Rejected;
  }
  if (!check_program(prog, kBuiltins, diag)) {
    emit_err(std::string(kErrorPrefix) + ": line " + std::to_string(diag.line) + ": " +
             diag.message + "\n");
    return FrontEndStatus::Rejected;
  }

  ExecFlags flags;
  flags.planted = options.planted_bugs;

  if (options.mode == Mode::Optimized) {
    PassContext ctx;
    ctx.planted = options.planted_bugs;
    ctx.poison_flag = &flags.fma_poisoned;
    ctx.trigger_sink = [&](std::string_view pass_name) {
      emit_err(std::string(kTriggerLinePrefix) + std::string(pass_name) + "\n");
    };
    optimize(prog, ctx);
  }

  emit_err(std::string(kStageMarkerLine) + "\n");

  ExecSinks exec_sinks;
  exec_sinks.out = sinks.out;
  exec_sinks.err = sinks.err;
  eval_program(prog, flags, exec_sinks);
  return FrontEndStatus::Ok;
}

std::string_view passes_source_text() { return detail::kPassesSourceText; }

const std::vector<PassInfo>& pass_catalog() {
  static const std::vector<PassInfo> catalog = [] {
    std::vector<PassInfo> out;
    auto spans = scan_functions(passes_source_text(), LanguageFamily::BraceDelimited);
    std::map<std::string_view, const FunctionSpan*> by_name;
    for (const auto& span : spans) by_name[span.name] = &span;
    for (const auto& entry : kPipeline) {
      auto it = by_name.find(entry.name);
      if (it == by_name.end()) continue;  // would indicate a build mismatch
      PassInfo info;
      info.name = entry.name;
      info.source = it->second->source;
      info.line_start = it->second->line_start;
      info.line_end = it->second->line_end;
      out.push_back(std::move(info));
    }
    return out;
  }();
  return catalog;
}

std::vector<std::string> pass_names() {
  std::vector<std::string> names;
  for (const auto& entry : kPipeline) names.emplace_back(entry.name);
  return names;
}

std::vector<Optimization> list_minilang_optimizations() {
  return collect_text(kPassesFileLabel, passes_source_text(),
                      SutDescriptor::minilang_defaults());
}

std::string_view trigger_program(std::string_view pass_name) {
  for (const auto& entry : kTriggerPrograms) {
    if (entry.pass == pass_name) return entry.program;
  }
  return {};
}

std::string_view benign_program() { return kBenignProgram; }

std::string requirement_sketch(std::string_view pass_name) {
  for (const auto& sketch : kSketches) {
    if (sketch.pass == pass_name) {
      return std::string(sketch.prose) + "\n\n```\n" + std::string(sketch.pseudo) + "\n```\n";
    }
  }
  return "The program must satisfy the trigger conditions of the `" + std::string(pass_name) +
         "` optimization.\n\n```\n# shape sketch for " + std::string(pass_name) + "\n```\n";
}

}  // namespace wbfuzz::minilang
