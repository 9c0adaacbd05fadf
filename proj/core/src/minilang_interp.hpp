#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "minilang_ast.hpp"

namespace wbfuzz::minilang {

// Write-through output sinks. The runner wires these to the real process
// streams so that output emitted before a planted abort is preserved.
struct ExecSinks {
  std::function<void(std::string_view)> out;
  std::function<void(std::string_view)> err;
};

struct ExecFlags {
  bool planted = false;
  bool fma_poisoned = false;  // set by the planted multiply-add rewrite
};

// Annotates expression types and checks name binding. Returns false and
// fills `diag` on the first semantic error.
bool check_program(Program& prog, std::span<const BuiltinInfo> builtins, Diag& diag);

// Executes a checked program. Never fails on well-typed input, with one
// exception: a poisoned crash probe writes a panic line and aborts the
// process (that is the planted crash).
void eval_program(const Program& prog, const ExecFlags& flags, const ExecSinks& sinks);

// Deterministic value formatting used by print.
std::string format_float(double v);

}  // namespace wbfuzz::minilang
