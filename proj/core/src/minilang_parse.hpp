#pragma once

#include <span>
#include <string_view>

#include "minilang_ast.hpp"

namespace wbfuzz::minilang {

// Parses a MiniLang source text. Returns false and fills `diag` on the first
// syntax error. Builtin call names are injected by the pipeline.
bool parse_program(std::string_view src, std::span<const BuiltinInfo> builtins, Program& out,
                   Diag& diag);

}  // namespace wbfuzz::minilang
