#pragma once

#include "minilang_ast.hpp"

namespace wbfuzz::minilang {

// Rewrite passes. Each expression pass rewrites one expression tree bottom-up
// and reports every applied rewrite through the PassContext sink; the
// statement passes rewrite a whole program. Defined in minilang/passes.cpp,
// which doubles as the source tree scanned by the optimization collector.

ExprPtr fold_constants(ExprPtr e, PassContext& ctx);
ExprPtr add_zero_elim(ExprPtr e, PassContext& ctx);
ExprPtr mul_one_elim(ExprPtr e, PassContext& ctx);
ExprPtr neg_neg_elim(ExprPtr e, PassContext& ctx);
ExprPtr mul_add_fuse(ExprPtr e, PassContext& ctx);
ExprPtr concat_repeat_fuse(ExprPtr e, PassContext& ctx);
void dead_store_elim(Program& prog, PassContext& ctx);
ExprPtr cmp_chain_simplify(ExprPtr e, PassContext& ctx);

}  // namespace wbfuzz::minilang
