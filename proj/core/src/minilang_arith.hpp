#pragma once

// Arithmetic shared by the evaluator and the constant-rewriting pass so the
// two can never disagree. Integer overflow wraps (two's complement via
// unsigned arithmetic); integer division by zero yields zero so every
// MiniLang program is total.

#include <cstdint>

namespace wbfuzz::minilang {

inline long long ml_add_int(long long a, long long b) {
  return static_cast<long long>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

inline long long ml_sub_int(long long a, long long b) {
  return static_cast<long long>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

inline long long ml_mul_int(long long a, long long b) {
  return static_cast<long long>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

inline long long ml_div_int(long long a, long long b) {
  if (b == 0) return 0;
  if (b == -1) return ml_sub_int(0, a);  // avoids INT64_MIN / -1 overflow
  return a / b;
}

inline long long ml_neg_int(long long a) { return ml_sub_int(0, a); }

inline long long ml_fma_int(long long a, long long b, long long c) {
  return ml_add_int(ml_mul_int(a, b), c);
}

}  // namespace wbfuzz::minilang
