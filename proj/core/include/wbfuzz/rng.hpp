#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace wbfuzz {

// Deterministic xoshiro256++ stream. Campaigns derive one named stream per
// consumer (one per optimization pool, one per stub sample, ...) so that
// results do not depend on scheduling order. The distributions are
// implemented here rather than taken from <random> because libstdc++ does
// not guarantee identical sequences across versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view stream_name);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double next_double();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via the polar method.
  double next_normal();

  // Gamma(shape, 1). Marsaglia-Tsang for shape >= 1, Johnk boost below.
  double next_gamma(double shape);

  // Beta(a, b) via two gamma draws.
  double next_beta(double a, double b);

  std::array<std::uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<std::uint64_t, 4>& s) { state_ = s; }

 private:
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace wbfuzz
