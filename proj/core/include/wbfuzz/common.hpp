#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wbfuzz {

// Configuration / usage problems. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The surrounding environment is unusable (SUT binary missing, backend
// unreachable at startup). CLI maps these to exit code 3.
struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The execution harness itself failed. Never attributed to the SUT.
struct SandboxFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorruptCampaign : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a, used for stable content ids and stub seeding.
std::uint64_t fnv1a64(std::string_view data);

std::string to_hex(std::uint64_t value);

// 64-bit avalanche mix (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::vector<std::string_view> split_lines(std::string_view text);
std::string_view trim(std::string_view s);

// Lowercase copy (ASCII only; enough for keyword matching).
std::string ascii_lower(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

// Filesystem-safe slug: [A-Za-z0-9_-], everything else mapped to '_'.
std::string slugify(std::string_view s);

}  // namespace wbfuzz
