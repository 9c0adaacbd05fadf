#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbfuzz/sut.hpp"

namespace wbfuzz {

enum class OptKind { CheckFunction, PatternMatcher, Generic };

std::string_view to_string(OptKind kind);
OptKind opt_kind_from_string(std::string_view s);

struct AuxFunction {
  std::string name;
  std::string source;
};

// One collected optimization pass.
struct Optimization {
  std::string id;  // stable hash of path + name
  std::string name;
  OptKind kind = OptKind::Generic;
  std::string main_source;
  std::vector<AuxFunction> aux_sources;
  std::string file_path;
  int line_start = 0;
  int line_end = 0;
  int total_lines = 0;  // lines of main_source plus all aux sources
};

enum class LanguageFamily { BraceDelimited, IndentDelimited };

struct FunctionSpan {
  std::string name;
  std::string source;  // signature, body and any attached doc comment
  std::size_t offset_start = 0;
  std::size_t offset_end = 0;  // one past the closing brace / last body line
  int line_start = 0;
  int line_end = 0;
};

// Fatal collection problem (unreadable source root).
struct CollectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every function definition in the text, in order of appearance. Heuristic
// by design: balanced-brace scanning for brace languages, indentation
// scanning for `def`-style languages.
std::vector<FunctionSpan> scan_functions(std::string_view source, LanguageFamily family);

// Smallest function enclosing `match_offset`, or nullopt when the offset sits
// outside every function (NoEnclosingFunction).
std::optional<FunctionSpan> extract_function(std::string_view source, LanguageFamily family,
                                             std::size_t match_offset);

struct CollectOptions {
  int aux_depth = 1;
  // Per-file family is chosen by extension; set to force one family.
  std::optional<LanguageFamily> force_family;
};

// Scans descriptor.source_roots for functions matching any opt_keyword
// (case-insensitive substring over name and body), attaches auxiliaries and
// applies the max_source_lines filter. Deterministic order by (file, line).
std::vector<Optimization> collect(const SutDescriptor& descriptor, CollectOptions options = {},
                                  std::vector<std::string>* warnings = nullptr);

// Same, over one in-memory source text; the corpus for auxiliaries is that
// text's own functions.
std::vector<Optimization> collect_text(std::string_view file_label, std::string_view text,
                                       const SutDescriptor& descriptor,
                                       CollectOptions options = {});

// Adds functions reachable from opt.main_source by call-name matching, up to
// `depth` hops, and refreshes total_lines.
Optimization& attach_auxiliaries(Optimization& opt, const std::vector<FunctionSpan>& corpus,
                                 int depth);

void write_catalog(const std::filesystem::path& path, const std::vector<Optimization>& catalog);
std::vector<Optimization> read_catalog(const std::filesystem::path& path);

}  // namespace wbfuzz
