#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wbfuzz/collector.hpp"

namespace wbfuzz::minilang {

inline constexpr std::string_view kPanicPrefix = "MINILANG PANIC";
inline constexpr std::string_view kErrorPrefix = "MINILANG ERROR";

enum class Mode { Baseline, Optimized };

struct RunOptions {
  Mode mode = Mode::Baseline;
  bool planted_bugs = false;
};

enum class FrontEndStatus { Ok, Rejected };

// Write-through output callbacks; wired to the real process streams by the
// bundled runner so that output survives a planted abort.
struct Sinks {
  std::function<void(std::string_view)> out;
  std::function<void(std::string_view)> err;
};

// Parses, checks, optionally optimizes (emitting one "WFOPT <pass>" line per
// applied rewrite plus the stage marker), then interprets. Returns Rejected
// on a front-end error, with a diagnostic line written to the err sink.
//
// In planted-bug mode a crash_if_fused() call after a fused multiply-add
// rewrite aborts the whole process; only call this in a sacrificial process
// when planted bugs are enabled.
FrontEndStatus run_program(std::string_view source, const RunOptions& options,
                           const Sinks& sinks);

struct PassInfo {
  std::string name;
  std::string source;
  int line_start = 0;
  int line_end = 0;
};

// The instrumented pass pipeline, in application order.
const std::vector<PassInfo>& pass_catalog();
std::vector<std::string> pass_names();

// Full text of the pass implementation file (embedded at build time).
std::string_view passes_source_text();
inline constexpr std::string_view kPassesFileLabel = "passes.cpp";

// The pass catalog as collector records, produced by running the collector
// over the embedded pass sources with the default MiniLang descriptor.
std::vector<Optimization> list_minilang_optimizations();

// Names of the passes carrying the documented planted bugs.
inline constexpr std::string_view kPlantedCrashPass = "mul_add_fuse";
inline constexpr std::string_view kPlantedMiscompilePass = "concat_repeat_fuse";

// Canonical programs used by the deterministic stub model. Each trigger
// program activates exactly its own pass; the benign program activates none.
std::string_view trigger_program(std::string_view pass_name);  // empty if unknown
std::string_view benign_program();

// Canned mixed-format (prose plus one trailing fenced pseudo-code block)
// trigger requirement for a pass, used by the stub analysis backend.
std::string requirement_sketch(std::string_view pass_name);

}  // namespace wbfuzz::minilang
