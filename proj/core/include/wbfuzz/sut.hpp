#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbfuzz/test_program.hpp"

namespace wbfuzz {

// Adapter wire contract: instrumented SUTs report one trigger line per pass
// activation on stderr, prefixed with kTriggerLinePrefix. A SUT may emit the
// stage marker once its front end accepted the program, which lets the
// adapter tell compile-time crashes from run-time crashes.
inline constexpr std::string_view kTriggerLinePrefix = "WFOPT ";
inline constexpr std::string_view kStageMarkerLine = "WFSTAGE compile-ok";
inline constexpr int kCompileRejectExit = 65;

// Static description of a system under test, consumed by the collector and
// the prompt engine.
struct SutDescriptor {
  std::string name;
  std::string input_kind;  // e.g. "MiniLang program"; fills [TARGET INPUT]
  std::string input_spec;  // fills [INPUT SPECIFICATION]
  std::vector<std::filesystem::path> source_roots;
  std::vector<std::string> opt_keywords;
  std::optional<int> max_source_lines;

  // Optional classification rules: a collected function whose source matches
  // one of these (case-insensitive substring) gets the corresponding kind.
  std::vector<std::string> pattern_keywords;
  std::vector<std::string> check_keywords;

  std::string program_extension = ".ml.txt";

  void validate() const;  // throws ConfigError on violated invariants

  static SutDescriptor minilang_defaults();
};

enum class RunMode { Optimized, Baseline };

enum class CompileStatus { Ok, CompileCrash, CompileReject };
enum class RunStatus { Ok, RunCrash, Timeout, NotRun };

std::string_view to_string(RunMode mode);
std::string_view to_string(CompileStatus s);
std::string_view to_string(RunStatus s);

struct RunRequest {
  TestProgram program;
  RunMode mode = RunMode::Baseline;
  std::chrono::milliseconds time_limit{5000};
  std::uint64_t memory_limit_bytes = 512ull << 20;
};

struct RunResult {
  CompileStatus compile_status = CompileStatus::Ok;
  RunStatus run_status = RunStatus::NotRun;
  std::string stdout_bytes;
  std::string stderr_bytes;
  std::vector<std::string> trigger_log;  // raw instrumentation lines
  std::optional<int> exit_signal;
  bool stdout_truncated = false;
  bool stderr_truncated = false;
};

// Executable manifest for driving an external SUT: two commands, each taking
// the program path via the {PROGRAM} placeholder (appended when absent).
struct SutManifest {
  std::vector<std::string> compile_run_optimized;
  std::vector<std::string> compile_run_baseline;
  std::vector<std::string> crash_patterns;  // stderr substrings treated as crashes
  std::vector<int> reject_exit_codes{kCompileRejectExit};
  std::string stage_marker{kStageMarkerLine};
  std::string program_extension = ".ml.txt";

  static SutManifest load(const std::filesystem::path& path);
  static SutManifest builtin_minilang(const std::filesystem::path& runner, bool planted_bugs);
};

// "builtin:minilang" or "builtin:minilang-planted" resolve to the bundled
// runner next to the current executable; anything else is a manifest path.
SutManifest resolve_manifest(const std::string& reference, bool planted_bugs);

std::filesystem::path self_exe_dir();

class SutAdapter {
 public:
  virtual ~SutAdapter() = default;

  // Executes the program under the requested mode. SUT failures are encoded
  // in the result; only harness failures throw (SandboxFailure).
  virtual RunResult compile_and_run(const RunRequest& request) = 0;
};

struct SpawnLimits {
  std::chrono::milliseconds time_limit{5000};
  std::chrono::milliseconds grace{2000};
  std::uint64_t memory_limit_bytes = 512ull << 20;
  std::size_t output_cap_bytes = 1u << 20;  // per stream
};

struct SpawnOutcome {
  int exit_code = 0;
  std::optional<int> signal;
  bool timed_out = false;
  std::string out;
  std::string err;
  bool out_truncated = false;
  bool err_truncated = false;
};

// fork/exec with captured, size-capped streams and a wall-clock kill.
SpawnOutcome spawn_capture(const std::vector<std::string>& argv, const SpawnLimits& limits);

// Subprocess adapter around a manifest. Safe for concurrent use; every run
// owns its own temp directory and child process.
class ProcessSutAdapter final : public SutAdapter {
 public:
  explicit ProcessSutAdapter(SutManifest manifest, std::size_t output_cap_bytes = 1u << 20);

  RunResult compile_and_run(const RunRequest& request) override;

  const SutManifest& manifest() const { return manifest_; }

 private:
  SutManifest manifest_;
  std::size_t output_cap_bytes_;
};

// Trigger lines (raw, prefix included) found in an stderr payload.
std::vector<std::string> extract_trigger_lines(std::string_view stderr_bytes,
                                               std::string_view prefix = kTriggerLinePrefix);

}  // namespace wbfuzz
