#include "wbfuzz/sut.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "wbfuzz/common.hpp"

namespace wbfuzz {

namespace {

using ordered_json = nlohmann::ordered_json;

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    auto base = std::filesystem::temp_directory_path() / "wbfuzz-run-XXXXXX";
    std::string tpl = base.string();
    if (::mkdtemp(tpl.data()) == nullptr) {
      throw SandboxFailure(std::string("mkdtemp failed: ") + std::strerror(errno));
    }
    path = tpl;
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

struct Pipe {
  int read_fd = -1;
  int write_fd = -1;

  Pipe() {
    int fds[2];
    if (::pipe(fds) != 0) {
      throw SandboxFailure(std::string("pipe failed: ") + std::strerror(errno));
    }
    read_fd = fds[0];
    write_fd = fds[1];
  }

  ~Pipe() {
    if (read_fd >= 0) ::close(read_fd);
    if (write_fd >= 0) ::close(write_fd);
  }

  void close_read() {
    if (read_fd >= 0) ::close(read_fd);
    read_fd = -1;
  }
  void close_write() {
    if (write_fd >= 0) ::close(write_fd);
    write_fd = -1;
  }

  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;
};

bool stderr_has_line(std::string_view payload, std::string_view wanted) {
  for (auto line : split_lines(payload)) {
    if (line == wanted) return true;
  }
  return false;
}

}  // namespace

void SutDescriptor::validate() const {
  if (source_roots.empty()) {
    throw ConfigError("sut descriptor: source_roots must be non-empty");
  }
  if (opt_keywords.empty()) {
    throw ConfigError("sut descriptor: opt_keywords must be non-empty");
  }
  if (max_source_lines.has_value() && *max_source_lines <= 0) {
    throw ConfigError("sut descriptor: max_source_lines must be positive");
  }
}

SutDescriptor SutDescriptor::minilang_defaults() {
  SutDescriptor d;
  d.name = "minilang";
  d.input_kind = "MiniLang program";
  d.input_spec =
      "public MiniLang builtins: let bindings, print, repeat(str, int), integer/float/string "
      "expressions and comparisons";
  d.source_roots = {"core/src/minilang"};
  d.opt_keywords = {"fuse", "fold", "elim", "simplif"};
  d.max_source_lines = 400;
  d.pattern_keywords = {"match_"};
  d.check_keywords = {"is_const"};
  return d;
}

std::string_view to_string(RunMode mode) {
  return mode == RunMode::Optimized ? "optimized" : "baseline";
}

std::string_view to_string(CompileStatus s) {
  switch (s) {
    case CompileStatus::Ok: return "ok";
    case CompileStatus::CompileCrash: return "compile_crash";
    case CompileStatus::CompileReject: return "compile_reject";
  }
  return "?";
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::RunCrash: return "run_crash";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::NotRun: return "not_run";
  }
  return "?";
}

SutManifest SutManifest::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw EnvironmentError(std::string("cannot load SUT manifest: ") + e.what());
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed SUT manifest ") + path.string() + ": " + e.what());
  }
  SutManifest m;
  try {
    m.compile_run_optimized = doc.at("compile_run_optimized").get<std::vector<std::string>>();
    m.compile_run_baseline = doc.at("compile_run_baseline").get<std::vector<std::string>>();
    if (doc.contains("crash_patterns")) {
      m.crash_patterns = doc["crash_patterns"].get<std::vector<std::string>>();
    }
    if (doc.contains("reject_exit_codes")) {
      m.reject_exit_codes = doc["reject_exit_codes"].get<std::vector<int>>();
    }
    if (doc.contains("stage_marker")) m.stage_marker = doc["stage_marker"].get<std::string>();
    if (doc.contains("program_extension")) {
      m.program_extension = doc["program_extension"].get<std::string>();
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed SUT manifest ") + path.string() + ": " + e.what());
  }
  if (m.compile_run_optimized.empty() || m.compile_run_baseline.empty()) {
    throw ConfigError("SUT manifest commands must be non-empty");
  }
  return m;
}

SutManifest SutManifest::builtin_minilang(const std::filesystem::path& runner,
                                          bool planted_bugs) {
  SutManifest m;
  m.compile_run_optimized = {runner.string(), "{PROGRAM}", "--mode=optimized"};
  m.compile_run_baseline = {runner.string(), "{PROGRAM}", "--mode=baseline"};
  if (planted_bugs) {
    m.compile_run_optimized.push_back("--planted-bugs");
    m.compile_run_baseline.push_back("--planted-bugs");
  }
  m.crash_patterns = {"MINILANG PANIC"};
  m.program_extension = ".ml.txt";
  return m;
}

std::filesystem::path self_exe_dir() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return std::filesystem::current_path();
  buf[n] = '\0';
  return std::filesystem::path(buf).parent_path();
}

SutManifest resolve_manifest(const std::string& reference, bool planted_bugs) {
  if (reference == "builtin:minilang") {
    auto runner = self_exe_dir() / "minilang";
    if (!std::filesystem::exists(runner)) {
      throw EnvironmentError("bundled minilang runner not found at " + runner.string());
    }
    return SutManifest::builtin_minilang(runner, planted_bugs);
  }
  return SutManifest::load(reference);
}

SpawnOutcome spawn_capture(const std::vector<std::string>& argv, const SpawnLimits& limits) {
  if (argv.empty()) throw SandboxFailure("spawn_capture: empty argv");

  Pipe out_pipe;
  Pipe err_pipe;

  pid_t pid = ::fork();
  if (pid < 0) {
    throw SandboxFailure(std::string("fork failed: ") + std::strerror(errno));
  }

  if (pid == 0) {
    // Child. Own process group so a timeout kill reaps helpers too.
    ::setpgid(0, 0);
    ::dup2(out_pipe.write_fd, STDOUT_FILENO);
    ::dup2(err_pipe.write_fd, STDERR_FILENO);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::close(out_pipe.read_fd);
    ::close(out_pipe.write_fd);
    ::close(err_pipe.read_fd);
    ::close(err_pipe.write_fd);

    if (limits.memory_limit_bytes > 0) {
      rlimit rl{limits.memory_limit_bytes, limits.memory_limit_bytes};
      ::setrlimit(RLIMIT_AS, &rl);
    }

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    ::execv(cargv[0], cargv.data());
    // exec failed; use a distinctive exit code.
    ::_exit(127);
  }

  out_pipe.close_write();
  err_pipe.close_write();
  ::fcntl(out_pipe.read_fd, F_SETFL, O_NONBLOCK);
  ::fcntl(err_pipe.read_fd, F_SETFL, O_NONBLOCK);

  SpawnOutcome outcome;
  auto deadline = std::chrono::steady_clock::now() + limits.time_limit;
  bool killed = false;

  int open_fds = 2;
  while (open_fds > 0) {
    pollfd fds[2];
    nfds_t nfds = 0;
    int out_idx = -1;
    int err_idx = -1;
    if (out_pipe.read_fd >= 0) {
      out_idx = static_cast<int>(nfds);
      fds[nfds++] = {out_pipe.read_fd, POLLIN, 0};
    }
    if (err_pipe.read_fd >= 0) {
      err_idx = static_cast<int>(nfds);
      fds[nfds++] = {err_pipe.read_fd, POLLIN, 0};
    }

    auto now = std::chrono::steady_clock::now();
    int timeout_ms = killed ? 100
                            : static_cast<int>(std::max<long long>(
                                  1, std::chrono::duration_cast<std::chrono::milliseconds>(
                                         deadline - now)
                                         .count()));
    int rc = ::poll(fds, nfds, timeout_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (!killed && std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      outcome.timed_out = true;
      killed = true;
    }
    if (rc == 0) continue;

    auto handle = [&](int idx, Pipe& pipe, std::string& sink, bool& truncated) {
      if (idx < 0) return;
      if (fds[idx].revents & (POLLIN | POLLHUP | POLLERR)) {
        char probe[4096];
        ssize_t n;
        bool eof = false;
        for (;;) {
          n = ::read(pipe.read_fd, probe, sizeof(probe));
          if (n > 0) {
            if (sink.size() < limits.output_cap_bytes) {
              std::size_t keep = std::min(static_cast<std::size_t>(n),
                                          limits.output_cap_bytes - sink.size());
              sink.append(probe, keep);
              if (keep < static_cast<std::size_t>(n)) truncated = true;
            } else {
              truncated = true;
            }
            continue;
          }
          if (n == 0) {
            eof = true;
          }
          break;
        }
        if (eof) {
          pipe.close_read();
          --open_fds;
        }
      }
    };
    handle(out_idx, out_pipe, outcome.out, outcome.out_truncated);
    handle(err_idx, err_pipe, outcome.err, outcome.err_truncated);
  }

  int status = 0;
  for (;;) {
    pid_t r = ::waitpid(pid, &status, 0);
    if (r < 0 && errno == EINTR) continue;
    break;
  }

  if (WIFEXITED(status)) {
    outcome.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.signal = WTERMSIG(status);
    outcome.exit_code = 128 + WTERMSIG(status);
  }
  return outcome;
}

ProcessSutAdapter::ProcessSutAdapter(SutManifest manifest, std::size_t output_cap_bytes)
    : manifest_(std::move(manifest)), output_cap_bytes_(output_cap_bytes) {}

std::vector<std::string> extract_trigger_lines(std::string_view stderr_bytes,
                                               std::string_view prefix) {
  std::vector<std::string> lines;
  for (auto line : split_lines(stderr_bytes)) {
    if (line.substr(0, prefix.size()) == prefix) {
      lines.emplace_back(line);
    }
  }
  return lines;
}

RunResult ProcessSutAdapter::compile_and_run(const RunRequest& request) {
  RunResult result;

  if (trim(request.program.code).empty()) {
    result.compile_status = CompileStatus::CompileReject;
    result.run_status = RunStatus::NotRun;
    return result;
  }
  if (request.time_limit.count() <= 0) {
    throw SandboxFailure("compile_and_run: time_limit must be positive");
  }

  TempDir dir;
  auto program_path = dir.path / ("prog" + manifest_.program_extension);
  write_text_file(program_path, request.program.code);

  const auto& command = request.mode == RunMode::Optimized ? manifest_.compile_run_optimized
                                                           : manifest_.compile_run_baseline;
  std::vector<std::string> argv;
  bool substituted = false;
  for (const auto& piece : command) {
    std::string arg = piece;
    std::size_t pos = arg.find("{PROGRAM}");
    if (pos != std::string::npos) {
      arg.replace(pos, 9, program_path.string());
      substituted = true;
    }
    argv.push_back(std::move(arg));
  }
  if (!substituted) argv.push_back(program_path.string());

  SpawnLimits limits;
  limits.time_limit = request.time_limit;
  limits.memory_limit_bytes = request.memory_limit_bytes;
  limits.output_cap_bytes = output_cap_bytes_;
  SpawnOutcome spawned = spawn_capture(argv, limits);

  if (spawned.exit_code == 127 && !spawned.signal.has_value() && spawned.out.empty() &&
      spawned.err.empty()) {
    throw SandboxFailure("SUT command could not be executed: " + argv[0]);
  }

  result.stdout_bytes = std::move(spawned.out);
  result.stderr_bytes = std::move(spawned.err);
  result.stdout_truncated = spawned.out_truncated;
  result.stderr_truncated = spawned.err_truncated;
  result.exit_signal = spawned.signal;
  result.trigger_log = extract_trigger_lines(result.stderr_bytes);

  bool marker_seen = stderr_has_line(result.stderr_bytes, manifest_.stage_marker);

  if (spawned.timed_out) {
    result.compile_status = CompileStatus::Ok;
    result.run_status = RunStatus::Timeout;
    return result;
  }
  if (spawned.signal.has_value()) {
    if (marker_seen) {
      result.compile_status = CompileStatus::Ok;
      result.run_status = RunStatus::RunCrash;
    } else {
      result.compile_status = CompileStatus::CompileCrash;
      result.run_status = RunStatus::NotRun;
      result.trigger_log.clear();
    }
    return result;
  }
  for (int code : manifest_.reject_exit_codes) {
    if (spawned.exit_code == code) {
      result.compile_status = CompileStatus::CompileReject;
      result.run_status = RunStatus::NotRun;
      result.trigger_log.clear();
      return result;
    }
  }
  if (spawned.exit_code != 0) {
    if (marker_seen) {
      result.compile_status = CompileStatus::Ok;
      result.run_status = RunStatus::RunCrash;
    } else {
      result.compile_status = CompileStatus::CompileCrash;
      result.run_status = RunStatus::NotRun;
      result.trigger_log.clear();
    }
    return result;
  }
  for (const auto& pattern : manifest_.crash_patterns) {
    if (!pattern.empty() && result.stderr_bytes.find(pattern) != std::string::npos) {
      result.compile_status = CompileStatus::Ok;
      result.run_status = RunStatus::RunCrash;
      return result;
    }
  }
  result.compile_status = CompileStatus::Ok;
  result.run_status = RunStatus::Ok;
  return result;
}

}  // namespace wbfuzz
