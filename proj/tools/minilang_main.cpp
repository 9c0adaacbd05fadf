// Bundled MiniLang runner: the reference SUT executable behind the adapter
// manifest. Reads a program file, runs it in the requested mode and reports
// instrumentation on stderr.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "wbfuzz/common.hpp"
#include "wbfuzz/minilang.hpp"
#include "wbfuzz/sut.hpp"

int main(int argc, char** argv) {
  CLI::App app{"MiniLang reference runner"};

  std::string program_path;
  std::string mode = "baseline";
  bool planted_bugs = false;
  app.add_option("program", program_path, "program file (.ml.txt)")->required();
  app.add_option("--mode", mode, "baseline|optimized")
      ->check(CLI::IsMember({"baseline", "optimized"}));
  app.add_flag("--planted-bugs", planted_bugs, "enable the documented planted bugs");

  CLI11_PARSE(app, argc, argv);

  std::string source;
  try {
    source = wbfuzz::read_text_file(program_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", std::string(wbfuzz::minilang::kErrorPrefix).c_str(),
                 e.what());
    return 74;  // EX_IOERR
  }

  wbfuzz::minilang::RunOptions options;
  options.mode = mode == "optimized" ? wbfuzz::minilang::Mode::Optimized
                                     : wbfuzz::minilang::Mode::Baseline;
  options.planted_bugs = planted_bugs;

  // Write-through sinks: anything emitted before a planted abort stays
  // visible to the harness.
  wbfuzz::minilang::Sinks sinks;
  sinks.out = [](std::string_view text) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
  };
  sinks.err = [](std::string_view text) {
    std::fwrite(text.data(), 1, text.size(), stderr);
    std::fflush(stderr);
  };

  auto status = wbfuzz::minilang::run_program(source, options, sinks);
  if (status == wbfuzz::minilang::FrontEndStatus::Rejected) {
    return wbfuzz::kCompileRejectExit;
  }
  return 0;
}
