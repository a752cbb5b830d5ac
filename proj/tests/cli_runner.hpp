#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testing {

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the pdfp binary with `args` (shell syntax), capturing stdout+stderr.
inline CliResult run_cli(const std::string& args, const std::filesystem::path& dir) {
  const auto log = dir / "cli_output.txt";
  const std::string cmd =
      std::string("\"") + PDFP_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream f(log);
  std::stringstream ss;
  ss << f.rdbuf();
  r.out = ss.str();
  return r;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Trace text with the time_s column blanked.
inline std::string without_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = a == std::string::npos ? a : line.find(',', a + 1);
    out += (a == std::string::npos || b == std::string::npos) ? line
                                                              : line.substr(0, a + 1) + line.substr(b);
    out += '\n';
  }
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() /
           ("pdfp_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace testing
