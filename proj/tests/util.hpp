#pragma once

// Shared plumbing for the test binaries: data paths, scratch directories,
// small file helpers and a runner for the installed CLI binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(ACTLAB_DATA_DIR) + "/" + name;
}

// Fresh empty directory under the system temp dir; unique per call.
inline std::string scratch_dir(const std::string& tag) {
  static std::mt19937_64 gen{std::random_device{}()};
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    std::filesystem::path p =
        base / (tag + "_" + std::to_string(gen() & 0xffffffffULL));
    std::error_code ec;
    if (std::filesystem::create_directory(p, ec)) return p.string();
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the actlab binary with the given argument string, capturing both
// streams. Arguments are passed through the shell, so paths must not contain
// quotes or spaces (scratch_dir guarantees that).
inline CliResult run_cli(const std::string& args) {
  const std::string dir = scratch_dir("cli_io");
  const std::string out_path = dir + "/out";
  const std::string err_path = dir + "/err";
  const std::string cmd = std::string(ACTLAB_BIN) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  std::filesystem::remove_all(dir);
  return r;
}

}  // namespace testutil
