#pragma once

// Runs the command-line tool as a child process.

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "support.hpp"

namespace facmon::testing {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

/// `args` is appended verbatim after the binary; quote with shell_quote.
inline CliResult run_cli(const TempDir& scratch, const std::string& args, const std::string& stdin_text = "") {
  auto in = scratch / "stdin.txt";
  auto err = scratch / "stderr.txt";
  std::ofstream(in, std::ios::binary) << stdin_text;
  std::string cmd = "FACMON_PWHASH_FAST=1 " + shell_quote(FACMON_CLI_PATH) + " " + args + " <" +
                    shell_quote(in.string()) + " 2>" + shell_quote(err.string());
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

}  // namespace facmon::testing
