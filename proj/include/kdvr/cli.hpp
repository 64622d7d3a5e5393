#pragma once

#include <string>
#include <vector>

namespace kdvr {

struct CliResult {
  int exit_code = 0;   // 0 ok, 1 usage/config error, 2 verification failure
  std::string output;  // combined report (stdout payload)
};

/// Runs one CLI job. Output is deterministic: identical arguments produce
/// byte-identical output.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace kdvr
