#pragma once

#include <iosfwd>
#include <string>

#include "finsler/cli/config.hpp"

namespace finsler::cli {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitAdmissibility = 3 };

struct Outcome {
  int exit_code = kExitOk;
  std::string report;  // in the configured format
};

/// Runs one command. Config and admissibility errors propagate as exceptions.
Outcome execute(const RunConfig& cfg);

/// argv front end: flags override --config values; the report goes to --out or to out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace finsler::cli
