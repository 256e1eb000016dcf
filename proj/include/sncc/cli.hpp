#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sncc/config.hpp"

namespace sncc {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitConfig = 2, kExitVerify = 3 };

// Fills every default that depends on the parameters, so that the
// serialized config reproduces the run exactly.
RunConfig resolve_config(RunConfig cfg);

// Runs a resolved config. Throws ConfigError on inconsistent requests.
// Returns kExitOk or kExitVerify.
int execute(const RunConfig& cfg, std::ostream& out);

// Full command line: parse, resolve, execute, map errors onto exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sncc
