#pragma once

#include <atfnet/error.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace atfnet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

int exit_code_for(ErrorCode code);

/// Runs one command line (without the program name). Results go to files
/// and `out`; diagnostics go to `err` only.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace atfnet::cli
