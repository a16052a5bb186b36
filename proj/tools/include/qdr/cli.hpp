#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdr::cli {

enum ExitCode : int { Success = 0, UsageError = 1, NumericalError = 2 };

/// Runs one command line (args exclude the program name). Results go to
/// `out` unless an output path is given; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdr::cli
