#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rca::cli {

/// Exit codes of rcadiag.
enum Exit : int { ok = 0, input_error = 1, contradiction = 2, oracle_mismatch = 3 };

/// Runs `rcadiag` with args (program name excluded). The repl subcommand
/// reads commands from `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rca::cli
