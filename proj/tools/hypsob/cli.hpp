#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypsob::cli {

enum ExitCode : int { kPass = 0, kViolation = 1, kUsage = 2, kInconclusive = 3 };

/// Runs one command line (args excludes the program name). Human-readable
/// summaries go to `out`, diagnostics to `err`; artifacts go to --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Accepts decimals and simple fractions such as 8/3.
double parse_real(const std::string& text);

}  // namespace hypsob::cli
