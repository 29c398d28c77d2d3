#pragma once

#include "smoothridge/core.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace smoothridge {

/// Exit statuses of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_numerical = 1, exit_usage = 2 };

/// "lo:hi:count" -> count values log-spaced over [lo, hi].
std::vector<double> parse_grid_spec(std::string_view text);

/// "lo:hi" or "lo:hi,lo:hi".
std::vector<Interval> parse_domain(std::string_view text);

/// Output directory: the flag when given, else $SMOOTHRIDGE_OUT, else ".".
std::string resolve_output_dir(const std::string& flag_value);

/// Entry point for the `smoothridge` executable. Messages go to `out`; a
/// failure prints one line "error: <message>" to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smoothridge
