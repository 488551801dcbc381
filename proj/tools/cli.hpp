#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace branchlab::cli {

/// Exit codes: 0 success, 2 configuration error, 3 resource cap exceeded.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitResource = 3;

/// Runs one subcommand. Data goes to `out` (or files under --out), errors to
/// `err` as single-line JSON objects.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "a:b:step" (arithmetic) or "a,b,c" into a strictly increasing grid.
std::vector<int> parse_grid(const std::string& text);

}  // namespace branchlab::cli
