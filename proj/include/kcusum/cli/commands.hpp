#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kcusum::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitAlarm = 0;
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoAlarm = 1;
inline constexpr int kExitError = 2;

/// Entry point for `kcusum <detect|evaluate|bounds|generate> ...`. `args`
/// excludes the program name. `in` backs `--input -`; `out` backs `--out -`
/// and the detect report.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Parses a threshold/target list: "a:b:log[:N]" (N log-spaced points,
/// default 50), "a:b:lin[:step]" (default step 1) or "v1,v2,...".
/// A range with a == b yields a single point.
[[nodiscard]] std::vector<double> parse_grid_spec(const std::string& spec);

}  // namespace kcusum::cli
