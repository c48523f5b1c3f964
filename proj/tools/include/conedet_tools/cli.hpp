#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace conedet::tools {

/// Parses "a", "bi", "a+bi", "a-bi", "i", "-i", "a+i". Throws
/// std::invalid_argument on anything else.
std::complex<double> parse_complex(const std::string& text);

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (program name excluded). Reports go to
/// `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conedet::tools
