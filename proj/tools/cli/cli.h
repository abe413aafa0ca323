// deteval command-line surface.
//
// Exit codes: 0 success, 1 usage error, 2 data error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deteval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// `args` excludes the program name. Normal output goes to `out`, diagnostics
// and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Reads `key=value` lines (blank lines and '#' comments ignored) and turns
// every key not already given on the command line into `--key value`
// tokens. Throws std::runtime_error on malformed lines.
std::vector<std::string> expand_config_file(const std::string& path,
                                            const std::vector<std::string>& explicit_args);

}  // namespace deteval::cli
