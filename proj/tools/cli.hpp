#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace smscore::cli {

// Exit codes: 0 success, 1 data or numerical failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Machine output (JSON, CSV) goes to --out when
// given, otherwise to `out`; human-readable tables go to `out`; diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smscore::cli
