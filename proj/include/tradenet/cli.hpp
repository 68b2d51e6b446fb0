#pragma once

#include <string>
#include <vector>

namespace tn {

// Exit codes: 0 yes/stable/found, 3 no/unstable/none, 4 unknown (budget),
// 2 usage or schema error, 1 internal error.
inline constexpr int kExitYes = 0;
inline constexpr int kExitNo = 3;
inline constexpr int kExitUnknown = 4;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 1;

int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace tn
