#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rapido {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPaymentFailed = 2;
inline constexpr int kExitIo = 3;

/// Entry point of `rapido-net`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rapido
