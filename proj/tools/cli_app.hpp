#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stiefel_kn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 success, 1 usage or input error, 2 numerical-domain
/// error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace stiefel_kn::cli
