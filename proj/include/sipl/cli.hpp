#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sipl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point shared by the executable and the tests. `args[0]` is the
/// program name. Returns 0 on success, 1 on usage errors, 2 on runtime errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sipl::cli
