#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kernelcur::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBatchAborted = 1;
inline constexpr int kExitUsage = 2;

// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kernelcur::cli
