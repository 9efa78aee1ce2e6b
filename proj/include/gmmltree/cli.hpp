#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gmmltree {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `gmmltree` command line tool. `args` excludes the
// program name. Reports go to `out`, diagnostics to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmmltree
