#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace censorpred::cli {

/// Runs one invocation; `args` excludes the program name. Results go to
/// `out`, diagnostics and errors to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace censorpred::cli
