#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace censorpred {

/// One rejected or noteworthy input record.
struct Diagnostic {
    std::string source;
    std::size_t line = 0;
    std::string id;
    std::string message;

    std::string to_json() const;
};

/// One JSON object per line.
void write_diagnostics(const std::vector<Diagnostic>& diagnostics, std::ostream& out);

}  // namespace censorpred
