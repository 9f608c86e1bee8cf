#include "censorpred/diagnostic.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

namespace censorpred {

std::string Diagnostic::to_json() const {
    nlohmann::json j;
    j["source"] = source;
    j["line"] = line;
    if (!id.empty()) j["id"] = id;
    j["message"] = message;
    return j.dump();
}

void write_diagnostics(const std::vector<Diagnostic>& diagnostics, std::ostream& out) {
    for (const auto& d : diagnostics) out << d.to_json() << '\n';
}

}  // namespace censorpred
