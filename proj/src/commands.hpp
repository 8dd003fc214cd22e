#pragma once

// Subcommands behind hs_run: each takes a JSON request and returns a JSON
// report, throwing hypshadow::Error on failure.

#include <json.hpp>

#include <string>

namespace hypshadow {

nlohmann::json run_command(const std::string& command, const nlohmann::json& request);

/// {"schema", "error", "message"} plus "stage"/"witness" for hypothesis violations.
nlohmann::json error_payload(const std::exception& err);

}  // namespace hypshadow
