#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace latentgeo {

/// Full command-line entry point (args exclude argv[0]).
/// Exit codes: 0 success, 1 domain error, 2 usage error.
int cli_dispatch(const std::vector<std::string>& args);

/// Runs one subcommand from an already-resolved config (what replay does).
int dispatch_config(const std::string& command, nlohmann::json cfg);

} // namespace latentgeo
