#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace latentgeo {

/// Every CLI command drops a manifest.json next to its outputs: command
/// name, fully resolved config, output paths and library version. Replaying
/// a manifest re-runs the command with the identical config, reproducing the
/// outputs byte-for-byte (timestamps live only in the manifest itself).
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             const std::vector<std::string>& outputs);

void write_manifest(const std::string& out_dir, const nlohmann::json& manifest);

nlohmann::json load_manifest(const std::string& path);

} // namespace latentgeo
