#include "latentgeo/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "latentgeo/errors.hpp"
#include "latentgeo/version.hpp"

namespace latentgeo {

using nlohmann::json;

namespace {

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[72];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

} // namespace

json make_manifest(const std::string& command, const json& config,
                   const std::vector<std::string>& outputs) {
    return json{{"command", command},
                {"version", LATENTGEO_VERSION},
                {"created_utc", utc_now()},
                {"config", config},
                {"outputs", outputs}};
}

void write_manifest(const std::string& out_dir, const json& manifest) {
    std::string path = out_dir + "/manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << manifest.dump(1) << "\n";
}

json load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

} // namespace latentgeo
