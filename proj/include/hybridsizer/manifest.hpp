#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybridsizer/digest.hpp"
#include "hybridsizer/version.hpp"

namespace hybridsizer {

/// Provenance record written to <out>/manifest.json on every run, including
/// failed ones that got past argument parsing. Input digests are content
/// hashes of the files as read.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::optional<unsigned long long> seed;
    std::string engine_version = kEngineVersion;
    double wall_time_s = 0.0;
    std::vector<std::string> outputs;
    int exit_status = 0;

    void add_input(const std::string& path) {
        inputs.emplace_back(path, file_digest_hex(path));
    }
};

inline nlohmann::ordered_json to_json(const RunManifest& m) {
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : m.inputs)
        inputs.push_back({{"path", path}, {"fnv1a64", digest}});
    nlohmann::ordered_json doc{
        {"command", m.command},
        {"engine", kEngineName},
        {"engine_version", m.engine_version},
        {"inputs", inputs},
        {"outputs", m.outputs},
        {"wall_time_s", m.wall_time_s},
        {"exit_status", m.exit_status},
    };
    if (m.seed) doc["seed"] = *m.seed;
    return doc;
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream out(out_dir / "manifest.json");
    if (!out) return;  // manifest writing must never mask the primary failure
    out << to_json(m).dump(2) << "\n";
}

}  // namespace hybridsizer
