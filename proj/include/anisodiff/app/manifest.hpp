#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace anisodiff::app {

std::string sha256_hex(std::string_view data);

/// The single writer for one output directory. Creates the directory on the
/// first write and records a checksum for every artifact.
class OutputDirectory {
public:
    explicit OutputDirectory(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    void write(const std::string& name, std::string_view content);
    const std::map<std::string, std::string>& checksums() const noexcept { return checksums_; }

private:
    std::filesystem::path root_;
    std::map<std::string, std::string> checksums_;
};

struct RunManifest {
    std::string experiment;
    nlohmann::json config;
    std::map<std::string, std::string> artifacts;  // file name -> sha256
    double wall_clock_seconds = 0.0;
    std::string library_version;
    std::vector<std::uint64_t> seeds;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace anisodiff::app
