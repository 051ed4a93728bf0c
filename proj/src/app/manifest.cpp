#include "anisodiff/app/manifest.hpp"

#include "anisodiff/errors.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>

namespace anisodiff::app {

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw std::runtime_error("sha256: OpenSSL digest failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", digest[k]);
    return hex;
}

OutputDirectory::OutputDirectory(std::filesystem::path root) : root_(std::move(root)) {}

void OutputDirectory::write(const std::string& name, std::string_view content) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", root_.string(), ec.message()));
    const auto path = root_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
    checksums_[name] = sha256_hex(content);
}

nlohmann::json manifest_to_json(const RunManifest& m) {
    return {{"experiment", m.experiment},
            {"config", m.config},
            {"artifacts", m.artifacts},
            {"wall_clock_seconds", m.wall_clock_seconds},
            {"library_version", m.library_version},
            {"seeds", m.seeds}};
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot read manifest '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        const auto j = nlohmann::json::parse(ss.str());
        RunManifest m;
        m.experiment = j.at("experiment").get<std::string>();
        m.config = j.at("config");
        m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
        m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
        m.library_version = j.at("library_version").get<std::string>();
        m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("manifest '{}': {}", path.string(), e.what()));
    }
}

}  // namespace anisodiff::app
