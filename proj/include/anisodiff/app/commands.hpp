#pragma once

#include "anisodiff/app/config.hpp"
#include "anisodiff/app/manifest.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace anisodiff::app {

/// Files produced by a command, in write order. Commands compute everything in
/// memory first so a failure leaves no partial output behind.
struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;
    std::string summary;

    void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
    const std::string* find(const std::string& name) const;
};

Artifacts cmd_pde(const RunConfig& cfg);
Artifacts cmd_sde(const RunConfig& cfg);
Artifacts cmd_fdr(const RunConfig& cfg);
Artifacts cmd_sweep(const RunConfig& cfg);
Artifacts cmd_figures(const RunConfig& cfg);

struct CommandResult {
    std::filesystem::path output_dir;
    std::map<std::string, std::string> checksums;
    std::string summary;
};

/// Explicit path, else output.dir, else $ANISODIFF_OUTPUT_ROOT/<experiment>,
/// else ./anisodiff-out/<experiment>.
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::optional<std::filesystem::path>& explicit_dir);

/// Validates, dispatches on cfg.experiment, writes artifacts and manifest.json.
CommandResult run_experiment(const RunConfig& cfg, const std::optional<std::filesystem::path>& explicit_dir = std::nullopt);

struct ReplayResult {
    bool identical = false;
    std::vector<std::string> mismatched;  // CSV artifacts whose checksum changed
    std::filesystem::path output_dir;
};

/// Re-runs the config recorded in a manifest into out_dir and compares every
/// CSV checksum with the recorded one.
ReplayResult replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

/// 100 log-spaced kappa values covering [0.01, 1].
std::vector<double> figure1_kappas();
/// 30 evenly spaced values covering [1, 5].
std::vector<double> figure2_axis();

/// Plain-text exponent report; key = value lines after a short heading.
std::string exponent_report(const RunConfig& cfg, const SweepResult& sweep);

}  // namespace anisodiff::app
