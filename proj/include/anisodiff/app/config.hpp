#pragma once

#include "anisodiff/analysis.hpp"
#include "anisodiff/domain.hpp"
#include "anisodiff/fields.hpp"
#include "anisodiff/particles.hpp"
#include "anisodiff/pde_solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace anisodiff::app {

enum class Experiment { PdeRun, SdeRun, FdrCheck, Sweep, Figures };

enum class FlowChoice { Stream, Shear, None };

enum class InitialKind { SinSin, Fourier, RandomModes };

struct DomainSection {
    AnisotropyParams params{};
    double lx = 1.0;
    double ly = 1.0;
    std::size_t nx = 128;
    std::size_t ny = 128;
    std::optional<double> epsilon;  // defaults to 1e-3 * L_x
    double amplitude = 1.0;
    FlowChoice flow = FlowChoice::Stream;

    double regularization() const { return epsilon.value_or(1e-3 * lx); }
};

struct InitialSection {
    InitialKind kind = InitialKind::SinSin;
    std::vector<FourierMode> modes;
    std::uint64_t seed = 1;
    int max_mode = 3;
    int count = 4;
};

struct SolverSection {
    SolverConfig cfg{};
    std::vector<double> kappas{1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1};
};

struct ParticleSection {
    ParticleConfig cfg{};
    std::vector<double> checkpoints{0.25, 0.5, 0.75, 1.0};
    double x0 = 0.0;
    double y0 = 0.0;
};

/// Fully resolved configuration of one command. Every field has a default;
/// a config file only names what it changes.
struct RunConfig {
    Experiment experiment = Experiment::PdeRun;
    DomainSection domain{};
    InitialSection initial{};
    SolverSection solver{};
    ParticleSection particles{};
    FitWindow window{};
    std::string output_dir;

    /// Checks every section the experiment uses against its module's
    /// preconditions. Throws ConfigError naming the field.
    void validate() const;

    DomainBox box() const;
    VelocityField velocity() const;
    ScalarField initial_field() const;
    /// Seeds consumed by this experiment, for the manifest.
    std::vector<std::uint64_t> seeds() const;
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

/// Parses a JSON document; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig config_from_text(const std::string& text);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Applies "section.key=value" on top of a config. The value is parsed as JSON
/// when possible, otherwise taken as a string.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace anisodiff::app
