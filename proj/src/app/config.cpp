#include "anisodiff/app/config.hpp"

#include "anisodiff/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace anisodiff::app {

using nlohmann::json;

namespace {

template <typename Enum>
struct NamedValue {
    const char* name;
    Enum value;
};

constexpr NamedValue<Experiment> kExperiments[] = {{"pde", Experiment::PdeRun},
                                                   {"sde", Experiment::SdeRun},
                                                   {"fdr", Experiment::FdrCheck},
                                                   {"sweep", Experiment::Sweep},
                                                   {"figures", Experiment::Figures}};
constexpr NamedValue<FlowChoice> kFlows[] = {
    {"stream", FlowChoice::Stream}, {"shear", FlowChoice::Shear}, {"none", FlowChoice::None}};
constexpr NamedValue<InitialKind> kInitials[] = {
    {"sin_sin", InitialKind::SinSin}, {"fourier", InitialKind::Fourier}, {"random_modes", InitialKind::RandomModes}};
constexpr NamedValue<Scheme> kSchemes[] = {{"semi_lagrangian_cn", Scheme::SemiLagrangianCrankNicolson},
                                           {"explicit_upwind", Scheme::ExplicitUpwind}};
constexpr NamedValue<GradientBackend> kGradients[] = {{"centered", GradientBackend::CenteredDifference},
                                                      {"spectral", GradientBackend::Spectral}};
constexpr NamedValue<AdvectionInterpolation> kInterpolations[] = {{"cubic", AdvectionInterpolation::Cubic},
                                                                  {"linear", AdvectionInterpolation::Linear}};

template <typename Enum, std::size_t N>
const char* name_of(const NamedValue<Enum> (&table)[N], Enum v) {
    for (const auto& e : table)
        if (e.value == v) return e.name;
    return "?";
}

template <typename Enum, std::size_t N>
Enum parse_enum(const NamedValue<Enum> (&table)[N], const json& j, const std::string& key) {
    if (!j.is_string()) throw ConfigError(fmt::format("{}: expected a string", key));
    const auto s = j.get<std::string>();
    std::string allowed;
    for (const auto& e : table) {
        if (s == e.name) return e.value;
        allowed += allowed.empty() ? e.name : std::string(", ") + e.name;
    }
    throw ConfigError(fmt::format("{}: '{}' is not one of {{{}}}", key, s, allowed));
}

double number(const json& section, const char* key, const std::string& prefix) {
    const auto& v = section.at(key);
    if (!v.is_number()) throw ConfigError(fmt::format("{}.{}: expected a number", prefix, key));
    return v.get<double>();
}

std::uint64_t unsigned_int(const json& section, const char* key, const std::string& prefix) {
    const auto& v = section.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(fmt::format("{}.{}: expected a non-negative integer", prefix, key));
    }
    return v.get<std::uint64_t>();
}

std::vector<double> number_list(const json& section, const char* key, const std::string& prefix) {
    const auto& v = section.at(key);
    if (!v.is_array()) throw ConfigError(fmt::format("{}.{}: expected a list of numbers", prefix, key));
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(fmt::format("{}.{}: expected a list of numbers", prefix, key));
        out.push_back(e.get<double>());
    }
    return out;
}

// Overlays `user` on `base`, refusing keys that base does not define.
void merge_checked(json& base, const json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError(fmt::format("{}: expected an object", path.empty() ? "config" : path));
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError(fmt::format("{}: unknown key", key));
        auto& slot = base[it.key()];
        if (slot.is_object() && it.value().is_object()) {
            merge_checked(slot, it.value(), key);
        } else {
            slot = it.value();
        }
    }
}

RunConfig from_full_json(const json& doc) {
    RunConfig cfg;
    cfg.experiment = parse_enum(kExperiments, doc.at("experiment"), "experiment");

    const auto& d = doc.at("domain");
    cfg.domain.params.p = number(d, "p", "domain");
    cfg.domain.params.q = number(d, "q", "domain");
    cfg.domain.params.alpha = number(d, "alpha", "domain");
    cfg.domain.params.beta = number(d, "beta", "domain");
    cfg.domain.lx = number(d, "L_x", "domain");
    cfg.domain.ly = number(d, "L_y", "domain");
    cfg.domain.nx = unsigned_int(d, "nx", "domain");
    cfg.domain.ny = unsigned_int(d, "ny", "domain");
    if (d.at("epsilon").is_null()) {
        cfg.domain.epsilon.reset();
    } else {
        cfg.domain.epsilon = number(d, "epsilon", "domain");
    }
    cfg.domain.amplitude = number(d, "amplitude", "domain");
    cfg.domain.flow = parse_enum(kFlows, d.at("velocity"), "domain.velocity");

    const auto& ic = doc.at("initial");
    cfg.initial.kind = parse_enum(kInitials, ic.at("kind"), "initial.kind");
    cfg.initial.seed = unsigned_int(ic, "seed", "initial");
    cfg.initial.max_mode = static_cast<int>(unsigned_int(ic, "max_mode", "initial"));
    cfg.initial.count = static_cast<int>(unsigned_int(ic, "count", "initial"));
    if (!ic.at("modes").is_array()) throw ConfigError("initial.modes: expected a list");
    for (const auto& m : ic.at("modes")) {
        if (!m.is_object()) throw ConfigError("initial.modes: each mode must be an object");
        json full = {{"mx", 1}, {"my", 1}, {"amplitude", 1.0}, {"phase_x", 0.0}, {"phase_y", 0.0}};
        merge_checked(full, m, "initial.modes[]");
        if (!full.at("mx").is_number_integer() || !full.at("my").is_number_integer()) {
            throw ConfigError("initial.modes[].mx/my: expected integers");
        }
        cfg.initial.modes.push_back({full.at("mx").get<int>(), full.at("my").get<int>(),
                                     number(full, "amplitude", "initial.modes[]"), number(full, "phase_x", "initial.modes[]"),
                                     number(full, "phase_y", "initial.modes[]")});
    }

    const auto& s = doc.at("solver");
    cfg.solver.cfg.kappa = number(s, "kappa", "solver");
    cfg.solver.kappas = number_list(s, "kappas", "solver");
    cfg.solver.cfg.dt = number(s, "dt", "solver");
    cfg.solver.cfg.t_end = number(s, "t_end", "solver");
    cfg.solver.cfg.scheme = parse_enum(kSchemes, s.at("scheme"), "solver.scheme");
    cfg.solver.cfg.record_every = unsigned_int(s, "record_every", "solver");
    cfg.solver.cfg.gradient = parse_enum(kGradients, s.at("gradient"), "solver.gradient");
    cfg.solver.cfg.interpolation = parse_enum(kInterpolations, s.at("interpolation"), "solver.interpolation");

    const auto& pa = doc.at("particles");
    cfg.particles.cfg.n = unsigned_int(pa, "n", "particles");
    cfg.particles.cfg.ds = number(pa, "ds", "particles");
    cfg.particles.cfg.seed = unsigned_int(pa, "seed", "particles");
    if (!pa.at("literal_paper_signs").is_boolean()) throw ConfigError("particles.literal_paper_signs: expected a boolean");
    cfg.particles.cfg.literal_paper_signs = pa.at("literal_paper_signs").get<bool>();
    cfg.particles.checkpoints = number_list(pa, "checkpoints", "particles");
    cfg.particles.x0 = number(pa, "x0", "particles");
    cfg.particles.y0 = number(pa, "y0", "particles");

    const auto& an = doc.at("analysis");
    cfg.window.lo = number(an, "window_lo", "analysis");
    cfg.window.hi = number(an, "window_hi", "analysis");

    const auto& out = doc.at("output");
    if (!out.at("dir").is_string()) throw ConfigError("output.dir: expected a string");
    cfg.output_dir = out.at("dir").get<std::string>();
    return cfg;
}

}  // namespace

std::string to_string(Experiment e) { return name_of(kExperiments, e); }

Experiment experiment_from_string(const std::string& name) { return parse_enum(kExperiments, json(name), "experiment"); }

json config_to_json(const RunConfig& cfg) {
    json modes = json::array();
    for (const auto& m : cfg.initial.modes) {
        modes.push_back({{"mx", m.mx}, {"my", m.my}, {"amplitude", m.amplitude}, {"phase_x", m.phase_x}, {"phase_y", m.phase_y}});
    }
    return {
        {"experiment", to_string(cfg.experiment)},
        {"domain",
         {{"p", cfg.domain.params.p},
          {"q", cfg.domain.params.q},
          {"alpha", cfg.domain.params.alpha},
          {"beta", cfg.domain.params.beta},
          {"L_x", cfg.domain.lx},
          {"L_y", cfg.domain.ly},
          {"nx", cfg.domain.nx},
          {"ny", cfg.domain.ny},
          {"epsilon", cfg.domain.epsilon ? json(*cfg.domain.epsilon) : json(nullptr)},
          {"amplitude", cfg.domain.amplitude},
          {"velocity", name_of(kFlows, cfg.domain.flow)}}},
        {"initial",
         {{"kind", name_of(kInitials, cfg.initial.kind)},
          {"modes", modes},
          {"seed", cfg.initial.seed},
          {"max_mode", cfg.initial.max_mode},
          {"count", cfg.initial.count}}},
        {"solver",
         {{"kappa", cfg.solver.cfg.kappa},
          {"kappas", cfg.solver.kappas},
          {"dt", cfg.solver.cfg.dt},
          {"t_end", cfg.solver.cfg.t_end},
          {"scheme", name_of(kSchemes, cfg.solver.cfg.scheme)},
          {"record_every", cfg.solver.cfg.record_every},
          {"gradient", name_of(kGradients, cfg.solver.cfg.gradient)},
          {"interpolation", name_of(kInterpolations, cfg.solver.cfg.interpolation)}}},
        {"particles",
         {{"n", cfg.particles.cfg.n},
          {"ds", cfg.particles.cfg.ds},
          {"seed", cfg.particles.cfg.seed},
          {"literal_paper_signs", cfg.particles.cfg.literal_paper_signs},
          {"checkpoints", cfg.particles.checkpoints},
          {"x0", cfg.particles.x0},
          {"y0", cfg.particles.y0}}},
        {"analysis", {{"window_lo", cfg.window.lo}, {"window_hi", cfg.window.hi}}},
        {"output", {{"dir", cfg.output_dir}}},
    };
}

RunConfig config_from_json(const json& doc) {
    json full = config_to_json(RunConfig{});
    merge_checked(full, doc, "");
    try {
        return from_full_json(full);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
}

RunConfig config_from_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config: malformed JSON ({})", e.what()));
    }
    return config_from_json(doc);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("config: cannot read '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError(fmt::format("override '{}': expected key=value", assignment));
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1)) {
        parts.push_back(rest.substr(0, pos));
    }
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
    json full = config_to_json(cfg);
    merge_checked(full, patch, "");
    try {
        cfg = from_full_json(full);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("override '{}': {}", key, e.what()));
    }
}

DomainBox RunConfig::box() const { return DomainBox(domain.lx, domain.ly, domain.nx, domain.ny); }

VelocityField RunConfig::velocity() const {
    const double eps = domain.regularization();
    switch (domain.flow) {
        case FlowChoice::Stream:
            return make_velocity(domain.params, domain.amplitude, eps);
        case FlowChoice::Shear:
            return make_shear_velocity(domain.params, domain.amplitude, eps);
        case FlowChoice::None:
            break;
    }
    return make_velocity(domain.params, 0.0, eps, FlowIntent::PureDiffusion);
}

ScalarField RunConfig::initial_field() const {
    const DomainBox b = box();
    switch (initial.kind) {
        case InitialKind::SinSin:
            return make_sin_sin(b);
        case InitialKind::Fourier:
            if (initial.modes.empty()) throw ConfigError("initial.modes: a Fourier initial condition needs at least one mode");
            return make_fourier_field(b, initial.modes);
        case InitialKind::RandomModes: {
            const auto modes = random_modes(initial.seed, initial.max_mode, initial.count);
            return make_fourier_field(b, modes);
        }
    }
    return ScalarField(b);
}

std::vector<std::uint64_t> RunConfig::seeds() const {
    std::vector<std::uint64_t> out;
    if (experiment == Experiment::Figures) return out;
    if (initial.kind == InitialKind::RandomModes) out.push_back(initial.seed);
    if (experiment == Experiment::SdeRun || experiment == Experiment::FdrCheck) out.push_back(particles.cfg.seed);
    return out;
}

void RunConfig::validate() const {
    if (experiment == Experiment::Figures) return;

    const DomainBox b = box();
    const VelocityField v = velocity();
    window.validate();
    const ScalarField rho0 = initial_field();
    if (rho0.max_abs() == 0.0) throw ConfigError("initial: the initial field is identically zero");

    const auto check_times = [](const std::vector<double>& ts) {
        if (ts.empty()) throw ConfigError("particles.checkpoints: need at least one time");
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (!(ts[k] > 0.0) || (k > 0 && !(ts[k] > ts[k - 1]))) {
                throw ConfigError("particles.checkpoints: times must be positive and strictly increasing");
            }
        }
    };

    switch (experiment) {
        case Experiment::PdeRun:
            PdeSolver(b, v, solver.cfg);
            break;
        case Experiment::SdeRun:
            particles.cfg.validate();
            check_times(particles.checkpoints);
            if (!(solver.cfg.kappa >= 0.0)) throw ConfigError("solver.kappa: must be >= 0");
            if (particles.cfg.ds > particles.checkpoints.back()) throw ConfigError("particles.ds: must be <= the last checkpoint");
            break;
        case Experiment::FdrCheck: {
            particles.cfg.validate();
            check_times(particles.checkpoints);
            if (particles.cfg.ds > particles.checkpoints.back()) throw ConfigError("particles.ds: must be <= the last checkpoint");
            SolverConfig cfg = solver.cfg;
            cfg.t_end = particles.checkpoints.back();
            PdeSolver(b, v, cfg);
            const double record_dt = static_cast<double>(cfg.record_every) * cfg.dt;
            for (double t : particles.checkpoints) {
                const double k = t / record_dt;
                if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
                    throw ConfigError(fmt::format(
                        "particles.checkpoints: t = {} is not a multiple of solver.record_every * solver.dt = {}", t,
                        record_dt));
                }
            }
            break;
        }
        case Experiment::Sweep: {
            const auto& ks = solver.kappas;
            if (ks.size() < 4) throw ConfigError("solver.kappas: a sweep needs at least 4 values");
            for (std::size_t k = 0; k < ks.size(); ++k) {
                if (!(ks[k] > 0.0)) throw ConfigError("solver.kappas: values must be > 0");
                if (k > 0 && !(ks[k] > ks[k - 1])) throw ConfigError("solver.kappas: values must be strictly increasing");
            }
            if (ks.back() < 10.0 * ks.front()) throw ConfigError("solver.kappas: values must span at least one decade");
            for (double kappa : ks) {
                SolverConfig cfg = solver.cfg;
                cfg.kappa = kappa;
                PdeSolver(b, v, cfg);
            }
            break;
        }
        case Experiment::Figures:
            break;
    }
}

}  // namespace anisodiff::app
