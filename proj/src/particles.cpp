#include "anisodiff/particles.hpp"

#include "anisodiff/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace anisodiff {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ParticleEnsemble::ParticleEnsemble(const DomainBox& box, std::size_t n, double x0, double y0, double kappa,
                                   std::uint64_t seed, bool literal_paper_signs)
    : box_(box),
      x_(n, box.wrap_x(x0)),
      y_(n, box.wrap_y(y0)),
      dx_(n, 0.0),
      dy_(n, 0.0),
      kappa_(kappa),
      seed_(seed),
      literal_signs_(literal_paper_signs),
      engine_(seed) {
    if (n == 0) throw ConfigError("particles.n: must be >= 1");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError(fmt::format("kappa: must be >= 0 (got {})", kappa));
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw ConfigError("particles: launch point must be finite");
}

void ParticleEnsemble::advance(std::size_t k, const VelocityField& velocity, double ds, double noise_scale, double xi1,
                               double xi2) {
    const Vec2 u = velocity(x_[k], y_[k]);
    const double sign = literal_signs_ ? 1.0 : -1.0;
    const double step_x = sign * u.x * ds + noise_scale * xi1;
    const double step_y = sign * u.y * ds + noise_scale * xi2;
    dx_[k] += step_x;
    dy_[k] += step_y;
    x_[k] = box_.wrap_x(x_[k] + step_x);
    y_[k] = box_.wrap_y(y_[k] + step_y);
}

void ParticleEnsemble::step(const VelocityField& velocity, double ds) {
    if (!(ds > 0.0)) throw ConfigError("particles.ds: must be > 0");
    const double noise_scale = std::sqrt(2.0 * kappa_ * ds);
    for (std::size_t k = 0; k < x_.size(); ++k) {
        const double xi1 = normal_(engine_);
        const double xi2 = normal_(engine_);
        advance(k, velocity, ds, noise_scale, xi1, xi2);
    }
    elapsed_ += ds;
}

void ParticleEnsemble::step(const VelocityField& velocity, double ds, std::span<const double> normals) {
    if (!(ds > 0.0)) throw ConfigError("particles.ds: must be > 0");
    if (normals.size() != 2 * x_.size()) throw ConfigError("sde_step: need two normals per particle");
    const double noise_scale = std::sqrt(2.0 * kappa_ * ds);
    for (std::size_t k = 0; k < x_.size(); ++k) advance(k, velocity, ds, noise_scale, normals[2 * k], normals[2 * k + 1]);
    elapsed_ += ds;
}

void sde_step(ParticleEnsemble& ensemble, const VelocityField& velocity, double ds) { ensemble.step(velocity, ds); }

double variance_integral(const VarianceMap& map) {
    double s = 0.0;
    for (double v : map.values.values()) s += v;
    return s * map.values.box().cell_area();
}

void ParticleConfig::validate() const {
    if (n < 2) throw ConfigError(fmt::format("particles.n: must be >= 2 for a variance (got {})", n));
    if (!(ds > 0.0) || !std::isfinite(ds)) throw ConfigError(fmt::format("particles.ds: must be > 0 (got {})", ds));
}

SampleMoments sample_moments(std::span<const double> v) {
    if (v.size() < 2) throw ConfigError("sample_moments: need at least two values");
    const auto n = static_cast<double>(v.size());
    const double shift = v[0];
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : v) {
        sum += x - shift;
        sum_sq += x * x;
    }
    const double md = sum / n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : v) {
        const double d = (x - shift) - md;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    SampleMoments out;
    out.mean = shift + md;
    out.variance = m2 * n / (n - 1.0);
    out.second = sum_sq / n;
    out.mean_se = std::sqrt(out.variance / n);
    out.variance_se = std::sqrt(std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n));
    return out;
}

std::vector<FeynmanKacSnapshot> feynman_kac(const ScalarField& rho0, const VelocityField& velocity, double kappa,
                                            std::span<const double> checkpoints, const ParticleConfig& cfg) {
    cfg.validate();
    if (!(kappa >= 0.0)) throw ConfigError("kappa: must be >= 0");
    if (checkpoints.empty()) throw ConfigError("particles.checkpoints: need at least one time");
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        if (!(checkpoints[c] > 0.0) || (c > 0 && !(checkpoints[c] > checkpoints[c - 1]))) {
            throw ConfigError("particles.checkpoints: times must be positive and strictly increasing");
        }
    }
    if (cfg.ds > checkpoints.back() * (1.0 + 1e-12)) {
        throw ConfigError(fmt::format("particles.ds: must be <= t (ds = {}, t = {})", cfg.ds, checkpoints.back()));
    }

    // Uniform sub-steps per segment between checkpoints.
    std::vector<std::size_t> segment_steps;
    std::vector<double> segment_ds;
    double prev = 0.0;
    for (double t : checkpoints) {
        const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((t - prev) / cfg.ds - 1e-9)));
        segment_steps.push_back(k);
        segment_ds.push_back((t - prev) / static_cast<double>(k));
        prev = t;
    }

    const DomainBox& box = rho0.box();
    std::vector<FeynmanKacSnapshot> snaps;
    double steps_total = 0.0;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        steps_total += static_cast<double>(segment_steps[c]);
        snaps.push_back({checkpoints[c], ScalarField(box), VarianceMap{ScalarField(box), cfg.n}, ScalarField(box),
                         ScalarField(box), steps_total});
    }

    const auto npoints = static_cast<long long>(box.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long long idx = 0; idx < npoints; ++idx) {
        const auto p = static_cast<std::size_t>(idx);
        const std::size_t i = p % box.nx();
        const std::size_t j = p / box.nx();
        ParticleEnsemble ens(box, cfg.n, box.x_center(i), box.y_center(j), kappa, substream_seed(cfg.seed, p),
                             cfg.literal_paper_signs);
        std::vector<double> values(cfg.n);
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            for (std::size_t s = 0; s < segment_steps[c]; ++s) ens.step(velocity, segment_ds[c]);
            for (std::size_t k = 0; k < cfg.n; ++k) values[k] = sample(rho0, ens.x()[k], ens.y()[k]);
            const SampleMoments m = sample_moments(values);
            auto& snap = snaps[c];
            snap.mean.values()[p] = m.mean;
            snap.variance.values.values()[p] = m.variance;
            snap.second_moment.values()[p] = m.second;
            snap.variance_se.values()[p] = m.variance_se;
        }
    }
    return snaps;
}

std::pair<ScalarField, VarianceMap> feynman_kac(const ScalarField& rho0, const VelocityField& velocity, double t,
                                                double kappa, std::size_t n, double ds, std::uint64_t seed) {
    ParticleConfig cfg;
    cfg.n = n;
    cfg.ds = ds;
    cfg.seed = seed;
    auto snaps = feynman_kac(rho0, velocity, kappa, std::span(&t, 1), cfg);
    return {std::move(snaps.front().mean), std::move(snaps.front().variance)};
}

double pooled_sigma(const FeynmanKacSnapshot& snap) {
    const auto n = static_cast<double>(snap.variance.n_per_point);
    double s = 0.0;
    for (double v : snap.variance.values.values()) s += v / n;
    return std::sqrt(s * snap.mean.box().cell_area());
}

double variance_integral_se(const FeynmanKacSnapshot& snap) {
    double s = 0.0;
    for (double se : snap.variance_se.values()) s += se * se;
    return std::sqrt(s) * snap.mean.box().cell_area();
}

}  // namespace anisodiff
