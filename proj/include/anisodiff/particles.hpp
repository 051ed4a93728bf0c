#pragma once

#include "anisodiff/domain.hpp"
#include "anisodiff/fields.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace anisodiff {

/// Seed of the independent random stream owned by one grid point (or any
/// other indexed job). Depends only on (seed, index), so results do not
/// depend on how work is scheduled.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Backward stochastic trajectories dX = -u(X) ds + sqrt(2 kappa) dB, stored
/// structure-of-arrays. Positions are wrapped into the box after every step;
/// the unwrapped displacement since launch is tracked alongside.
class ParticleEnsemble {
public:
    ParticleEnsemble(const DomainBox& box, std::size_t n, double x0, double y0, double kappa, std::uint64_t seed,
                     bool literal_paper_signs = false);

    std::size_t size() const noexcept { return x_.size(); }
    double kappa() const noexcept { return kappa_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double elapsed() const noexcept { return elapsed_; }
    bool literal_paper_signs() const noexcept { return literal_signs_; }
    const DomainBox& box() const noexcept { return box_; }

    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> y() const noexcept { return y_; }
    std::span<const double> displacement_x() const noexcept { return dx_; }
    std::span<const double> displacement_y() const noexcept { return dy_; }

    /// Euler-Maruyama step drawing its Gaussians from the ensemble's engine.
    void step(const VelocityField& velocity, double ds);

    /// Euler-Maruyama step with caller-supplied standard normals laid out as
    /// (xi_x, xi_y) pairs per particle; used for common-random-number studies.
    void step(const VelocityField& velocity, double ds, std::span<const double> normals);

private:
    void advance(std::size_t k, const VelocityField& velocity, double ds, double noise_scale, double xi1, double xi2);

    DomainBox box_;
    std::vector<double> x_, y_, dx_, dy_;
    double kappa_;
    std::uint64_t seed_;
    double elapsed_ = 0.0;
    bool literal_signs_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Free-function form of ParticleEnsemble::step.
void sde_step(ParticleEnsemble& ensemble, const VelocityField& velocity, double ds);

/// Moments of a sample, computed after shifting by the first value so that
/// identical samples give exactly zero variance.
struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;     // unbiased
    double second = 0.0;       // mean of squares
    double mean_se = 0.0;      // sqrt(variance / n)
    double variance_se = 0.0;  // from the fourth central moment
};

SampleMoments sample_moments(std::span<const double> values);

/// Grid of ensemble variances Var(rho0(X_t, Y_t)) per launch point.
struct VarianceMap {
    ScalarField values;
    std::size_t n_per_point = 0;
};

/// Midpoint quadrature of a variance map.
double variance_integral(const VarianceMap& map);

struct ParticleConfig {
    std::size_t n = 10000;
    double ds = 1e-3;
    std::uint64_t seed = 1;
    bool literal_paper_signs = false;

    void validate() const;
};

/// Estimates at one backward time t.
struct FeynmanKacSnapshot {
    double t = 0.0;
    ScalarField mean;           // estimate of rho(t)
    VarianceMap variance;       // unbiased sample variance per point
    ScalarField second_moment;  // E[rho0^2] along trajectories
    ScalarField variance_se;    // standard error of each variance estimate
    double steps_taken = 0.0;
};

/// Launches cfg.n trajectories from every cell center, integrates them to
/// each checkpoint (ascending, > 0) and evaluates rho0 by bilinear sampling.
/// One substream per grid point, merged by index.
std::vector<FeynmanKacSnapshot> feynman_kac(const ScalarField& rho0, const VelocityField& velocity, double kappa,
                                            std::span<const double> checkpoints, const ParticleConfig& cfg);

/// Single-horizon form returning (mean field, variance map).
std::pair<ScalarField, VarianceMap> feynman_kac(const ScalarField& rho0, const VelocityField& velocity, double t,
                                                double kappa, std::size_t n, double ds, std::uint64_t seed);

/// Pooled statistical sigma of the mean field in L2: sqrt(sum var/n * h^2).
double pooled_sigma(const FeynmanKacSnapshot& snap);

/// Standard error of variance_integral from the per-point variance errors.
double variance_integral_se(const FeynmanKacSnapshot& snap);

}  // namespace anisodiff
