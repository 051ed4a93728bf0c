#pragma once

#include "anisodiff/domain.hpp"
#include "anisodiff/fields.hpp"
#include "anisodiff/spectral.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace anisodiff {

enum class Scheme { SemiLagrangianCrankNicolson, ExplicitUpwind };

/// Interpolant used at departure points of the semi-Lagrangian step.
enum class AdvectionInterpolation { Cubic, Linear };

struct SolverConfig {
    double kappa = 0.01;
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::SemiLagrangianCrankNicolson;
    std::size_t record_every = 10;
    GradientBackend gradient = GradientBackend::CenteredDifference;
    AdvectionInterpolation interpolation = AdvectionInterpolation::Cubic;

    /// Checks everything that does not depend on the grid or the flow.
    void validate() const;
    /// Number of dt steps to reach t_end.
    std::size_t steps() const;
};

/// Recorded samples of ||rho(t)||^2 and the running trapezoid integral of
/// kappa * ||grad rho||^2. The first sample is t = 0.
struct DecaySeries {
    std::vector<double> times;
    std::vector<double> norms_sq;
    std::vector<double> dissipation;

    std::size_t size() const noexcept { return times.size(); }
};

/// CSV with header "t,norm_sq,dissipation".
std::string decay_csv(const DecaySeries& series);

struct PdeResult {
    DecaySeries series;
    ScalarField final_field;
};

/// Time integrator for d_t rho + u . grad rho = kappa lap rho on the periodic
/// box. The velocity is autonomous, so semi-Lagrangian departure stencils are
/// built once at construction.
class PdeSolver {
public:
    PdeSolver(const DomainBox& box, const VelocityField& velocity, const SolverConfig& cfg);

    const SolverConfig& config() const noexcept { return cfg_; }
    const DomainBox& box() const noexcept { return box_; }

    /// Advances one dt in place. Throws NumericalError if max|rho| grows more
    /// than tenfold.
    void step(ScalarField& field);

    /// Integrates from rho0 to t_end. rho0 must be mean zero.
    PdeResult run(const ScalarField& rho0);

private:
    struct Stencil {
        std::array<double, 4> wx{};
        std::array<double, 4> wy{};
        std::int32_t i0 = 0;  // index of the first tap
        std::int32_t j0 = 0;
    };

    void build_departure_stencils();
    void advect(const ScalarField& in, ScalarField& out) const;
    void diffuse(ScalarField& field);
    void explicit_upwind(const ScalarField& in, ScalarField& out) const;

    DomainBox box_;
    VelocityField velocity_;
    SolverConfig cfg_;
    std::vector<Stencil> stencils_;
    std::vector<double> cn_factor_;
    std::vector<Vec2> node_velocity_;
    SpectralTransform fft_;
    ScalarField scratch_;
};

/// One step of a freshly built solver. Convenient for tests; loops should hold
/// a PdeSolver.
ScalarField step(const ScalarField& field, const VelocityField& velocity, const SolverConfig& cfg);

DecaySeries run(const ScalarField& rho0, const VelocityField& velocity, const SolverConfig& cfg);

}  // namespace anisodiff
