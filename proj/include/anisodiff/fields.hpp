#pragma once

#include "anisodiff/domain.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace anisodiff {

/// Scalar field sampled at the cell centers of a DomainBox. Storage is
/// row-major with x fastest: values[j * nx + i].
class ScalarField {
public:
    explicit ScalarField(const DomainBox& box);
    ScalarField(const DomainBox& box, std::vector<double> values);

    const DomainBox& box() const noexcept { return box_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double& at(std::size_t i, std::size_t j) noexcept { return values_[j * box_.nx() + i]; }
    double at(std::size_t i, std::size_t j) const noexcept { return values_[j * box_.nx() + i]; }

    double mean() const noexcept;
    double max_abs() const noexcept;

private:
    DomainBox box_;
    std::vector<double> values_;
};

enum class GradientBackend { CenteredDifference, Spectral };

/// Midpoint quadrature of the integral of rho^2 over the box.
double l2_norm_sq(const ScalarField& field);

/// Quadrature of |grad rho|^2. Centered differences by default; the spectral
/// backend differentiates the trigonometric interpolant exactly.
double grad_norm_sq(const ScalarField& field, GradientBackend backend = GradientBackend::CenteredDifference);

/// Subtracts the grid mean.
ScalarField mean_zero_project(const ScalarField& field);
void mean_zero_project_inplace(ScalarField& field) noexcept;

/// Bilinear interpolation between cell centers with periodic wraparound.
double sample(const ScalarField& field, double x, double y) noexcept;

/// Trigonometric interpolation of a field onto a box of the same extent but a
/// different resolution. Modes beyond the coarser Nyquist limit are dropped.
ScalarField resample_spectral(const ScalarField& field, const DomainBox& target);

/// One term amplitude * sin(mx*pi*x/L_x + phase_x) * sin(my*pi*y/L_y + phase_y).
struct FourierMode {
    int mx = 1;
    int my = 1;
    double amplitude = 1.0;
    double phase_x = 0.0;
    double phase_y = 0.0;
};

/// Samples a finite Fourier sum and projects it to mean zero.
ScalarField make_fourier_field(const DomainBox& box, std::span<const FourierMode> modes);

/// sin(pi x / L_x) sin(pi y / L_y), the default initial condition.
ScalarField make_sin_sin(const DomainBox& box);

/// Modes 1..max_mode in each direction with Gaussian amplitudes and uniform
/// phases drawn from the given seed.
std::vector<FourierMode> random_modes(std::uint64_t seed, int max_mode, int count);

/// Grid CSV: "nx,ny,L_x,L_y", the four values, then ny rows of nx values.
void write_field_csv(std::ostream& out, const ScalarField& field);
std::string field_csv(const ScalarField& field);
ScalarField read_field_csv(std::istream& in);

}  // namespace anisodiff
