#pragma once

#include "anisodiff/domain.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace anisodiff {

/// Real-to-complex 2-D FFT on a box. Owns FFTW plans and aligned work
/// buffers; one instance must not be used from two threads at once, but
/// separate instances are independent.
class SpectralTransform {
public:
    explicit SpectralTransform(const DomainBox& box);
    ~SpectralTransform();
    SpectralTransform(SpectralTransform&&) noexcept;
    SpectralTransform& operator=(SpectralTransform&&) noexcept;
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    const DomainBox& box() const noexcept;

    /// Number of complex coefficients per row (nx/2 + 1).
    std::size_t half_nx() const noexcept;

    /// Unnormalized forward transform into the internal spectrum buffer.
    void forward(std::span<const double> values);
    /// Inverse transform of the internal spectrum, divided by nx*ny.
    void inverse(std::span<double> values);

    std::span<std::complex<double>> spectrum() noexcept;
    std::span<const std::complex<double>> spectrum() const noexcept;

    /// Angular wavenumber of spectrum column c (x) and row r (y).
    double kx(std::size_t c) const noexcept;
    double ky(std::size_t r) const noexcept;
    bool is_nyquist_x(std::size_t c) const noexcept;
    bool is_nyquist_y(std::size_t r) const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace anisodiff
