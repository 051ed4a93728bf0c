#include "anisodiff/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace anisodiff {

namespace {
// FFTW's planner is not thread-safe; execution with distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct SpectralTransform::Impl {
    DomainBox box;
    std::size_t half_nx;
    double* real = nullptr;
    fftw_complex* complex = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit Impl(const DomainBox& b) : box(b), half_nx(b.nx() / 2 + 1) {
        const auto n = box.size();
        const auto nc = box.ny() * half_nx;
        std::lock_guard lock(planner_mutex());
        real = fftw_alloc_real(n);
        complex = fftw_alloc_complex(nc);
        if (real == nullptr || complex == nullptr) throw std::bad_alloc();
        const int ny = static_cast<int>(box.ny());
        const int nx = static_cast<int>(box.nx());
        r2c = fftw_plan_dft_r2c_2d(ny, nx, real, complex, FFTW_ESTIMATE);
        c2r = fftw_plan_dft_c2r_2d(ny, nx, complex, real, FFTW_ESTIMATE);
        if (r2c == nullptr || c2r == nullptr) throw std::runtime_error("FFTW planning failed");
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        fftw_free(real);
        fftw_free(complex);
    }
};

SpectralTransform::SpectralTransform(const DomainBox& box) : impl_(std::make_unique<Impl>(box)) {}
SpectralTransform::~SpectralTransform() = default;
SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;

const DomainBox& SpectralTransform::box() const noexcept { return impl_->box; }
std::size_t SpectralTransform::half_nx() const noexcept { return impl_->half_nx; }

void SpectralTransform::forward(std::span<const double> values) {
    if (values.size() != impl_->box.size()) throw std::invalid_argument("SpectralTransform::forward: size mismatch");
    std::copy(values.begin(), values.end(), impl_->real);
    fftw_execute(impl_->r2c);
}

void SpectralTransform::inverse(std::span<double> values) {
    if (values.size() != impl_->box.size()) throw std::invalid_argument("SpectralTransform::inverse: size mismatch");
    fftw_execute(impl_->c2r);
    const double norm = 1.0 / static_cast<double>(impl_->box.size());
    std::transform(impl_->real, impl_->real + values.size(), values.begin(), [norm](double v) { return v * norm; });
}

std::span<std::complex<double>> SpectralTransform::spectrum() noexcept {
    return {reinterpret_cast<std::complex<double>*>(impl_->complex), impl_->box.ny() * impl_->half_nx};
}

std::span<const std::complex<double>> SpectralTransform::spectrum() const noexcept {
    return {reinterpret_cast<const std::complex<double>*>(impl_->complex), impl_->box.ny() * impl_->half_nx};
}

double SpectralTransform::kx(std::size_t c) const noexcept {
    return std::numbers::pi * static_cast<double>(c) / impl_->box.half_width_x();
}

double SpectralTransform::ky(std::size_t r) const noexcept {
    const auto ny = impl_->box.ny();
    const double m = (r <= ny / 2) ? static_cast<double>(r) : static_cast<double>(r) - static_cast<double>(ny);
    return std::numbers::pi * m / impl_->box.half_width_y();
}

bool SpectralTransform::is_nyquist_x(std::size_t c) const noexcept { return c == impl_->box.nx() / 2; }
bool SpectralTransform::is_nyquist_y(std::size_t r) const noexcept { return r == impl_->box.ny() / 2; }

}  // namespace anisodiff
