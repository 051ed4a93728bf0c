#include "anisodiff/fields.hpp"

#include "anisodiff/errors.hpp"
#include "anisodiff/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace anisodiff {

ScalarField::ScalarField(const DomainBox& box) : box_(box), values_(box.size(), 0.0) {}

ScalarField::ScalarField(const DomainBox& box, std::vector<double> values) : box_(box), values_(std::move(values)) {
    if (values_.size() != box_.size()) {
        throw ConfigError(fmt::format("field: {} values do not match a {}x{} grid", values_.size(), box_.nx(), box_.ny()));
    }
}

double ScalarField::mean() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double ScalarField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double l2_norm_sq(const ScalarField& field) {
    double s = 0.0;
    for (double v : field.values()) s += v * v;
    return s * field.box().cell_area();
}

namespace {

// fourth-order centered stencil; second order was ~1.3% low on mode 4 at 128^2
double grad_norm_sq_centered(const ScalarField& field) {
    const auto& box = field.box();
    const std::size_t nx = box.nx();
    const std::size_t ny = box.ny();
    const double cx = 1.0 / (12.0 * box.hx());
    const double cy = 1.0 / (12.0 * box.hy());
    double s = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t jp = (j + 1) % ny, jpp = (j + 2) % ny;
        const std::size_t jm = (j + ny - 1) % ny, jmm = (j + ny - 2) % ny;
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t ip = (i + 1) % nx, ipp = (i + 2) % nx;
            const std::size_t im = (i + nx - 1) % nx, imm = (i + nx - 2) % nx;
            const double gx = (8.0 * (field.at(ip, j) - field.at(im, j)) - (field.at(ipp, j) - field.at(imm, j))) * cx;
            const double gy = (8.0 * (field.at(i, jp) - field.at(i, jm)) - (field.at(i, jpp) - field.at(i, jmm))) * cy;
            s += gx * gx + gy * gy;
        }
    }
    return s * box.cell_area();
}

// Parseval over the half spectrum. Nyquist modes are kept with their
// magnitude so the result matches the dissipation of the spectral heat step.
double grad_norm_sq_spectral(const ScalarField& field) {
    SpectralTransform fft(field.box());
    fft.forward(field.values());
    const auto spec = fft.spectrum();
    const std::size_t hn = fft.half_nx();
    double s = 0.0;
    for (std::size_t r = 0; r < field.box().ny(); ++r) {
        const double ky = fft.ky(r);
        for (std::size_t c = 0; c < hn; ++c) {
            const double kx = fft.kx(c);
            const double weight = (c == 0 || fft.is_nyquist_x(c)) ? 1.0 : 2.0;
            s += weight * (kx * kx + ky * ky) * std::norm(spec[r * hn + c]);
        }
    }
    return s * field.box().cell_area() / static_cast<double>(field.box().size());
}

}  // namespace

double grad_norm_sq(const ScalarField& field, GradientBackend backend) {
    return backend == GradientBackend::Spectral ? grad_norm_sq_spectral(field) : grad_norm_sq_centered(field);
}

void mean_zero_project_inplace(ScalarField& field) noexcept {
    const double m = field.mean();
    for (double& v : field.values()) v -= m;
}

ScalarField mean_zero_project(const ScalarField& field) {
    ScalarField out = field;
    mean_zero_project_inplace(out);
    return out;
}

double sample(const ScalarField& field, double x, double y) noexcept {
    const auto& box = field.box();
    const auto nx = static_cast<std::ptrdiff_t>(box.nx());
    const auto ny = static_cast<std::ptrdiff_t>(box.ny());
    const double fx = (box.wrap_x(x) + box.half_width_x()) / box.hx() - 0.5;
    const double fy = (box.wrap_y(y) + box.half_width_y()) / box.hy() - 0.5;
    const double flx = std::floor(fx);
    const double fly = std::floor(fy);
    const double ax = fx - flx;
    const double ay = fy - fly;
    auto i0 = static_cast<std::ptrdiff_t>(flx);
    auto j0 = static_cast<std::ptrdiff_t>(fly);
    i0 = ((i0 % nx) + nx) % nx;
    j0 = ((j0 % ny) + ny) % ny;
    const auto i1 = (i0 + 1) % nx;
    const auto j1 = (j0 + 1) % ny;
    const auto v = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
        return field.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    return (1.0 - ay) * ((1.0 - ax) * v(i0, j0) + ax * v(i1, j0)) + ay * ((1.0 - ax) * v(i0, j1) + ax * v(i1, j1));
}

ScalarField resample_spectral(const ScalarField& field, const DomainBox& target) {
    const auto& src = field.box();
    if (src.half_width_x() != target.half_width_x() || src.half_width_y() != target.half_width_y()) {
        throw ConfigError("resample_spectral: boxes must have the same extent");
    }
    SpectralTransform from(src);
    SpectralTransform to(target);
    from.forward(field.values());
    const auto in = from.spectrum();
    auto out = to.spectrum();
    std::fill(out.begin(), out.end(), std::complex<double>{});

    const auto mx_limit = static_cast<long>(std::min(src.nx(), target.nx()) / 2);
    const auto my_limit = static_cast<long>(std::min(src.ny(), target.ny()) / 2);
    const double scale = static_cast<double>(target.size()) / static_cast<double>(src.size());
    // Coefficients are referenced to the first cell center, which moves with h.
    const double shift_x = 0.5 * (target.hx() - src.hx());
    const double shift_y = 0.5 * (target.hy() - src.hy());
    const auto src_row = [](long m, std::size_t n) { return static_cast<std::size_t>(m >= 0 ? m : m + static_cast<long>(n)); };

    for (long my = -my_limit + 1; my < my_limit; ++my) {
        const std::size_t rs = src_row(my, src.ny());
        const std::size_t rt = src_row(my, target.ny());
        const double ky = to.ky(rt);
        for (long mx = 0; mx < mx_limit; ++mx) {
            const auto c = static_cast<std::size_t>(mx);
            const double phase = to.kx(c) * shift_x + ky * shift_y;
            out[rt * to.half_nx() + c] = in[rs * from.half_nx() + c] * scale * std::polar(1.0, phase);
        }
    }
    ScalarField result(target);
    to.inverse(result.values());
    return result;
}

ScalarField make_fourier_field(const DomainBox& box, std::span<const FourierMode> modes) {
    for (const auto& m : modes) {
        if (2 * static_cast<std::size_t>(std::abs(m.mx)) >= box.nx() || 2 * static_cast<std::size_t>(std::abs(m.my)) >= box.ny()) {
            throw ConfigError(fmt::format("initial.modes: mode ({}, {}) is not resolved on a {}x{} grid", m.mx, m.my,
                                          box.nx(), box.ny()));
        }
    }
    ScalarField field(box);
    const double pi = std::numbers::pi;
    for (std::size_t j = 0; j < box.ny(); ++j) {
        const double y = box.y_center(j);
        for (std::size_t i = 0; i < box.nx(); ++i) {
            const double x = box.x_center(i);
            double v = 0.0;
            for (const auto& m : modes) {
                v += m.amplitude * std::sin(m.mx * pi * x / box.half_width_x() + m.phase_x) *
                     std::sin(m.my * pi * y / box.half_width_y() + m.phase_y);
            }
            field.at(i, j) = v;
        }
    }
    mean_zero_project_inplace(field);
    return field;
}

ScalarField make_sin_sin(const DomainBox& box) {
    const FourierMode mode{};
    return make_fourier_field(box, std::span(&mode, 1));
}

std::vector<FourierMode> random_modes(std::uint64_t seed, int max_mode, int count) {
    if (max_mode < 1) throw ConfigError("initial.max_mode: must be >= 1");
    if (count < 1) throw ConfigError("initial.count: must be >= 1");
    std::mt19937_64 engine(seed);
    std::uniform_int_distribution<int> mode(1, max_mode);
    std::normal_distribution<double> amplitude(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<FourierMode> out(static_cast<std::size_t>(count));
    for (auto& m : out) {
        m.mx = mode(engine);
        m.my = mode(engine);
        m.amplitude = amplitude(engine);
        m.phase_x = phase(engine);
        m.phase_y = phase(engine);
    }
    return out;
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
    const auto& box = field.box();
    out << "nx,ny,L_x,L_y\n";
    out << fmt::format("{},{},{:.17g},{:.17g}\n", box.nx(), box.ny(), box.half_width_x(), box.half_width_y());
    std::string line;
    for (std::size_t j = 0; j < box.ny(); ++j) {
        line.clear();
        for (std::size_t i = 0; i < box.nx(); ++i) {
            if (i) line += ',';
            line += fmt::format("{:.17g}", field.at(i, j));
        }
        line += '\n';
        out << line;
    }
}

std::string field_csv(const ScalarField& field) {
    std::ostringstream os;
    write_field_csv(os, field);
    return os.str();
}

ScalarField read_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "nx,ny,L_x,L_y") throw IoError("field csv: missing header");
    if (!std::getline(in, line)) throw IoError("field csv: missing dimensions");
    std::size_t nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    {
        std::istringstream ls(line);
        char comma = 0;
        if (!(ls >> nx >> comma >> ny >> comma >> lx >> comma >> ly)) throw IoError("field csv: bad dimensions row");
    }
    DomainBox box(lx, ly, nx, ny);
    std::vector<double> values;
    values.reserve(box.size());
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) values.push_back(std::stod(cell));
    }
    if (values.size() != box.size()) throw IoError("field csv: value count does not match dimensions");
    return ScalarField(box, std::move(values));
}

}  // namespace anisodiff
