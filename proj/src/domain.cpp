#include "anisodiff/domain.hpp"

#include "anisodiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace anisodiff {

namespace {

// s^e for s >= 0. Exponents that are multiples of 1/2 (the common case for
// integer p, q) avoid std::pow.
double half_power(double s, double e) noexcept {
    const double twice = 2.0 * e;
    if (twice == std::floor(twice) && std::abs(twice) <= 16.0) {
        const int n = static_cast<int>(twice);
        const int whole = n / 2;
        double r = 1.0;
        for (int k = 0; k < std::abs(whole); ++k) r *= s;
        if (whole < 0) r = 1.0 / r;
        if (n % 2 != 0) r = (n > 0) ? r * std::sqrt(s) : r / std::sqrt(s);
        return r;
    }
    return std::pow(s, e);
}

double scale(double x, double exponent, double eps) noexcept {
    if (eps == 0.0) {
        if (x == 0.0) return 0.0;
        return half_power(x * x, 0.5 * exponent);
    }
    return half_power(x * x + eps * eps, 0.5 * exponent);
}

// d/dx (x^2 + eps^2)^(e/2) = e x (x^2 + eps^2)^(e/2 - 1)
double scale_derivative(double x, double exponent, double eps) noexcept {
    if (x == 0.0) return 0.0;
    return exponent * x * half_power(x * x + eps * eps, 0.5 * exponent - 1.0);
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(fmt::format("{}: must be a finite value > 0 (got {})", name, v));
    }
}

}  // namespace

void AnisotropyParams::validate() const {
    require_positive(p, "domain.p");
    require_positive(q, "domain.q");
    require_positive(alpha, "domain.alpha");
    require_positive(beta, "domain.beta");
}

DomainBox::DomainBox(double half_width_x, double half_width_y, std::size_t nx, std::size_t ny)
    : lx_(half_width_x), ly_(half_width_y), nx_(nx), ny_(ny) {
    require_positive(half_width_x, "domain.L_x");
    require_positive(half_width_y, "domain.L_y");
    if (nx < 8 || nx % 2 != 0) throw ConfigError(fmt::format("domain.nx: must be even and >= 8 (got {})", nx));
    if (ny < 8 || ny % 2 != 0) throw ConfigError(fmt::format("domain.ny: must be even and >= 8 (got {})", ny));
}

double DomainBox::wrap(double v, double half) noexcept {
    if (v >= -half && v < half) return v;
    const double period = 2.0 * half;
    double r = std::fmod(v + half, period);
    if (r < 0.0) r += period;
    r -= half;
    if (r >= half) r = -half;
    return r;
}

double scaling_f(double x, const AnisotropyParams& params, double eps) { return scale(x, params.p, eps); }

double scaling_g(double y, const AnisotropyParams& params, double eps) { return scale(y, params.q, eps); }

Vec2 VelocityField::operator()(double x, double y) const noexcept {
    switch (kind_) {
        case FlowKind::StreamFunction: {
            const double fx = scale(x, params_.p, eps_);
            const double gy = scale(y, params_.q, eps_);
            const double dfx = scale_derivative(x, params_.p, eps_);
            const double dgy = scale_derivative(y, params_.q, eps_);
            return {amplitude_ * fx * dgy, -amplitude_ * dfx * gy};
        }
        case FlowKind::Shear:
            return {amplitude_ * scale(y, params_.q, eps_), 0.0};
        case FlowKind::Constant:
            return constant_;
        case FlowKind::Zero:
            break;
    }
    return {};
}

double VelocityField::analytic_divergence(double x, double y) const noexcept {
    if (kind_ != FlowKind::StreamFunction) return 0.0;
    // d/dx (A f g') + d/dy (-A f' g)
    const double dfx = scale_derivative(x, params_.p, eps_);
    const double dgy = scale_derivative(y, params_.q, eps_);
    return amplitude_ * dfx * dgy - amplitude_ * dfx * dgy;
}

double VelocityField::max_speed(const DomainBox& box) const noexcept {
    double m = 0.0;
    for (std::size_t j = 0; j < box.ny(); ++j) {
        for (std::size_t i = 0; i < box.nx(); ++i) {
            const Vec2 u = (*this)(box.x_center(i), box.y_center(j));
            m = std::max(m, std::hypot(u.x, u.y));
        }
    }
    return m;
}

VelocityField make_velocity(const AnisotropyParams& params, double amplitude, double eps, FlowIntent intent) {
    params.validate();
    if (!std::isfinite(amplitude)) throw ConfigError("domain.amplitude: must be finite");
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("domain.epsilon: must be >= 0");
    if (eps == 0.0 && (params.p < 1.0 || params.q < 1.0)) {
        throw ConfigError("domain.epsilon: must be > 0 when p < 1 or q < 1 (unbounded derivative at the origin)");
    }
    if (amplitude == 0.0 && intent == FlowIntent::Advective) {
        throw ConfigError("domain.amplitude: zero amplitude requires an explicit pure-diffusion run");
    }
    VelocityField v;
    v.params_ = params;
    v.eps_ = eps;
    if (intent == FlowIntent::PureDiffusion) {
        v.kind_ = FlowKind::Zero;
        return v;
    }
    v.kind_ = FlowKind::StreamFunction;
    v.amplitude_ = amplitude;
    return v;
}

VelocityField make_shear_velocity(const AnisotropyParams& params, double amplitude, double eps) {
    params.validate();
    if (amplitude == 0.0) throw ConfigError("domain.amplitude: shear flow needs a nonzero amplitude");
    if (!(eps >= 0.0)) throw ConfigError("domain.epsilon: must be >= 0");
    VelocityField v;
    v.kind_ = FlowKind::Shear;
    v.params_ = params;
    v.amplitude_ = amplitude;
    v.eps_ = eps;
    return v;
}

VelocityField make_constant_velocity(double ux, double uy) {
    VelocityField v;
    v.kind_ = FlowKind::Constant;
    v.constant_ = {ux, uy};
    v.amplitude_ = std::hypot(ux, uy);
    return v;
}

VelocityField make_zero_velocity() { return VelocityField{}; }

double divergence_residual(const VelocityField& field, const DomainBox& box) {
    const double hx = box.hx();
    const double hy = box.hy();
    double worst = 0.0;
    for (std::size_t j = 0; j < box.ny(); ++j) {
        const double y = box.y_center(j);
        for (std::size_t i = 0; i < box.nx(); ++i) {
            const double x = box.x_center(i);
            const double dux = (field(x + hx, y).x - field(x - hx, y).x) / (2.0 * hx);
            const double duy = (field(x, y + hy).y - field(x, y - hy).y) / (2.0 * hy);
            worst = std::max(worst, std::abs(dux + duy));
        }
    }
    return worst;
}

}  // namespace anisodiff
