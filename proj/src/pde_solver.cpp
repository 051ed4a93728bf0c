#include "anisodiff/pde_solver.hpp"

#include "anisodiff/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace anisodiff {

void SolverConfig::validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError(fmt::format("solver.kappa: must be >= 0 (got {})", kappa));
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("solver.dt: must be > 0 (got {})", dt));
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError(fmt::format("solver.t_end: must be > 0 (got {})", t_end));
    if (record_every == 0) throw ConfigError("solver.record_every: must be >= 1");
    if (static_cast<double>(record_every) * dt > t_end * (1.0 + 1e-12)) {
        throw ConfigError(fmt::format("solver.record_every: record_every * dt = {} exceeds t_end = {}",
                                      static_cast<double>(record_every) * dt, t_end));
    }
    const double n = t_end / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * n) {
        throw ConfigError(fmt::format("solver.t_end: must be an integer multiple of dt (t_end/dt = {})", n));
    }
}

std::size_t SolverConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

std::string decay_csv(const DecaySeries& series) {
    std::string out = "t,norm_sq,dissipation\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        out += fmt::format("{:.17g},{:.17g},{:.17g}\n", series.times[k], series.norms_sq[k], series.dissipation[k]);
    }
    return out;
}

namespace {

std::array<double, 4> cubic_weights(double a) noexcept {
    // Lagrange basis on nodes -1, 0, 1, 2.
    return {-a * (a - 1.0) * (a - 2.0) / 6.0, (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0,
            -(a + 1.0) * a * (a - 2.0) / 2.0, (a + 1.0) * a * (a - 1.0) / 6.0};
}

std::array<double, 4> linear_weights(double a) noexcept { return {0.0, 1.0 - a, a, 0.0}; }

std::int32_t wrap_index(long long i, std::size_t n) noexcept {
    const auto nn = static_cast<long long>(n);
    return static_cast<std::int32_t>(((i % nn) + nn) % nn);
}

}  // namespace

PdeSolver::PdeSolver(const DomainBox& box, const VelocityField& velocity, const SolverConfig& cfg)
    : box_(box), velocity_(velocity), cfg_(cfg), fft_(box), scratch_(box) {
    cfg_.validate();
    if (cfg_.scheme == Scheme::ExplicitUpwind) {
        const double h = std::min(box_.hx(), box_.hy());
        const double speed = velocity_.max_speed(box_);
        const double diffusive = cfg_.kappa > 0.0 ? h * h / (4.0 * cfg_.kappa) : std::numeric_limits<double>::infinity();
        const double advective = speed > 0.0 ? h / speed : std::numeric_limits<double>::infinity();
        const double limit = 0.9 * std::min(diffusive, advective);
        if (cfg_.dt > limit) {
            throw ConfigError(fmt::format("solver.dt: explicit upwind needs dt <= 0.9*min(h^2/(4 kappa), h/max|u|) = {} (got {})",
                                          limit, cfg_.dt));
        }
        node_velocity_.resize(box_.size());
        for (std::size_t j = 0; j < box_.ny(); ++j)
            for (std::size_t i = 0; i < box_.nx(); ++i)
                node_velocity_[j * box_.nx() + i] = velocity_(box_.x_center(i), box_.y_center(j));
    } else {
        build_departure_stencils();
        const std::size_t hn = fft_.half_nx();
        cn_factor_.resize(box_.ny() * hn);
        for (std::size_t r = 0; r < box_.ny(); ++r) {
            for (std::size_t c = 0; c < hn; ++c) {
                const double k2 = fft_.kx(c) * fft_.kx(c) + fft_.ky(r) * fft_.ky(r);
                const double z = 0.5 * cfg_.kappa * k2 * cfg_.dt;
                cn_factor_[r * hn + c] = (1.0 - z) / (1.0 + z);
            }
        }
        cn_factor_[0] = 0.0;  // mean mode
    }
}

void PdeSolver::build_departure_stencils() {
    stencils_.resize(box_.size());
    const double dt = cfg_.dt;
    for (std::size_t j = 0; j < box_.ny(); ++j) {
        const double y = box_.y_center(j);
        for (std::size_t i = 0; i < box_.nx(); ++i) {
            const double x = box_.x_center(i);
            // Midpoint rule for the characteristic ending at (x, y).
            const Vec2 u0 = velocity_(x, y);
            const Vec2 um = velocity_(box_.wrap_x(x - 0.5 * dt * u0.x), box_.wrap_y(y - 0.5 * dt * u0.y));
            const double fi = static_cast<double>(i) - dt * um.x / box_.hx();
            const double fj = static_cast<double>(j) - dt * um.y / box_.hy();
            const double bi = std::floor(fi);
            const double bj = std::floor(fj);
            Stencil s;
            if (cfg_.interpolation == AdvectionInterpolation::Cubic) {
                s.wx = cubic_weights(fi - bi);
                s.wy = cubic_weights(fj - bj);
            } else {
                s.wx = linear_weights(fi - bi);
                s.wy = linear_weights(fj - bj);
            }
            s.i0 = wrap_index(static_cast<long long>(bi) - 1, box_.nx());
            s.j0 = wrap_index(static_cast<long long>(bj) - 1, box_.ny());
            stencils_[j * box_.nx() + i] = s;
        }
    }
}

void PdeSolver::advect(const ScalarField& in, ScalarField& out) const {
    const std::size_t nx = box_.nx();
    const std::size_t ny = box_.ny();
    const auto src = in.values();
    auto dst = out.values();
    const std::size_t taps_lo = cfg_.interpolation == AdvectionInterpolation::Cubic ? 0 : 1;
    const std::size_t taps_hi = cfg_.interpolation == AdvectionInterpolation::Cubic ? 4 : 3;
    for (std::size_t n = 0; n < box_.size(); ++n) {
        const Stencil& s = stencils_[n];
        std::array<std::size_t, 4> cols{};
        for (std::size_t a = taps_lo; a < taps_hi; ++a) cols[a] = (static_cast<std::size_t>(s.i0) + a) % nx;
        double acc = 0.0;
        for (std::size_t b = taps_lo; b < taps_hi; ++b) {
            const std::size_t row = ((static_cast<std::size_t>(s.j0) + b) % ny) * nx;
            double line = 0.0;
            for (std::size_t a = taps_lo; a < taps_hi; ++a) line += s.wx[a] * src[row + cols[a]];
            acc += s.wy[b] * line;
        }
        dst[n] = acc;
    }
}

void PdeSolver::diffuse(ScalarField& field) {
    fft_.forward(field.values());
    auto spec = fft_.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= cn_factor_[k];
    fft_.inverse(field.values());
}

void PdeSolver::explicit_upwind(const ScalarField& in, ScalarField& out) const {
    const std::size_t nx = box_.nx();
    const std::size_t ny = box_.ny();
    const double hx = box_.hx();
    const double hy = box_.hy();
    const double dt = cfg_.dt;
    const double kappa = cfg_.kappa;
    for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t jp = (j + 1) % ny;
        const std::size_t jm = (j + ny - 1) % ny;
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t ip = (i + 1) % nx;
            const std::size_t im = (i + nx - 1) % nx;
            const double c = in.at(i, j);
            const Vec2 u = node_velocity_[j * nx + i];
            const double dx = u.x > 0.0 ? (c - in.at(im, j)) / hx : (in.at(ip, j) - c) / hx;
            const double dy = u.y > 0.0 ? (c - in.at(i, jm)) / hy : (in.at(i, jp) - c) / hy;
            const double lap = (in.at(ip, j) - 2.0 * c + in.at(im, j)) / (hx * hx) +
                               (in.at(i, jp) - 2.0 * c + in.at(i, jm)) / (hy * hy);
            out.at(i, j) = c - dt * (u.x * dx + u.y * dy) + dt * kappa * lap;
        }
    }
}

void PdeSolver::step(ScalarField& field) {
    if (!(field.box() == box_)) throw ConfigError("step: field grid does not match the solver grid");
    const double before = field.max_abs();
    if (cfg_.scheme == Scheme::ExplicitUpwind) {
        explicit_upwind(field, scratch_);
    } else {
        if (velocity_.is_zero()) {
            std::copy(field.values().begin(), field.values().end(), scratch_.values().begin());
        } else {
            advect(field, scratch_);
        }
        diffuse(scratch_);
    }
    mean_zero_project_inplace(scratch_);
    const double after = scratch_.max_abs();
    const auto vals = scratch_.values();
    const bool finite = std::all_of(vals.begin(), vals.end(), [](double v) { return std::isfinite(v); });
    if (!finite || (before > 0.0 && after > 10.0 * before)) {
        throw NumericalError(NumericalError::Kind::Instability,
                             fmt::format("step: max|rho| grew from {:.6g} to {:.6g} in one step", before, after));
    }
    std::swap(field, scratch_);
}

PdeResult PdeSolver::run(const ScalarField& rho0) {
    ScalarField field = rho0;
    if (std::abs(field.mean()) > 1e-10 * std::max(field.max_abs(), std::numeric_limits<double>::min())) {
        throw ConfigError("run: initial field must be mean zero");
    }
    const std::size_t nsteps = cfg_.steps();
    DecaySeries series;
    const std::size_t nrec = nsteps / cfg_.record_every + 2;
    series.times.reserve(nrec);
    series.norms_sq.reserve(nrec);
    series.dissipation.reserve(nrec);

    double prev_rate = cfg_.kappa * grad_norm_sq(field, cfg_.gradient);
    double prev_t = 0.0;
    double accumulated = 0.0;
    series.times.push_back(0.0);
    series.norms_sq.push_back(l2_norm_sq(field));
    series.dissipation.push_back(0.0);

    for (std::size_t k = 1; k <= nsteps; ++k) {
        const double t = static_cast<double>(k) * cfg_.dt;
        try {
            step(field);
        } catch (const NumericalError& e) {
            throw NumericalError(e.kind(), fmt::format("{} (t = {:.6g})", e.what(), t));
        }
        if (k % cfg_.record_every == 0 || k == nsteps) {
            const double rate = cfg_.kappa * grad_norm_sq(field, cfg_.gradient);
            accumulated += 0.5 * (prev_rate + rate) * (t - prev_t);
            prev_rate = rate;
            prev_t = t;
            series.times.push_back(t);
            series.norms_sq.push_back(l2_norm_sq(field));
            series.dissipation.push_back(accumulated);
        }
    }
    return {std::move(series), std::move(field)};
}

ScalarField step(const ScalarField& field, const VelocityField& velocity, const SolverConfig& cfg) {
    PdeSolver solver(field.box(), velocity, cfg);
    ScalarField out = field;
    solver.step(out);
    return out;
}

DecaySeries run(const ScalarField& rho0, const VelocityField& velocity, const SolverConfig& cfg) {
    PdeSolver solver(rho0.box(), velocity, cfg);
    return solver.run(rho0).series;
}

}  // namespace anisodiff
