#include <doctest.h>

#include "anisodiff/errors.hpp"
#include "anisodiff/pde_solver.hpp"

#include <cmath>
#include <numbers>

using namespace anisodiff;
using std::numbers::pi;

namespace {

SolverConfig cfg_of(double kappa, double dt, double t_end, std::size_t record_every = 10) {
    SolverConfig c;
    c.kappa = kappa;
    c.dt = dt;
    c.t_end = t_end;
    c.record_every = record_every;
    return c;
}

VelocityField stream() {
    AnisotropyParams a;
    a.p = 2;
    a.q = 3;
    return make_velocity(a, 1.0, 1e-3);
}

// sin(pi mx (x - cx t)) sin(pi my (y - cy t)) e^{-kappa pi^2 (mx^2+my^2) t}
ScalarField translated_mode(const DomainBox& box, int mx, int my, double cx, double cy, double kappa, double t) {
    ScalarField f(box);
    const double decay = std::exp(-kappa * pi * pi * (mx * mx + my * my) * t);
    for (std::size_t j = 0; j < box.ny(); ++j)
        for (std::size_t i = 0; i < box.nx(); ++i)
            f.at(i, j) = decay * std::sin(pi * mx * (box.x_center(i) - cx * t)) * std::sin(pi * my * (box.y_center(j) - cy * t));
    return f;
}

double l2_diff(const ScalarField& a, const ScalarField& b) {
    ScalarField d(a.box());
    for (std::size_t k = 0; k < a.box().size(); ++k) d.values()[k] = a.values()[k] - b.values()[k];
    return std::sqrt(l2_norm_sq(d));
}

double energy_identity_error(const DecaySeries& s, std::size_t k) {
    const double half_drop = 0.5 * (s.norms_sq.front() - s.norms_sq[k]);
    return (half_drop - s.dissipation[k]) / half_drop;
}

std::size_t index_of(const DecaySeries& s, double t) {
    for (std::size_t k = 0; k < s.size(); ++k)
        if (std::abs(s.times[k] - t) < 1e-9) return k;
    FAIL("time not recorded");
    return 0;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(cfg_of(0.01, 1e-3, 1).validate());
    CHECK_NOTHROW(cfg_of(0.0, 1e-3, 1).validate());
    CHECK_THROWS_AS(cfg_of(-0.01, 1e-3, 1).validate(), ConfigError);
    CHECK_THROWS_AS(cfg_of(0.01, 0, 1).validate(), ConfigError);
    CHECK_THROWS_AS(cfg_of(0.01, 1e-3, -1).validate(), ConfigError);
    CHECK_THROWS_AS(cfg_of(0.01, 0.3, 1).validate(), ConfigError);
    CHECK_THROWS_AS(cfg_of(0.01, 0.1, 1, 11).validate(), ConfigError);
    CHECK_THROWS_AS(cfg_of(0.01, 0.1, 1, 0).validate(), ConfigError);
    CHECK(cfg_of(0.01, 1e-3, 2).steps() == 2000);
}

TEST_CASE("explicit scheme enforces its stability bound") {
    const DomainBox box(1, 1, 32, 32);
    auto c = cfg_of(0.01, 1e-3, 1);
    c.scheme = Scheme::ExplicitUpwind;
    // h = 1/16: diffusive limit 0.9*h^2/(4 kappa) = 0.0879, advective 0.9*h/|u|
    CHECK_NOTHROW(PdeSolver(box, make_zero_velocity(), c));
    c.dt = 0.1;
    c.t_end = 1;
    CHECK_THROWS_AS(PdeSolver(box, make_zero_velocity(), c), ConfigError);
    c.dt = 0.05;
    CHECK_THROWS_AS(PdeSolver(box, make_constant_velocity(2.0, 0.0), c), ConfigError);  // h/|u| = 0.031
    c.dt = 0.025;
    CHECK_NOTHROW(PdeSolver(box, make_constant_velocity(2.0, 0.0), c));
}

TEST_CASE("one diffusion step applies the Crank-Nicolson factor") {
    const DomainBox box(1, 1, 32, 32);
    const auto rho = make_sin_sin(box);
    for (double dt : {1e-3, 1e-2, 1e-1}) {
        const double kappa = 0.01;
        const auto out = step(rho, make_zero_velocity(), cfg_of(kappa, dt, 1, 1));
        const double z = 0.5 * kappa * 2 * pi * pi * dt;
        const double cn = (1 - z) / (1 + z);
        const double exact = std::exp(-2 * pi * pi * kappa * dt);
        CHECK(std::abs(cn - exact) <= std::pow(2 * z, 3));
        for (std::size_t k = 0; k < box.size(); ++k) CHECK(out.values()[k] == doctest::Approx(cn * rho.values()[k]).scale(1e-14));
    }
}

TEST_CASE("zero field stays zero") {
    const DomainBox box(1, 1, 16, 16);
    for (auto scheme : {Scheme::SemiLagrangianCrankNicolson, Scheme::ExplicitUpwind}) {
        auto c = cfg_of(0.01, 1e-3, 1);
        c.scheme = scheme;
        const auto out = step(ScalarField(box), stream(), c);
        CHECK(out.max_abs() == 0.0);
    }
}

TEST_CASE("pure advection of a rigid translation") {
    const DomainBox box(1, 1, 64, 64);
    const double cx = 0.7, cy = -0.3, dt = 0.01;
    const auto rho = translated_mode(box, 1, 2, cx, cy, 0, 0);
    auto c = cfg_of(0.0, dt, 1, 1);
    const auto out = step(rho, make_constant_velocity(cx, cy), c);
    const auto exact = translated_mode(box, 1, 2, cx, cy, 0, dt);
    // cubic Lagrange remainder: h^4 max|d4| |(a+1)a(a-1)(a-2)| / 24 per direction
    const double h = box.hx();
    auto w = [](double a) { return std::abs((a + 1) * a * (a - 1) * (a - 2)); };
    const double fx = -cx * dt / h, fy = -cy * dt / h;
    const double ax = fx - std::floor(fx), ay = fy - std::floor(fy);
    const double bound = std::pow(h, 4) / 24 * (std::pow(pi, 4) * w(ax) * 1.25 + std::pow(2 * pi, 4) * w(ay)) * 2;
    CHECK(l2_diff(out, exact) <= bound);
    CHECK(l2_diff(out, exact) >= bound / 10);
    CHECK(l2_norm_sq(out) == doctest::Approx(l2_norm_sq(rho)).epsilon(2 * bound));

    // a whole number of cells is exact for either interpolation
    c.dt = box.hx() / cx;
    c.t_end = c.dt;
    c.interpolation = AdvectionInterpolation::Linear;
    const auto shifted = step(rho, make_constant_velocity(cx, 0), c);
    for (std::size_t j = 0; j < 64; ++j)
        for (std::size_t i = 0; i < 64; ++i) CHECK(shifted.at((i + 1) % 64, j) == doctest::Approx(rho.at(i, j)).scale(1e-13));
}

TEST_CASE("heat decay of a single mode") {
    const DomainBox box(1, 1, 64, 64);
    const auto s = run(make_sin_sin(box), make_zero_velocity(), cfg_of(0.01, 1e-3, 1));
    REQUIRE(s.size() == 101);
    CHECK(s.times.front() == 0.0);
    CHECK(s.times.back() == doctest::Approx(1.0));
    CHECK(s.norms_sq.front() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s.norms_sq[k] == doctest::Approx(std::exp(-4 * pi * pi * 0.01 * s.times[k])).epsilon(0.01));
        // kappa int 2pi^2 e^{-4 pi^2 kappa s} ds
        const double diss = 0.5 * (1 - std::exp(-4 * pi * pi * 0.01 * s.times[k]));
        CHECK(s.dissipation[k] == doctest::Approx(diss).epsilon(1e-4).scale(1e-12));
        if (k > 0) {
            CHECK(s.times[k] > s.times[k - 1]);
            CHECK(s.norms_sq[k] <= s.norms_sq[k - 1]);
        }
    }
    CHECK(decay_csv(s).rfind("t,norm_sq,dissipation\n0,", 0) == 0);
}

TEST_CASE("energy identity at 128^2") {
    const DomainBox box(1, 1, 128, 128);
    const auto rho0 = make_sin_sin(box);
    for (const auto& u : {make_zero_velocity(), stream()}) {
        const auto s = run(rho0, u, cfg_of(0.01, 1e-3, 1));
        CHECK(std::abs(energy_identity_error(s, s.size() - 1)) <= 0.01);
        for (std::size_t k = 1; k < s.size(); ++k) CHECK(s.norms_sq[k] <= s.norms_sq[k - 1] * (1 + 1e-12));
        CHECK(s.norms_sq.back() < s.norms_sq.front());
    }
}

TEST_CASE("energy identity with the spectral gradient and a random initial field") {
    const DomainBox box(1, 1, 64, 64);
    const auto modes = random_modes(5, 3, 4);
    const auto rho0 = make_fourier_field(box, modes);
    auto c = cfg_of(0.02, 1e-3, 1);
    c.gradient = GradientBackend::Spectral;
    const auto s = run(rho0, stream(), c);
    CHECK(std::abs(energy_identity_error(s, index_of(s, 0.5))) <= 0.01);
    CHECK(std::abs(energy_identity_error(s, index_of(s, 1.0))) <= 0.01);
}

TEST_CASE("mean stays zero through every step") {
    const DomainBox box(1, 1, 64, 64);
    const auto modes = random_modes(9, 4, 6);
    auto rho = make_fourier_field(box, modes);
    PdeSolver solver(box, stream(), cfg_of(0.01, 1e-3, 1));
    for (int k = 0; k < 200; ++k) {
        solver.step(rho);
        CHECK(std::abs(rho.mean()) <= 1e-10 * rho.max_abs());
    }
}

TEST_CASE("advection alone nearly preserves the norm") {
    const DomainBox box(1, 1, 128, 128);
    const auto s = run(make_sin_sin(box), stream(), cfg_of(0.0, 1e-3, 1, 100));
    CHECK(s.norms_sq.back() / s.norms_sq.front() >= 0.98);
    CHECK(s.norms_sq.back() / s.norms_sq.front() <= 1.0 + 1e-12);
    CHECK(s.dissipation.back() == 0.0);
}

TEST_CASE("refinement against analytic solutions") {
    SUBCASE("pure diffusion") {
        double prev = 0;
        for (std::size_t n : {32, 64}) {
            const DomainBox box(1, 1, n, n);
            const double dt = n == 32 ? 0.02 : 0.01;
            const auto rho0 = translated_mode(box, 2, 3, 0, 0, 0.1, 0);
            PdeSolver solver(box, make_zero_velocity(), cfg_of(0.1, dt, 1, 1));
            const auto out = solver.run(rho0).final_field;
            const double err = l2_diff(out, translated_mode(box, 2, 3, 0, 0, 0.1, 1));
            if (prev > 0) CHECK(prev / err >= 3.0);
            prev = err;
        }
    }
    SUBCASE("translation with diffusion") {
        double prev = 0;
        for (std::size_t n : {32, 64}) {
            const DomainBox box(1, 1, n, n);
            const double dt = n == 32 ? 0.02 : 0.01;
            const auto rho0 = translated_mode(box, 2, 1, 0.5, 0.25, 0.02, 0);
            PdeSolver solver(box, make_constant_velocity(0.5, 0.25), cfg_of(0.02, dt, 1, 1));
            const auto out = solver.run(rho0).final_field;
            const double err = l2_diff(out, translated_mode(box, 2, 1, 0.5, 0.25, 0.02, 1));
            if (prev > 0) CHECK(prev / err >= 3.0);
            prev = err;
        }
    }
}

TEST_CASE("explicit upwind converges to the heat solution") {
    const DomainBox box(1, 1, 32, 32);
    auto c = cfg_of(0.01, 1e-3, 1);
    c.scheme = Scheme::ExplicitUpwind;
    const auto s = run(make_sin_sin(box), make_zero_velocity(), c);
    CHECK(s.norms_sq.back() == doctest::Approx(std::exp(-4 * pi * pi * 0.01)).epsilon(0.01));
    const auto a = run(make_sin_sin(box), stream(), c);
    for (std::size_t k = 1; k < a.size(); ++k) CHECK(a.norms_sq[k] <= a.norms_sq[k - 1]);
}

TEST_CASE("failures") {
    const DomainBox box(1, 1, 16, 16);
    PdeSolver solver(box, make_zero_velocity(), cfg_of(0.01, 1e-3, 1));
    auto bad = make_sin_sin(box);
    bad.at(3, 3) = NAN;
    CHECK_THROWS_AS(solver.step(bad), NumericalError);
    try {
        auto b2 = make_sin_sin(box);
        b2.at(1, 1) = INFINITY;
        solver.step(b2);
    } catch (const NumericalError& e) {
        CHECK(e.kind() == NumericalError::Kind::Instability);
    }

    ScalarField offset(box, std::vector<double>(box.size(), 1.0));
    offset.at(0, 0) = 2.0;
    CHECK_THROWS_AS(solver.run(offset), ConfigError);

    auto other = make_sin_sin(DomainBox(1, 1, 32, 32));
    CHECK_THROWS_AS(solver.step(other), ConfigError);
}

TEST_CASE("runs are bitwise repeatable") {
    const DomainBox box(1, 1, 32, 32);
    const auto rho0 = make_fourier_field(box, random_modes(3, 3, 3));
    const auto a = run(rho0, stream(), cfg_of(0.01, 1e-3, 0.5));
    const auto b = run(rho0, stream(), cfg_of(0.01, 1e-3, 0.5));
    CHECK(decay_csv(a) == decay_csv(b));
}
