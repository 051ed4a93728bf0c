#include <doctest.h>

#include "anisodiff/errors.hpp"
#include "anisodiff/particles.hpp"
#include "anisodiff/pde_solver.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace anisodiff;

namespace {

VelocityField stream() {
    AnisotropyParams a;
    a.p = 2;
    a.q = 3;
    return make_velocity(a, 1.0, 1e-3);
}

ParticleConfig pcfg(std::size_t n, double ds, std::uint64_t seed) {
    ParticleConfig c;
    c.n = n;
    c.ds = ds;
    c.seed = seed;
    return c;
}

struct Plain {
    double mean, var;
};

// two-pass moments, independent of the library
Plain plain_moments(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, s / (n - 1)};
}

}  // namespace

TEST_CASE("no noise and no drift leaves particles in place") {
    const DomainBox box(1, 1, 8, 8);
    ParticleEnsemble e(box, 50, 0.3, -0.2, 0.0, 1);
    for (int k = 0; k < 10; ++k) sde_step(e, make_zero_velocity(), 0.1);
    for (std::size_t k = 0; k < e.size(); ++k) {
        CHECK(e.x()[k] == 0.3);
        CHECK(e.y()[k] == -0.2);
    }
    CHECK(e.elapsed() == doctest::Approx(1.0));
}

TEST_CASE("constant drift moves particles backward along the flow") {
    const DomainBox box(1, 1, 8, 8);
    const double c = 0.7, t = 1.3;
    ParticleEnsemble e(box, 4, 0.1, 0.2, 0.0, 1);
    ParticleEnsemble lit(box, 4, 0.1, 0.2, 0.0, 1, true);
    for (int k = 0; k < 13; ++k) {
        sde_step(e, make_constant_velocity(c, 0), 0.1);
        sde_step(lit, make_constant_velocity(c, 0), 0.1);
    }
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(e.displacement_x()[k] == doctest::Approx(-c * t).epsilon(1e-12));
        CHECK(e.displacement_y()[k] == 0.0);
        CHECK(e.x()[k] == doctest::Approx(box.wrap_x(0.1 - c * t)).epsilon(1e-12));
        CHECK(lit.displacement_x()[k] == doctest::Approx(c * t).epsilon(1e-12));
        CHECK(lit.x()[k] == doctest::Approx(box.wrap_x(0.1 + c * t)).epsilon(1e-12));
    }
}

TEST_CASE("Brownian displacement statistics") {
    const DomainBox box(1, 1, 8, 8);
    const double kappa = 0.01, t = 1.0;
    ParticleEnsemble e(box, 100000, 0.0, 0.0, kappa, 17);
    for (int k = 0; k < 20; ++k) sde_step(e, make_zero_velocity(), t / 20);
    for (auto disp : {e.displacement_x(), e.displacement_y()}) {
        const auto m = sample_moments(disp);
        const auto ref = plain_moments(disp);
        CHECK(m.mean == doctest::Approx(ref.mean).scale(1e-15).epsilon(1e-9));
        CHECK(m.variance == doctest::Approx(ref.var).epsilon(1e-9));
        CHECK(std::abs(m.mean) <= 3 * m.mean_se);
        CHECK(std::abs(m.variance - 2 * kappa * t) <= 3 * m.variance_se);
        // Gaussian: se of the variance is about var * sqrt(2/n)
        CHECK(m.variance_se == doctest::Approx(2 * kappa * t * std::sqrt(2.0 / 1e5)).epsilon(0.05));
    }
    for (std::size_t k = 0; k < e.size(); ++k) {
        CHECK(e.x()[k] >= -1.0);
        CHECK(e.x()[k] < 1.0);
    }
}

TEST_CASE("sample moments") {
    const std::vector<double> v{1, 2, 3, 4};
    const auto m = sample_moments(v);
    CHECK(m.mean == 2.5);
    CHECK(m.variance == doctest::Approx(5.0 / 3.0));
    CHECK(m.second == 7.5);
    CHECK(m.mean_se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    const std::vector<double> same(1000, 0.1 + 0.2);
    CHECK(sample_moments(same).variance == 0.0);
    CHECK(sample_moments(same).variance_se == 0.0);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(sample_moments(one), ConfigError);
}

TEST_CASE("substream seeds") {
    CHECK(substream_seed(1, 0) == substream_seed(1, 0));
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 0) != substream_seed(2, 0));
    CHECK(substream_seed(1ull << 40, 3) != substream_seed(0, 3));
}

TEST_CASE("variance integral quadrature") {
    const DomainBox box(1, 1, 16, 16);
    CHECK(variance_integral(VarianceMap{ScalarField(box), 10}) == 0.0);
    CHECK(variance_integral(VarianceMap{ScalarField(box, std::vector<double>(box.size(), 0.3)), 10}) == doctest::Approx(1.2));
}

TEST_CASE("deterministic trajectories have zero variance") {
    const DomainBox box(1, 1, 16, 16);
    const auto rho0 = make_sin_sin(box);
    const auto [mean, var] = feynman_kac(rho0, stream(), 0.5, 0.0, 100, 0.01, 3);
    for (double v : var.values.values()) CHECK(v == 0.0);
    CHECK(variance_integral(var) == 0.0);

    // constant drift: the mean is rho0 sampled at the foot of the characteristic
    const auto [m2, v2] = feynman_kac(rho0, make_constant_velocity(0.4, -0.1), 0.5, 0.0, 10, 0.05, 3);
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t i = 0; i < 16; ++i)
            CHECK(m2.at(i, j) == doctest::Approx(sample(rho0, box.x_center(i) - 0.2, box.y_center(j) + 0.05)).scale(1e-12));
}

TEST_CASE("a tiny horizon reproduces the initial field") {
    const DomainBox box(1, 1, 16, 16);
    const auto rho0 = make_sin_sin(box);
    const double ds = 1e-6, kappa = 0.05;
    const auto [mean, var] = feynman_kac(rho0, stream(), ds, kappa, 200, ds, 4);
    const double spread = std::sqrt(2 * kappa * ds);
    for (std::size_t k = 0; k < box.size(); ++k) {
        CHECK(std::abs(mean.values()[k] - rho0.values()[k]) <= 5 * spread * std::numbers::pi * std::sqrt(2.0));
        CHECK(var.values.values()[k] <= 25 * spread * spread * 2 * std::numbers::pi * std::numbers::pi);
    }
}

TEST_CASE("Monte Carlo mean matches the heat solution") {
    const DomainBox box(1, 1, 32, 32);
    const auto rho0 = make_sin_sin(box);
    const double kappa = 0.05, t = 0.5;
    const double ts[] = {t};
    const auto snaps = feynman_kac(rho0, make_zero_velocity(), kappa, ts, pcfg(10000, 0.5, 1));
    SolverConfig sc;
    sc.kappa = kappa;
    sc.dt = 1e-3;
    sc.t_end = t;
    PdeSolver solver(box, make_zero_velocity(), sc);
    const auto pde = solver.run(rho0).final_field;
    ScalarField diff(box);
    for (std::size_t k = 0; k < box.size(); ++k) diff.values()[k] = snaps[0].mean.values()[k] - pde.values()[k];
    const double sigma = pooled_sigma(snaps[0]);
    CHECK(std::sqrt(l2_norm_sq(diff)) <= 3 * sigma);
    CHECK(sigma > 0);
}

TEST_CASE("variance equals second moment minus squared mean") {
    const DomainBox box(1, 1, 8, 8);
    const auto rho0 = make_fourier_field(box, random_modes(2, 3, 3));
    const double ts[] = {0.2, 0.4};
    const auto snaps = feynman_kac(rho0, stream(), 0.05, ts, pcfg(500, 0.01, 9));
    for (const auto& s : snaps) {
        for (std::size_t k = 0; k < box.size(); ++k) {
            const double m = s.mean.values()[k];
            const double direct = (s.second_moment.values()[k] - m * m) * 500.0 / 499.0;
            CHECK(s.variance.values.values()[k] == doctest::Approx(direct).epsilon(1e-8).scale(1e-12));
            CHECK(s.variance.values.values()[k] >= 0.0);
        }
    }
    CHECK(snaps[0].steps_taken == doctest::Approx(20));
    CHECK(snaps[1].steps_taken == doctest::Approx(40));
}

TEST_CASE("same seed gives identical bits, other seeds differ") {
    const DomainBox box(1, 1, 8, 8);
    const auto rho0 = make_sin_sin(box);
    const auto a = feynman_kac(rho0, stream(), 0.3, 0.05, 200, 0.01, 5);
    const auto b = feynman_kac(rho0, stream(), 0.3, 0.05, 200, 0.01, 5);
    const auto c = feynman_kac(rho0, stream(), 0.3, 0.05, 200, 0.01, 6);
    bool differs = false;
    for (std::size_t k = 0; k < box.size(); ++k) {
        CHECK(a.second.values.values()[k] == b.second.values.values()[k]);
        CHECK(a.first.values()[k] == b.first.values()[k]);
        differs |= a.second.values.values()[k] != c.second.values.values()[k];
    }
    CHECK(differs);
}

TEST_CASE("independent substreams agree within joint error") {
    const DomainBox box(1, 1, 16, 16);
    const auto rho0 = make_sin_sin(box);
    const double ts[] = {0.5};
    const auto a = feynman_kac(rho0, make_zero_velocity(), 0.05, ts, pcfg(2000, 0.5, 11));
    const auto b = feynman_kac(rho0, make_zero_velocity(), 0.05, ts, pcfg(2000, 0.5, 12));
    const double va = variance_integral(a[0].variance), vb = variance_integral(b[0].variance);
    const double sa = variance_integral_se(a[0]), sb = variance_integral_se(b[0]);
    CHECK(std::abs(va - vb) <= 3 * std::hypot(sa, sb));
}

TEST_CASE("mean-field error bar shrinks like 1/sqrt(n)") {
    const DomainBox box(1, 1, 8, 8);
    const auto rho0 = make_sin_sin(box);
    const double ts[] = {0.2};
    double prev = 0;
    for (std::size_t n : {500, 2000, 8000}) {
        const auto s = feynman_kac(rho0, make_zero_velocity(), 0.05, ts, pcfg(n, 0.2, 1));
        const double sigma = pooled_sigma(s[0]);
        if (prev > 0) CHECK(prev / sigma == doctest::Approx(2.0).epsilon(0.1));
        prev = sigma;
    }
}

TEST_CASE("Euler-Maruyama strong order one with common random numbers") {
    const DomainBox box(2, 2, 8, 8);
    const auto u = stream();
    const double kappa = 0.05, t = 0.5;
    const std::size_t n = 500;
    const int fine_steps = 256;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> xi(fine_steps, std::vector<double>(2 * n));
    for (auto& row : xi)
        for (auto& v : row) v = g(rng);

    // integrate with steps of fine_steps/m normals summed and rescaled
    auto endpoint = [&](int m) {
        ParticleEnsemble e(box, n, 0.3, 0.4, kappa, 1);
        const int group = fine_steps / m;
        std::vector<double> z(2 * n);
        for (int s = 0; s < m; ++s) {
            std::fill(z.begin(), z.end(), 0.0);
            for (int r = 0; r < group; ++r)
                for (std::size_t k = 0; k < 2 * n; ++k) z[k] += xi[s * group + r][k];
            for (auto& v : z) v /= std::sqrt(static_cast<double>(group));
            e.step(u, t / m, z);
        }
        std::vector<double> out(2 * n);
        for (std::size_t k = 0; k < n; ++k) {
            out[2 * k] = e.displacement_x()[k];
            out[2 * k + 1] = e.displacement_y()[k];
        }
        return out;
    };
    auto gap = [&](int m) {
        const auto a = endpoint(m), b = endpoint(2 * m);
        double s = 0;
        for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
        return s / static_cast<double>(a.size());
    };
    const double g16 = gap(16), g32 = gap(32), g64 = gap(64);
    CHECK(g16 / g32 == doctest::Approx(2.0).epsilon(0.3));
    CHECK(g32 / g64 == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("argument checks") {
    const DomainBox box(1, 1, 8, 8);
    const auto rho0 = make_sin_sin(box);
    CHECK_THROWS_AS(pcfg(1, 0.1, 1).validate(), ConfigError);
    CHECK_THROWS_AS(pcfg(10, 0, 1).validate(), ConfigError);
    CHECK_THROWS_AS(feynman_kac(rho0, stream(), 0.1, 0.05, 10, 0.2, 1), ConfigError);
    CHECK_THROWS_AS(feynman_kac(rho0, stream(), 0.1, -0.05, 10, 0.01, 1), ConfigError);
    const double bad[] = {0.5, 0.2};
    CHECK_THROWS_AS(feynman_kac(rho0, stream(), 0.05, bad, pcfg(10, 0.01, 1)), ConfigError);
    ParticleEnsemble e(box, 3, 0, 0, 0.1, 1);
    CHECK_THROWS_AS(sde_step(e, stream(), 0.0), ConfigError);
    const std::vector<double> few(5);
    CHECK_THROWS_AS(e.step(stream(), 0.1, few), ConfigError);
    CHECK_THROWS_AS(ParticleEnsemble(box, 3, 0, 0, -1, 1), ConfigError);
}
