#pragma once

#include "anisodiff/domain.hpp"
#include "anisodiff/fields.hpp"
#include "anisodiff/particles.hpp"
#include "anisodiff/pde_solver.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace anisodiff {

/// Exact rational with a positive denominator, always reduced.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend bool operator==(const Rational&, const Rational&) = default;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::string to_string(const Rational& r);

/// pq / (p + q + 2), the predicted exponent of r(kappa).
Rational theoretical_exponent(Rational p, Rational q);
double theoretical_exponent(double p, double q);
double theoretical_exponent(const AnisotropyParams& params);

/// p / (p + q): the exponent actually plotted in the published rate-vs-kappa
/// curves, which differs from theoretical_exponent for the same legend values.
Rational figure_exponent(Rational p, Rational q);
double figure_exponent(double p, double q);

enum class Figure1Curve { Blue, Red, Green };

/// Blue = 2 k^(2/5), Red = 1.5 k^(3/7), Green = 1.2 k^(4/9); kappa in [0.01, 1].
double figure1_curve(double kappa, Figure1Curve curve);

/// 1.5 * 0.1^(pq/(p+q+2)) for p, q in [1, 5].
double figure2_surface(double p, double q);

struct FitWindow {
    double lo = 0.1;  // fraction of the initial norm
    double hi = 0.9;

    void validate() const;
};

/// ||rho(t)||^2 ~ prefactor * exp(-rate * t) over the window.
struct DecayFit {
    double rate = 0.0;
    double prefactor = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double r_squared = 0.0;
    double rate_stderr = 0.0;
    std::size_t samples = 0;
};

DecayFit fit_decay(const DecaySeries& series, const FitWindow& window = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double ci95 = 0.0;  // half-width, Student t with n - 2 dof
    double r_squared = 0.0;
    double residual_ss = 0.0;
    std::size_t n = 0;
};

LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

struct ExponentFit {
    std::vector<double> kappas;
    std::vector<double> rates;
    double slope = 0.0;
    double intercept = 0.0;
    double ci95 = 0.0;
    double slope_se = 0.0;
    double theoretical = 0.0;
    double figure_alternative = 0.0;
    std::vector<double> residuals;
};

/// OLS of ln(rate) on ln(kappa).
ExponentFit fit_exponent(const AnisotropyParams& params, std::span<const double> kappas, std::span<const double> rates);

struct SweepPoint {
    double kappa = 0.0;
    bool ok = false;
    DecayFit fit;
    std::string error;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    ExponentFit fit;
};

/// Runs the solver for every kappa (in parallel), fits each decay, then fits
/// the exponent. Failed kappas are kept in `points`; more than half failing
/// aborts.
SweepResult sweep_and_fit(const AnisotropyParams& params, std::span<const double> kappas, const SolverConfig& solver,
                          const VelocityField& velocity, const ScalarField& rho0, const FitWindow& window = {});

/// Both sides of the fluctuation-dissipation balance at one time.
struct FdrRecord {
    double t = 0.0;
    double lhs = 0.0;          // kappa * int_0^t ||grad rho||^2 ds from the PDE
    double rhs = 0.0;          // int Var(rho0(X_t, Y_t)) from the particles
    double ratio = 0.0;        // lhs / rhs, NaN when rhs == 0
    double rhs_stderr = 0.0;
    double ratio_stderr = 0.0;
    double energy_drop = 0.0;  // ||rho0||^2 - ||rho(t)||^2 from the PDE
};

struct FdrResult {
    std::vector<FdrRecord> records;
    std::vector<FeynmanKacSnapshot> snapshots;  // one per checkpoint
    DecaySeries series;
};

/// Runs both engines on the same box, kappa and horizon. Checkpoints must fall
/// on the PDE record grid (multiples of record_every * dt).
FdrResult fdr_check(const ScalarField& rho0, const VelocityField& velocity, double kappa,
                                 std::span<const double> checkpoints, const SolverConfig& pde,
                                 const ParticleConfig& particles);

}  // namespace anisodiff
