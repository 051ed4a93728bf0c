#include "anisodiff/analysis.hpp"

#include "anisodiff/errors.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace anisodiff {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ConfigError("rational: zero denominator");
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
}

Rational operator+(Rational a, Rational b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
Rational operator/(Rational a, Rational b) { return {a.num_ * b.den_, a.den_ * b.num_}; }

std::string to_string(const Rational& r) {
    return r.den() == 1 ? fmt::format("{}", r.num()) : fmt::format("{}/{}", r.num(), r.den());
}

Rational theoretical_exponent(Rational p, Rational q) {
    if (p.num() <= 0 || q.num() <= 0) throw ConfigError("theoretical_exponent: p and q must be > 0");
    return (p * q) / (p + q + Rational(2));
}

double theoretical_exponent(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw ConfigError("theoretical_exponent: p and q must be > 0");
    return p * q / (p + q + 2.0);
}

double theoretical_exponent(const AnisotropyParams& params) { return theoretical_exponent(params.p, params.q); }

Rational figure_exponent(Rational p, Rational q) {
    if (p.num() <= 0 || q.num() <= 0) throw ConfigError("figure_exponent: p and q must be > 0");
    return p / (p + q);
}

double figure_exponent(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw ConfigError("figure_exponent: p and q must be > 0");
    return p / (p + q);
}

double figure1_curve(double kappa, Figure1Curve curve) {
    if (!(kappa >= 0.01 && kappa <= 1.0)) {
        throw ConfigError(fmt::format("figure1_curve: kappa must lie in [0.01, 1] (got {})", kappa));
    }
    switch (curve) {
        case Figure1Curve::Blue:
            return 2.0 * std::pow(kappa, 2.0 / 5.0);
        case Figure1Curve::Red:
            return 1.5 * std::pow(kappa, 3.0 / 7.0);
        case Figure1Curve::Green:
            return 1.2 * std::pow(kappa, 4.0 / 9.0);
    }
    return 0.0;
}

double figure2_surface(double p, double q) {
    if (!(p >= 1.0 && p <= 5.0) || !(q >= 1.0 && q <= 5.0)) {
        throw ConfigError(fmt::format("figure2_surface: p and q must lie in [1, 5] (got {}, {})", p, q));
    }
    return 1.5 * std::pow(0.1, theoretical_exponent(p, q));
}

void FitWindow::validate() const {
    if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
        throw ConfigError(fmt::format("analysis.window: need 0 < lo < hi < 1 (got [{}, {}])", lo, hi));
    }
}

LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) throw ConfigError("ordinary_least_squares: need >= 3 paired samples");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) throw NumericalError(NumericalError::Kind::Degenerate, "ordinary_least_squares: x has no spread");
    LinearFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (fit.intercept + fit.slope * x[k]);
        ssr += r * r;
    }
    fit.residual_ss = ssr;
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    fit.ci95 = boost::math::quantile(dist, 0.975) * fit.slope_se;
    return fit;
}

DecayFit fit_decay(const DecaySeries& series, const FitWindow& window) {
    window.validate();
    if (series.size() < 10) {
        throw NumericalError(NumericalError::Kind::WindowTooSmall,
                             fmt::format("fit_decay: window too small ({} samples in series)", series.size()));
    }
    const double initial = series.norms_sq.front();
    if (!(initial > 0.0)) throw NumericalError(NumericalError::Kind::InsufficientDecay, "fit_decay: zero initial norm");
    const double lowest = *std::min_element(series.norms_sq.begin(), series.norms_sq.end());
    if (lowest >= window.hi * initial) {
        throw NumericalError(NumericalError::Kind::InsufficientDecay,
                             fmt::format("fit_decay: insufficient decay (norm never fell below {} of initial by t = {})",
                                         window.hi, series.times.back()));
    }
    std::vector<double> ts, logs;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double ratio = series.norms_sq[k] / initial;
        if (ratio >= window.lo && ratio <= window.hi && series.norms_sq[k] > 0.0) {
            ts.push_back(series.times[k]);
            logs.push_back(std::log(series.norms_sq[k]));
        }
    }
    if (ts.size() < 10) {
        throw NumericalError(NumericalError::Kind::WindowTooSmall,
                             fmt::format("fit_decay: window too small ({} samples inside [{}, {}])", ts.size(),
                                         window.lo, window.hi));
    }
    const LinearFit line = ordinary_least_squares(ts, logs);
    DecayFit fit;
    fit.rate = -line.slope;
    fit.prefactor = std::exp(line.intercept);
    fit.t_lo = ts.front();
    fit.t_hi = ts.back();
    fit.r_squared = line.r_squared;
    fit.rate_stderr = line.slope_se;
    fit.samples = ts.size();
    return fit;
}

ExponentFit fit_exponent(const AnisotropyParams& params, std::span<const double> kappas, std::span<const double> rates) {
    if (kappas.size() != rates.size() || kappas.size() < 4) {
        throw ConfigError("fit_exponent: need >= 4 (kappa, rate) pairs");
    }
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < kappas.size(); ++k) {
        if (!(kappas[k] > 0.0) || !(rates[k] > 0.0)) {
            throw NumericalError(NumericalError::Kind::Degenerate,
                                 fmt::format("fit_exponent: non-positive rate {} at kappa {}", rates[k], kappas[k]));
        }
        if (k > 0 && !(kappas[k] > kappas[k - 1])) throw ConfigError("fit_exponent: kappas must be strictly increasing");
        lx.push_back(std::log(kappas[k]));
        ly.push_back(std::log(rates[k]));
    }
    const LinearFit line = ordinary_least_squares(lx, ly);
    ExponentFit fit;
    fit.kappas.assign(kappas.begin(), kappas.end());
    fit.rates.assign(rates.begin(), rates.end());
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.ci95 = line.ci95;
    fit.slope_se = line.slope_se;
    fit.theoretical = theoretical_exponent(params);
    fit.figure_alternative = figure_exponent(params.p, params.q);
    for (std::size_t k = 0; k < lx.size(); ++k) fit.residuals.push_back(ly[k] - (line.intercept + line.slope * lx[k]));
    return fit;
}

SweepResult sweep_and_fit(const AnisotropyParams& params, std::span<const double> kappas, const SolverConfig& solver,
                          const VelocityField& velocity, const ScalarField& rho0, const FitWindow& window) {
    params.validate();
    window.validate();
    if (kappas.size() < 4) throw ConfigError("solver.kappas: a sweep needs at least 4 values");
    for (std::size_t k = 0; k < kappas.size(); ++k) {
        if (!(kappas[k] > 0.0)) throw ConfigError("solver.kappas: values must be > 0");
        if (k > 0 && !(kappas[k] > kappas[k - 1])) throw ConfigError("solver.kappas: values must be strictly increasing");
    }
    if (kappas.back() < 10.0 * kappas.front()) throw ConfigError("solver.kappas: values must span at least one decade");

    SweepResult result;
    result.points.resize(kappas.size());
    const auto count = static_cast<long long>(kappas.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long idx = 0; idx < count; ++idx) {
        auto& point = result.points[static_cast<std::size_t>(idx)];
        point.kappa = kappas[static_cast<std::size_t>(idx)];
        try {
            SolverConfig cfg = solver;
            cfg.kappa = point.kappa;
            PdeSolver pde(rho0.box(), velocity, cfg);
            point.fit = fit_decay(pde.run(rho0).series, window);
            point.ok = true;
        } catch (const std::exception& e) {
            point.error = e.what();
        }
    }

    std::vector<double> good_k, good_r;
    std::string failures;
    for (const auto& pt : result.points) {
        if (pt.ok) {
            good_k.push_back(pt.kappa);
            good_r.push_back(pt.fit.rate);
        } else {
            failures += fmt::format("\n  kappa = {}: {}", pt.kappa, pt.error);
        }
    }
    const std::size_t failed = kappas.size() - good_k.size();
    if (2 * failed > kappas.size() || good_k.size() < 4) {
        throw NumericalError(NumericalError::Kind::SweepFailed,
                             fmt::format("sweep: {} of {} kappa values failed{}", failed, kappas.size(), failures));
    }
    result.fit = fit_exponent(params, good_k, good_r);
    return result;
}

FdrResult fdr_check(const ScalarField& rho0, const VelocityField& velocity, double kappa,
                                 std::span<const double> checkpoints, const SolverConfig& pde,
                                 const ParticleConfig& particles) {
    if (checkpoints.empty()) throw ConfigError("particles.checkpoints: need at least one time");
    SolverConfig cfg = pde;
    cfg.kappa = kappa;
    cfg.t_end = checkpoints.back();
    cfg.validate();
    const double record_dt = static_cast<double>(cfg.record_every) * cfg.dt;
    for (double t : checkpoints) {
        const double k = t / record_dt;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
            throw ConfigError(fmt::format("particles.checkpoints: t = {} is not a multiple of record_every*dt = {}", t,
                                          record_dt));
        }
    }
    particles.validate();

    PdeSolver solver(rho0.box(), velocity, cfg);
    FdrResult out;
    out.series = solver.run(rho0).series;
    out.snapshots = feynman_kac(rho0, velocity, kappa, checkpoints, particles);
    const auto& series = out.series;
    const auto& snaps = out.snapshots;

    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const double t = checkpoints[c];
        const auto it = std::find_if(series.times.begin(), series.times.end(),
                                     [&](double s) { return std::abs(s - t) <= 1e-9 * std::max(1.0, t); });
        if (it == series.times.end()) throw ConfigError(fmt::format("fdr: no PDE record at t = {}", t));
        const auto k = static_cast<std::size_t>(it - series.times.begin());
        FdrRecord rec;
        rec.t = t;
        rec.lhs = series.dissipation[k];
        rec.energy_drop = series.norms_sq.front() - series.norms_sq[k];
        rec.rhs = variance_integral(snaps[c].variance);
        rec.rhs_stderr = variance_integral_se(snaps[c]);
        if (rec.rhs > 0.0) {
            rec.ratio = rec.lhs / rec.rhs;
            rec.ratio_stderr = std::abs(rec.ratio) * rec.rhs_stderr / rec.rhs;
        } else {
            rec.ratio = std::numeric_limits<double>::quiet_NaN();
            rec.ratio_stderr = std::numeric_limits<double>::quiet_NaN();
        }
        if (!std::isfinite(rec.rhs) || !std::isfinite(rec.lhs)) {
            throw NumericalError(NumericalError::Kind::Instability, fmt::format("fdr: non-finite estimate at t = {}", t));
        }
        out.records.push_back(rec);
    }
    return out;
}

}  // namespace anisodiff
