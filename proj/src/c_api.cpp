#include "anisodiff/anisodiff.h"

#include "anisodiff/analysis.hpp"
#include "anisodiff/app/commands.hpp"
#include "anisodiff/app/config.hpp"
#include "anisodiff/errors.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <memory>
#include <optional>
#include <exception>
#include <new>
#include <string>

struct ad_config {
    anisodiff::app::RunConfig cfg;
};

struct ad_series {
    anisodiff::DecaySeries series;
};

namespace {

thread_local std::string last_error;

ad_status fail(ad_status status, const char* what) {
    last_error = what;
    return status;
}

template <typename F>
ad_status guarded(F&& body) {
    try {
        body();
        return AD_OK;
    } catch (const anisodiff::ConfigError& e) {
        return fail(AD_ERR_CONFIG, e.what());
    } catch (const anisodiff::NumericalError& e) {
        return fail(AD_ERR_NUMERIC, e.what());
    } catch (const anisodiff::IoError& e) {
        return fail(AD_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(AD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(AD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(AD_ERR_INTERNAL, "unknown error");
    }
}

ad_status copy_out(const std::string& text, char* buf, size_t capacity, size_t* needed) {
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf == nullptr) return AD_OK;
    if (capacity == 0) return fail(AD_ERR_ARGUMENT, "buffer capacity is zero");
    const size_t n = std::min(capacity - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
    return AD_OK;
}

}  // namespace

extern "C" {

const char* ad_version(void) { return ANISODIFF_VERSION; }

const char* ad_last_error(void) { return last_error.c_str(); }

ad_status ad_config_new(const char* experiment, ad_config** out) {
    if (out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_config_new: out is NULL");
    *out = nullptr;
    return guarded([&] {
        auto h = std::make_unique<ad_config>();
        if (experiment != nullptr) h->cfg.experiment = anisodiff::app::experiment_from_string(experiment);
        *out = h.release();
    });
}

ad_status ad_config_from_file(const char* path, ad_config** out) {
    if (path == nullptr || out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_config_from_file: NULL argument");
    *out = nullptr;
    return guarded([&] { *out = new ad_config{anisodiff::app::load_config(path)}; });
}

ad_status ad_config_from_json(const char* json_text, ad_config** out) {
    if (json_text == nullptr || out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_config_from_json: NULL argument");
    *out = nullptr;
    return guarded([&] { *out = new ad_config{anisodiff::app::config_from_text(json_text)}; });
}

ad_status ad_config_set(ad_config* cfg, const char* key, const char* value) {
    if (cfg == nullptr || key == nullptr || value == nullptr) return fail(AD_ERR_ARGUMENT, "ad_config_set: NULL argument");
    return guarded([&] { anisodiff::app::apply_override(cfg->cfg, std::string(key) + "=" + value); });
}

ad_status ad_config_validate(const ad_config* cfg) {
    if (cfg == nullptr) return fail(AD_ERR_ARGUMENT, "ad_config_validate: NULL config");
    return guarded([&] { cfg->cfg.validate(); });
}

ad_status ad_config_to_json(const ad_config* cfg, char* buf, size_t capacity, size_t* needed) {
    if (cfg == nullptr) return fail(AD_ERR_ARGUMENT, "ad_config_to_json: NULL config");
    std::string text;
    const ad_status st = guarded([&] { text = anisodiff::app::config_to_json(cfg->cfg).dump(2); });
    if (st != AD_OK) return st;
    return copy_out(text, buf, capacity, needed);
}

void ad_config_free(ad_config* cfg) { delete cfg; }

ad_status ad_run_with_summary(const ad_config* cfg, const char* out_dir, char* buf, size_t capacity, size_t* needed) {
    if (cfg == nullptr) return fail(AD_ERR_ARGUMENT, "ad_run: NULL config");
    std::string summary;
    const ad_status st = guarded([&] {
        std::optional<std::filesystem::path> dir;
        if (out_dir != nullptr) dir = out_dir;
        summary = anisodiff::app::run_experiment(cfg->cfg, dir).summary;
    });
    if (st != AD_OK) return st;
    return copy_out(summary, buf, capacity, needed);
}

ad_status ad_run(const ad_config* cfg, const char* out_dir) { return ad_run_with_summary(cfg, out_dir, nullptr, 0, nullptr); }

ad_status ad_replay(const char* manifest_path, const char* out_dir, int* identical) {
    if (manifest_path == nullptr || out_dir == nullptr || identical == nullptr) {
        return fail(AD_ERR_ARGUMENT, "ad_replay: NULL argument");
    }
    return guarded([&] {
        const auto r = anisodiff::app::replay(manifest_path, out_dir);
        *identical = r.identical ? 1 : 0;
        if (!r.identical) {
            std::string names;
            for (const auto& n : r.mismatched) names += (names.empty() ? "" : ", ") + n;
            last_error = "replay: artifacts differ: " + names;
        }
    });
}

ad_status ad_theoretical_exponent(double p, double q, double* out) {
    if (out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_theoretical_exponent: out is NULL");
    return guarded([&] { *out = anisodiff::theoretical_exponent(p, q); });
}

ad_status ad_theoretical_exponent_rational(int64_t p_num, int64_t p_den, int64_t q_num, int64_t q_den, int64_t* out_num,
                                           int64_t* out_den) {
    if (out_num == nullptr || out_den == nullptr) return fail(AD_ERR_ARGUMENT, "ad_theoretical_exponent_rational: NULL output");
    return guarded([&] {
        const auto r = anisodiff::theoretical_exponent(anisodiff::Rational(p_num, p_den), anisodiff::Rational(q_num, q_den));
        *out_num = r.num();
        *out_den = r.den();
    });
}

ad_status ad_figure_exponent(double p, double q, double* out) {
    if (out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_figure_exponent: out is NULL");
    return guarded([&] { *out = anisodiff::figure_exponent(p, q); });
}

ad_status ad_figure1_curve(double kappa, ad_curve curve, double* out) {
    if (out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_figure1_curve: out is NULL");
    if (curve != AD_CURVE_BLUE && curve != AD_CURVE_RED && curve != AD_CURVE_GREEN) {
        return fail(AD_ERR_ARGUMENT, "ad_figure1_curve: unknown curve");
    }
    return guarded([&] { *out = anisodiff::figure1_curve(kappa, static_cast<anisodiff::Figure1Curve>(curve)); });
}

ad_status ad_figure2_surface(double p, double q, double* out) {
    if (out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_figure2_surface: out is NULL");
    return guarded([&] { *out = anisodiff::figure2_surface(p, q); });
}

ad_status ad_pde_run(const ad_config* cfg, ad_series** out) {
    if (cfg == nullptr || out == nullptr) return fail(AD_ERR_ARGUMENT, "ad_pde_run: NULL argument");
    *out = nullptr;
    return guarded([&] {
        const auto& c = cfg->cfg;
        anisodiff::PdeSolver solver(c.box(), c.velocity(), c.solver.cfg);
        *out = new ad_series{solver.run(c.initial_field()).series};
    });
}

size_t ad_series_size(const ad_series* series) { return series == nullptr ? 0 : series->series.size(); }

ad_status ad_series_get(const ad_series* series, size_t index, double* t, double* norm_sq, double* dissipation) {
    if (series == nullptr) return fail(AD_ERR_ARGUMENT, "ad_series_get: NULL series");
    if (index >= series->series.size()) return fail(AD_ERR_ARGUMENT, "ad_series_get: index out of range");
    if (t) *t = series->series.times[index];
    if (norm_sq) *norm_sq = series->series.norms_sq[index];
    if (dissipation) *dissipation = series->series.dissipation[index];
    return AD_OK;
}

void ad_series_free(ad_series* series) { delete series; }

ad_status ad_fit_decay(const double* t, const double* norm_sq, size_t n, double* rate, double* prefactor, double* r_squared) {
    if (t == nullptr || norm_sq == nullptr) return fail(AD_ERR_ARGUMENT, "ad_fit_decay: NULL input");
    return guarded([&] {
        anisodiff::DecaySeries s;
        s.times.assign(t, t + n);
        s.norms_sq.assign(norm_sq, norm_sq + n);
        s.dissipation.assign(n, 0.0);
        const auto fit = anisodiff::fit_decay(s);
        if (rate) *rate = fit.rate;
        if (prefactor) *prefactor = fit.prefactor;
        if (r_squared) *r_squared = fit.r_squared;
    });
}

}  // extern "C"
