#include <doctest.h>

#include <anisodiff/anisodiff.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("anisodiff-capi-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("version and error strings") {
    CHECK(std::strlen(ad_version()) > 0);
    ad_config* cfg = nullptr;
    CHECK(ad_config_new("teleport", &cfg) == AD_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::string(ad_last_error()).find("experiment") != std::string::npos);
    CHECK(ad_config_new("pde", nullptr) == AD_ERR_ARGUMENT);
}

TEST_CASE("config lifecycle") {
    ad_config* cfg = nullptr;
    REQUIRE(ad_config_new("pde", &cfg) == AD_OK);
    CHECK(ad_config_set(cfg, "solver.kappa", "0.03") == AD_OK);
    CHECK(ad_config_set(cfg, "solver.bogus", "1") == AD_ERR_CONFIG);
    CHECK(std::string(ad_last_error()).find("solver.bogus") != std::string::npos);
    CHECK(ad_config_validate(cfg) == AD_OK);
    CHECK(ad_config_set(cfg, "domain.nx", "9") == AD_OK);
    CHECK(ad_config_validate(cfg) == AD_ERR_CONFIG);

    size_t needed = 0;
    CHECK(ad_config_to_json(cfg, nullptr, 0, &needed) == AD_OK);
    std::string buf(needed, '\0');
    CHECK(ad_config_to_json(cfg, buf.data(), buf.size(), &needed) == AD_OK);
    CHECK(buf.find("\"kappa\": 0.03") != std::string::npos);
    char tiny[8];
    CHECK(ad_config_to_json(cfg, tiny, sizeof tiny, &needed) == AD_OK);
    CHECK(std::strlen(tiny) == 7);

    ad_config* copy = nullptr;
    CHECK(ad_config_from_json(buf.c_str(), &copy) == AD_OK);
    ad_config_free(copy);
    CHECK(ad_config_from_json("{oops", &copy) == AD_ERR_CONFIG);
    CHECK(ad_config_from_file("/nonexistent.json", &copy) == AD_ERR_CONFIG);
    ad_config_free(cfg);
    ad_config_free(nullptr);
}

TEST_CASE("closed-form rates") {
    int64_t num = 0, den = 0;
    const int64_t table[][4] = {{2, 3, 6, 7}, {3, 4, 4, 3}, {4, 5, 20, 11}, {1, 1, 1, 4}};
    for (const auto& row : table) {
        CHECK(ad_theoretical_exponent_rational(row[0], 1, row[1], 1, &num, &den) == AD_OK);
        CHECK(num == row[2]);
        CHECK(den == row[3]);
    }
    double v = 0;
    CHECK(ad_theoretical_exponent(2, 3, &v) == AD_OK);
    CHECK(v == doctest::Approx(6.0 / 7));
    CHECK(ad_figure_exponent(2, 3, &v) == AD_OK);
    CHECK(v == doctest::Approx(0.4));
    CHECK(ad_figure1_curve(0.5, AD_CURVE_BLUE, &v) == AD_OK);
    CHECK(v == doctest::Approx(1.515717).epsilon(1e-6));
    CHECK(ad_figure1_curve(2.0, AD_CURVE_BLUE, &v) == AD_ERR_CONFIG);
    CHECK(ad_figure1_curve(0.5, static_cast<ad_curve>(7), &v) == AD_ERR_ARGUMENT);
    CHECK(ad_figure2_surface(1, 1, &v) == AD_OK);
    CHECK(v == doctest::Approx(0.843512).epsilon(1e-6));
    CHECK(ad_theoretical_exponent(-1, 3, &v) == AD_ERR_CONFIG);
}

TEST_CASE("pde series and decay fit") {
    ad_config* cfg = nullptr;
    REQUIRE(ad_config_new("pde", &cfg) == AD_OK);
    ad_config_set(cfg, "domain.nx", "32");
    ad_config_set(cfg, "domain.ny", "32");
    ad_config_set(cfg, "domain.velocity", "none");
    ad_config_set(cfg, "solver.t_end", "2");
    ad_series* s = nullptr;
    REQUIRE(ad_pde_run(cfg, &s) == AD_OK);
    const size_t n = ad_series_size(s);
    CHECK(n == 201);
    std::vector<double> t(n), y(n);
    for (size_t k = 0; k < n; ++k) CHECK(ad_series_get(s, k, &t[k], &y[k], nullptr) == AD_OK);
    CHECK(ad_series_get(s, n, &t[0], nullptr, nullptr) == AD_ERR_ARGUMENT);
    double rate = 0, pre = 0, r2 = 0;
    CHECK(ad_fit_decay(t.data(), y.data(), n, &rate, &pre, &r2) == AD_OK);
    CHECK(rate == doctest::Approx(4 * M_PI * M_PI * 0.01).epsilon(0.02));
    CHECK(ad_fit_decay(t.data(), y.data(), 5, &rate, &pre, &r2) == AD_ERR_NUMERIC);
    ad_series_free(s);
    ad_config_free(cfg);
}

TEST_CASE("run and replay through the C interface") {
    TempDir tmp;
    ad_config* cfg = nullptr;
    REQUIRE(ad_config_new("figures", &cfg) == AD_OK);
    const auto out = (tmp.path / "figs").string();
    char summary[256];
    size_t needed = 0;
    CHECK(ad_run_with_summary(cfg, out.c_str(), summary, sizeof summary, &needed) == AD_OK);
    CHECK(std::string(summary).find("fig1.csv") != std::string::npos);
    CHECK(fs::exists(tmp.path / "figs" / "manifest.json"));
    int identical = 0;
    CHECK(ad_replay((tmp.path / "figs" / "manifest.json").c_str(), (tmp.path / "again").c_str(), &identical) == AD_OK);
    CHECK(identical == 1);
    CHECK(ad_replay((tmp.path / "nothing.json").c_str(), (tmp.path / "x").c_str(), &identical) == AD_ERR_IO);

    // output below a regular file cannot be created
    const auto blocked = (tmp.path / "figs" / "fig1.csv" / "sub").string();
    CHECK(ad_run(cfg, blocked.c_str()) == AD_ERR_IO);
    ad_config_free(cfg);
}
