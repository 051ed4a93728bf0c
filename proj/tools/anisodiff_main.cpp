// anisodiff command line. Talks to the library only through anisodiff.h.

#include <anisodiff/anisodiff.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct ConfigHandle {
    ad_config* ptr = nullptr;
    ~ConfigHandle() { ad_config_free(ptr); }
};

int report(ad_status st) {
    std::fprintf(stderr, "anisodiff: %s\n", ad_last_error());
    return st == AD_ERR_ARGUMENT || st == AD_ERR_INTERNAL ? 1 : static_cast<int>(st);
}

struct RunOptions {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    bool print_config = false;
};

int run_command(const std::string& experiment, const RunOptions& opt) {
    ConfigHandle cfg;
    ad_status st = opt.config.empty() ? ad_config_new(experiment.c_str(), &cfg.ptr)
                                      : ad_config_from_file(opt.config.c_str(), &cfg.ptr);
    if (st != AD_OK) return report(st);
    // the subcommand wins over whatever the file says
    if ((st = ad_config_set(cfg.ptr, "experiment", experiment.c_str())) != AD_OK) return report(st);
    for (const auto& kv : opt.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::fprintf(stderr, "anisodiff: --set expects key=value, got '%s'\n", kv.c_str());
            return AD_ERR_CONFIG;
        }
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if ((st = ad_config_set(cfg.ptr, key.c_str(), value.c_str())) != AD_OK) return report(st);
    }
    if ((st = ad_config_validate(cfg.ptr)) != AD_OK) return report(st);

    if (opt.print_config) {
        size_t needed = 0;
        ad_config_to_json(cfg.ptr, nullptr, 0, &needed);
        std::string buf(needed, '\0');
        ad_config_to_json(cfg.ptr, buf.data(), buf.size(), &needed);
        std::printf("%s\n", buf.c_str());
        return 0;
    }

    size_t needed = 0;
    std::string summary(4096, '\0');
    st = ad_run_with_summary(cfg.ptr, opt.out.empty() ? nullptr : opt.out.c_str(), summary.data(), summary.size(),
                             &needed);
    if (st != AD_OK) return report(st);
    std::fputs(summary.c_str(), stdout);
    return 0;
}

int exponent_table(const std::vector<int>& p_list, const std::vector<int>& q_list) {
    std::printf("p,q,theoretical,theoretical_value,figure_alternative\n");
    for (size_t i = 0; i < p_list.size(); ++i) {
        int64_t num = 0, den = 1;
        double fig = 0;
        ad_status st = ad_theoretical_exponent_rational(p_list[i], 1, q_list[i], 1, &num, &den);
        if (st == AD_OK) st = ad_figure_exponent(p_list[i], q_list[i], &fig);
        if (st != AD_OK) return report(st);
        std::printf("%d,%d,%lld/%lld,%.17g,%.17g\n", p_list[i], q_list[i], static_cast<long long>(num),
                    static_cast<long long>(den), static_cast<double>(num) / static_cast<double>(den), fig);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisodiff: enhanced dissipation experiments for anisotropic stream-function flows"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ad_version()));

    const char* experiments[][2] = {
        {"pde", "advection-diffusion run: decay.csv, field snapshots, fitted rate"},
        {"sde", "Brownian / drifted particle ensemble statistics"},
        {"fdr", "Lagrangian fluctuation-dissipation check: fdr.csv"},
        {"sweep", "decay rate over a kappa list and log-log exponent fit"},
        {"figures", "closed-form figure curves: fig1.csv, fig2.csv and SVGs"},
    };
    std::vector<RunOptions> opts(std::size(experiments));
    std::vector<CLI::App*> subs;
    for (size_t i = 0; i < std::size(experiments); ++i) {
        auto* sub = app.add_subcommand(experiments[i][0], experiments[i][1]);
        sub->add_option("-c,--config", opts[i].config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", opts[i].sets, "override a config value, e.g. solver.kappa=0.02 (repeatable)");
        sub->add_option("-o,--out", opts[i].out, "output directory");
        sub->add_flag("--print-config", opts[i].print_config, "print the resolved config and exit");
        subs.push_back(sub);
    }

    std::string manifest, replay_out;
    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare CSV checksums");
    replay->add_option("manifest", manifest, "manifest.json of a previous run")->required()->check(CLI::ExistingFile);
    replay->add_option("-o,--out", replay_out, "directory for the re-run")->required();

    std::vector<int> p_list{2, 3, 4, 1}, q_list{3, 4, 5, 1};
    auto* exponent = app.add_subcommand("exponent", "print pq/(p+q+2) and p/(p+q) for integer (p, q) pairs");
    exponent->add_option("-p", p_list, "p values");
    exponent->add_option("-q", q_list, "q values, paired with -p");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : AD_ERR_CONFIG;
    }

    for (size_t i = 0; i < subs.size(); ++i) {
        if (subs[i]->parsed()) return run_command(experiments[i][0], opts[i]);
    }
    if (replay->parsed()) {
        int identical = 0;
        const ad_status st = ad_replay(manifest.c_str(), replay_out.c_str(), &identical);
        if (st != AD_OK) return report(st);
        if (!identical) {
            std::fprintf(stderr, "anisodiff: %s\n", ad_last_error());
            return 1;
        }
        std::printf("replay identical: %s\n", replay_out.c_str());
        return 0;
    }
    if (exponent->parsed()) {
        if (p_list.size() != q_list.size()) {
            std::fprintf(stderr, "anisodiff: -p and -q need the same number of values\n");
            return AD_ERR_CONFIG;
        }
        return exponent_table(p_list, q_list);
    }
    return 1;
}
