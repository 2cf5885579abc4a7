#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "choq/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    bool no_cache = false;
    int grid_n = 0;
    double eps = 0.0;
    std::vector<std::string> terms;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment config file (JSON)");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--jobs", f.jobs, "worker threads for the kernel build");
    cmd->add_flag("--no-cache", f.no_cache, "disable the solve/kernel cache");
    cmd->add_option("--grid-n", f.grid_n, "override grid size n");
    cmd->add_option("--eps", f.eps, "override the frequency eps");
    cmd->add_option("--term", f.terms, "perturbation term coeff:exponent (repeatable)");
}

int run_kind(const std::string& kind, const CommonFlags& f) {
    choq::ExperimentConfig cfg;
    try {
        if (!f.config_path.empty()) cfg = choq::load_config(f.config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    cfg.kind = kind;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.jobs > 0) cfg.jobs = f.jobs;
    if (f.no_cache) cfg.use_cache = false;
    if (f.grid_n > 0) cfg.n = f.grid_n;
    if (f.eps > 0.0) cfg.eps = f.eps;
    for (const auto& t : f.terms) {
        const auto pos = t.find(':');
        if (pos == std::string::npos) {
            std::cerr << "--term expects coeff:exponent, got '" << t << "'\n";
            return 2;
        }
        try {
            cfg.spec.terms.push_back({std::stod(t.substr(0, pos)), std::stod(t.substr(pos + 1))});
        } catch (const std::exception&) {
            std::cerr << "--term expects numeric coeff:exponent, got '" << t << "'\n";
            return 2;
        }
    }
    if (const char* env = std::getenv("CHOQ_CACHE_DIR")) cfg.cache_dir = std::string(env);
    return choq::run_experiment(cfg, std::cout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"choq: radial ground states of the lower-critical Choquard equation"};
    app.require_subcommand(1);

    const char* kinds[] = {"constants",     "solve",     "sweep",      "threshold",
                           "limit-profile", "large-eps", "mass-curve", "verify"};
    const char* descr[] = {
        "print the analytic constants and predicted exponents",
        "compute one ground state",
        "frequency sweep with exponent fits",
        "bisect the existence threshold",
        "small-frequency sweep with limit-profile diagnostics",
        "large-frequency sweep against the limit problem",
        "assemble the mass curve over both frequency ends",
        "run the acceptance suite"};
    std::vector<CommonFlags> flags(std::size(kinds));
    for (size_t i = 0; i < std::size(kinds); ++i) {
        auto* cmd = app.add_subcommand(kinds[i], descr[i]);
        add_common(cmd, flags[i]);
    }

    CLI11_PARSE(app, argc, argv);
    for (size_t i = 0; i < std::size(kinds); ++i)
        if (app.got_subcommand(kinds[i])) return run_kind(kinds[i], flags[i]);
    return 2;
}
