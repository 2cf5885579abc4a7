#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "choq/asymptotics.hpp"

namespace choq {

// one config file = one experiment
struct ExperimentConfig {
    // problem block
    int N = 3;
    double alpha = 2.0;
    // nonlinearity block
    NonlinearitySpec spec;
    // grid block
    int n = 2000;
    double r_max = 200.0;
    double gamma = 2.0;
    // solver block
    double tol_el = 1e-8;
    double tol_manifold = 1e-10;
    int max_iter = 5000;
    // experiment block
    std::string kind; // constants | solve | sweep | threshold | limit-profile | large-eps | mass-curve | verify
    double eps = 1.0;
    double eps_min = 1e-3;
    double eps_max = 1e-1;
    int eps_count = 20;
    std::string frame = "auto"; // auto | original | v | w | large
    double bracket_lo = 1e-3;
    double bracket_hi = 1e3;
    double bracket_rel_tol = 0.1;
    // output block
    std::string out_dir = "out";
    bool use_cache = true;
    int jobs = 0;
    std::optional<std::string> cache_dir; // defaults to <out_dir>/cache

    void validate() const;
};

ExperimentConfig load_config(const std::string& path);

// stable content hash over all numerically relevant inputs
std::string cache_key(const ProblemParams& params, const NonlinearitySpec& spec,
                      const RadialGrid& grid, const SolveConfig& config, Frame frame);

// persisted ground states: manifest (structured key-value text) plus the field file.
// A hit is re-verified (Pohozaev residual recomputed) before reuse.
std::optional<GroundState> cache_load(const std::string& dir, const std::string& key,
                                      const RieszOperator& op, const ProblemParams& params,
                                      const NonlinearitySpec& spec, Frame frame);
void cache_store(const std::string& dir, const std::string& key, const GroundState& gs,
                 const ProblemParams& params);

// exit codes: 0 success, 2 validation error, 3 solver failure, 4 acceptance failure
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// acceptance suite; returns the number of failed criteria and prints one line per criterion
int run_verification(std::ostream& log, const std::string& out_dir);

} // namespace choq
