#pragma once

#include <optional>

#include "choq/functionals.hpp"
#include "choq/grid.hpp"
#include "choq/model.hpp"
#include "choq/riesz.hpp"

namespace choq {

enum class InitKind { ScaledExtremal, Gaussian, WarmStart };

struct SolveConfig {
    // grid (used when the caller does not supply a prebuilt operator)
    int grid_n = 2000;
    double r_max = 200.0;
    Stretching stretching{2.0};

    double tol_el = 1e-8;
    double tol_manifold = 1e-10;
    int max_iter = 5000;
    double step = 1.0; // initial descent step, Armijo-backtracked

    InitKind init = InitKind::ScaledExtremal;
    std::optional<Field> warm_start;

    double vanish_threshold = 1e-8;
    // energy pinned at the non-attained bound within this relative margin, while the
    // profile spreads (mass beyond r_max/2 or half-mass radius past r_max/20)
    double vanish_energy_margin = 1e-3;
    double vanish_tail_fraction = 0.2;

    // residual level at which descent hands over to the accelerated fixed-point polish
    double descent_switch = 1e-3;
};

enum class SolveStatus { Converged, MaxIter, VanishingDetected };

struct GroundStateNorms {
    double l2_sq = 0.0;
    double grad_sq = 0.0;
    double linf = 0.0;
    double d_value = 0.0;
    std::vector<double> cross; // int (I * |u|^p) |u|^{q_i} per spec term
};

struct GroundState {
    Field u;
    double eps = 0.0;
    Frame frame = Frame::Original;
    double energy = 0.0;
    GroundStateNorms norms;
    Residuals residuals;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIter;
    double half_mass_radius = 0.0;
};

// Nehari-constrained Sobolev-preconditioned descent with an accelerated
// fixed-point polish. The operator is shared, read-only.
GroundState solve_ground_state(const RieszOperator& op, const ProblemParams& params,
                               const NonlinearitySpec& spec, const SolveConfig& config,
                               Frame frame);

// convenience overload that builds the grid and operator from the config
GroundState solve_ground_state(const ProblemParams& params, const NonlinearitySpec& spec,
                               const SolveConfig& config, Frame frame);

struct LargeEpsLimitResult {
    GroundState state;
    double s_r = 0.0; // quotient (||grad w||^2 + ||w||^2) / (int (I*|w|^r)|w|^r)^{1/r}
};

// ground state of the large-frequency limit equation
// -Laplace(w) + w = (b^2/r)(I_alpha * |w|^r)|w|^{r-2} w
LargeEpsLimitResult solve_large_eps_limit(const RieszOperator& op, const ProblemParams& params,
                                          const NonlinearitySpec& spec, const SolveConfig& config);

} // namespace choq
