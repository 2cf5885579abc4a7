#include <doctest.h>

#include <cmath>
#include <random>

#include "choq/solver.hpp"

using namespace choq;

namespace {
struct Setup {
    GridPtr grid;
    RieszOperator op;
    NonlinearitySpec spec;
    Setup() : grid(make_grid(3, 60.0, 900, Stretching{2.0})), op(build_operator(grid, 2.0)) {
        spec.terms.push_back({1.0, 2.0});
    }
};
Setup& setup() {
    static Setup s;
    return s;
}
} // namespace

TEST_CASE("ground state at eps = 1 satisfies the identities") {
    auto& s = setup();
    ProblemParams p{3, 2.0, 1.0};
    SolveConfig cfg;
    GroundState gs = solve_ground_state(s.op, p, s.spec, cfg, Frame::Original);
    REQUIRE(gs.status == SolveStatus::Converged);
    CHECK(gs.residuals.euler_lagrange <= 1e-8);
    CHECK(std::abs(gs.residuals.nehari) <= 1e-10);
    CHECK((gs.u.values >= 0.0).all());
    for (int i = 0; i + 1 < s.grid->n; ++i)
        CHECK(gs.u.values[i + 1] <= gs.u.values[i] + 1e-12);
    CHECK(gs.energy > 0.0);
    CHECK(gs.energy < m0_tilde(3, 2.0));
    // the solver's breakdown matches the functionals module
    const auto eb = action(gs.u, p, s.spec, Frame::Original, s.op);
    CHECK(eb.total == doctest::Approx(gs.energy).epsilon(1e-12));
}

TEST_CASE("init independence") {
    auto& s = setup();
    ProblemParams p{3, 2.0, 1.0};
    SolveConfig cfg;
    cfg.init = InitKind::ScaledExtremal;
    GroundState a = solve_ground_state(s.op, p, s.spec, cfg, Frame::Original);
    cfg.init = InitKind::Gaussian;
    GroundState b = solve_ground_state(s.op, p, s.spec, cfg, Frame::Original);
    REQUIRE(a.status == SolveStatus::Converged);
    REQUIRE(b.status == SolveStatus::Converged);
    const Eigen::ArrayXd diff = a.u.values - b.u.values;
    const double h1d = std::sqrt(s.grid->kinetic_form(diff) +
                                 (s.grid->weights * diff.square()).sum());
    const double h1 = std::sqrt(a.norms.grad_sq + a.norms.l2_sq);
    CHECK(h1d / h1 <= 1e-5);
}

TEST_CASE("pure lower-critical problem escapes to the non-compact family") {
    auto& s = setup();
    // a machine-zero perturbation realizes G = 0; the infimum is then not attained
    NonlinearitySpec tiny;
    tiny.terms.push_back({1e-30, 2.0});
    ProblemParams p{3, 2.0, 1.0};
    SolveConfig cfg;
    cfg.max_iter = 3000;
    cfg.vanish_energy_margin = 0.05; // spread-state truncation bias on this small domain
    GroundState gs = solve_ground_state(s.op, p, tiny, cfg, Frame::VFrame);
    CHECK(gs.status == SolveStatus::VanishingDetected);
}

TEST_CASE("warm start converges quickly") {
    auto& s = setup();
    ProblemParams p{3, 2.0, 0.8};
    SolveConfig cfg;
    GroundState first = solve_ground_state(s.op, p, s.spec, cfg, Frame::Original);
    REQUIRE(first.status == SolveStatus::Converged);
    cfg.init = InitKind::WarmStart;
    cfg.warm_start = first.u;
    GroundState again = solve_ground_state(s.op, p, s.spec, cfg, Frame::Original);
    CHECK(again.status == SolveStatus::Converged);
    CHECK(again.iterations <= 4);
}

TEST_CASE("energy is nonincreasing in the frequency") {
    auto& s = setup();
    SolveConfig cfg;
    double prev = 1e300;
    for (double eps : {1.0, 0.6, 0.35, 0.2}) {
        ProblemParams p{3, 2.0, eps};
        GroundState gs = solve_ground_state(s.op, p, s.spec, cfg, Frame::VFrame);
        REQUIRE(gs.status == SolveStatus::Converged);
        CHECK(gs.energy <= prev + 1e-6);
        CHECK(gs.energy <= m0_tilde(3, 2.0) + 1e-6);
        prev = gs.energy;
        cfg.init = InitKind::WarmStart;
        cfg.warm_start = gs.u;
    }
}

TEST_CASE("large-frequency limit problem") {
    auto& s = setup();
    ProblemParams p{3, 2.0, 1.0};
    SolveConfig cfg;
    auto res = solve_large_eps_limit(s.op, p, s.spec, cfg);
    REQUIRE(res.state.status == SolveStatus::Converged);
    CHECK(res.state.energy > 0.0); // mountain-pass level is positive
    CHECK(res.s_r > 0.0);
    // internal consistency: the limit action equals (r-1)/(2r^2) b^2 ((r/b^2) S_r)^{r/(r-1)}
    const double pred = 1.0 / 8.0 * std::pow(2.0 * res.s_r, 2.0);
    CHECK(res.state.energy == doctest::Approx(pred).epsilon(1e-8));

    // quotient stationarity under small perturbations
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& w = res.state.u.values;
    const Eigen::ArrayXd wr = w.square();
    const double den = (s.grid->weights * apply(s.op, wr) * wr).sum();
    const double q0 = (res.state.norms.grad_sq + res.state.norms.l2_sq) / std::sqrt(den);
    for (int t = 0; t < 5; ++t) {
        Eigen::ArrayXd pert(s.grid->n);
        for (int i = 0; i < s.grid->n; ++i)
            pert[i] = gauss(rng) * std::exp(-s.grid->nodes[i] / 3.0);
        pert *= 1e-4 * res.state.norms.linf / pert.abs().maxCoeff();
        Eigen::ArrayXd v = (w + pert).max(0.0);
        const Eigen::ArrayXd vr = v.square();
        const double qv = (s.grid->kinetic_form(v) + (s.grid->weights * v.square()).sum()) /
                          std::sqrt((s.grid->weights * apply(s.op, vr) * vr).sum());
        CHECK(qv >= q0 * (1.0 - 1e-4));
    }

    // doubling b rescales the solution by the homogeneity factor 1/2 (r = 2)
    NonlinearitySpec spec2b;
    spec2b.terms.push_back({2.0, 2.0});
    auto res2 = solve_large_eps_limit(s.op, p, spec2b, cfg);
    REQUIRE(res2.state.status == SolveStatus::Converged);
    CHECK((res2.state.u.values - 0.5 * w).abs().maxCoeff() <= 1e-6 * w.maxCoeff());
}

TEST_CASE("solver rejects a warm start from a foreign grid") {
    auto& s = setup();
    auto other = make_grid(3, 60.0, 300, Stretching{2.0});
    SolveConfig cfg;
    cfg.init = InitKind::WarmStart;
    cfg.warm_start = Field(other, Eigen::ArrayXd::Ones(other->n));
    ProblemParams p{3, 2.0, 1.0};
    CHECK_THROWS_AS(solve_ground_state(s.op, p, s.spec, cfg, Frame::Original),
                    std::invalid_argument);
}
