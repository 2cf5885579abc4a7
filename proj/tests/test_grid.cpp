#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "choq/grid.hpp"
#include "test_helpers.hpp"

using namespace choq;
using choq::testing::adaptive_simpson;

TEST_CASE("quadrature weights reproduce the ball volume to 1e-12") {
    auto g = make_grid(3, 10.0, 1000, Stretching{1.0});
    const double vol = 4.0 / 3.0 * M_PI * 1000.0;
    CHECK(g->weights.sum() == doctest::Approx(vol).epsilon(1e-12));
    auto g2 = make_grid(3, 200.0, 317, Stretching{2.0});
    CHECK(g2->weights.sum() ==
          doctest::Approx(4.0 / 3.0 * M_PI * std::pow(200.0, 3)).epsilon(1e-12));
    CHECK((g2->weights > 0.0).all());
    for (int i = 0; i + 1 < g2->n; ++i) CHECK(g2->nodes[i] < g2->nodes[i + 1]);
}

TEST_CASE("graded grid integrates the Gaussian to 1e-10") {
    auto g = make_grid(3, 50.0, 2000, Stretching{2.0});
    const double got = (g->weights * (-g->nodes.square()).exp()).sum();
    CHECK(got == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-10));
}

TEST_CASE("grid preconditions") {
    CHECK_THROWS_AS(make_grid(3, 10.0, 8, Stretching{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, -1.0, 100, Stretching{1.0}), std::invalid_argument);
}

TEST_CASE("norms: zero field and extremal shape against the quadrature oracle") {
    auto g = make_grid(3, 200.0, 2500, Stretching{2.0});
    Field zero(g, Eigen::ArrayXd::Zero(g->n));
    const auto nz = norms(zero, 1.0);
    CHECK(nz.l2_sq == 0.0);
    CHECK(nz.grad_sq == 0.0);
    CHECK(nz.linf == 0.0);

    // W1 shape (1+r^2)^{-3/2}; oracle integrates over the truncated domain
    Field w(g, (1.0 + g->nodes.square()).pow(-1.5));
    const auto nw = norms(w, 0.7);
    const double l2_ref = adaptive_simpson(
        [](double r) { return 4.0 * M_PI * r * r * std::pow(1.0 + r * r, -3.0); }, 0.0, 200.0);
    const double gr_ref = adaptive_simpson(
        [](double r) {
            const double du = -3.0 * r * std::pow(1.0 + r * r, -2.5);
            return 4.0 * M_PI * r * r * du * du;
        },
        0.0, 200.0);
    CHECK(nw.l2_sq == doctest::Approx(l2_ref).epsilon(1e-8));
    CHECK(nw.grad_sq == doctest::Approx(gr_ref).epsilon(1e-8));
    CHECK(nw.h1eps_sq == doctest::Approx(gr_ref + 0.7 * l2_ref).epsilon(1e-8));
    CHECK(nw.linf == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(lp_norm(w, 3.0) ==
          doctest::Approx(std::pow(
              adaptive_simpson(
                  [](double r) { return 4.0 * M_PI * r * r * std::pow(1.0 + r * r, -4.5); }, 0.0,
                  200.0),
              1.0 / 3.0))
              .epsilon(1e-8));
}

TEST_CASE("norm dilation identities under analytic resampling") {
    auto g = make_grid(3, 60.0, 1500, Stretching{2.0});
    auto f = [](double r) { return std::exp(-r * r / 2.0); };
    const double t = 1.5;
    Eigen::ArrayXd u(g->n), ut(g->n);
    for (int i = 0; i < g->n; ++i) {
        u[i] = f(g->nodes[i]);
        ut[i] = f(g->nodes[i] / t);
    }
    const auto nu = norms(Field(g, u), 1.0);
    const auto nt = norms(Field(g, ut), 1.0);
    CHECK(nt.l2_sq == doctest::Approx(std::pow(t, 3) * nu.l2_sq).epsilon(1e-8));
    CHECK(nt.grad_sq == doctest::Approx(t * nu.grad_sq).epsilon(1e-8));
}

TEST_CASE("radial Laplacian stencil") {
    auto g = make_grid(3, 20.0, 800, Stretching{2.0});
    // r^2 -> 2N on interior nodes (boundary rows see the Dirichlet ghosts)
    Field q(g, g->nodes.square());
    const auto lq = laplacian_apply(q);
    for (int i = 0; i + 4 < g->n; ++i) CHECK(lq.values[i] == doctest::Approx(6.0).epsilon(1e-7));
    // Gaussian: Laplacian (r^2-3) e^{-r^2/2}
    Field e(g, (-g->nodes.square() / 2.0).exp());
    const auto le = laplacian_apply(e);
    double worst = 0.0;
    for (int i = 0; i + 4 < g->n; ++i)
        worst = std::max(worst,
                         std::abs(le.values[i] -
                                  (g->nodes[i] * g->nodes[i] - 3.0) * e.values[i]));
    CHECK(worst < 1e-5);
    // linearity to machine precision
    Field a(g, (-g->nodes.square()).exp()), b(g, (1.0 + g->nodes.square()).pow(-2.0));
    Field combo(g, 2.0 * a.values + 3.0 * b.values);
    const auto lc = laplacian_apply(combo);
    const auto la = laplacian_apply(a);
    const auto lb = laplacian_apply(b);
    CHECK(((lc.values - 2.0 * la.values - 3.0 * lb.values).abs().maxCoeff()) < 1e-10);
}

TEST_CASE("helmholtz solve is a consistent inverse") {
    auto g = make_grid(3, 30.0, 900, Stretching{2.0});
    Field zero(g, Eigen::ArrayXd::Zero(g->n));
    CHECK(helmholtz_solve(zero, 1.0).values.abs().maxCoeff() == 0.0);

    Field u(g, (-g->nodes.square()).exp());
    Field f(g, -laplacian_apply(u).values + 0.3 * u.values);
    Field back = helmholtz_solve(f, 0.3);
    CHECK((back.values - u.values).abs().maxCoeff() <= 1e-10 * u.values.abs().maxCoeff());

    // residual contract
    Field rhs(g, (1.0 + g->nodes.square()).pow(-3.0));
    Field sol = helmholtz_solve(rhs, 2.0);
    Field resid(g, -laplacian_apply(sol).values + 2.0 * sol.values - rhs.values);
    CHECK(resid.values.matrix().norm() <= 1e-10 * rhs.values.matrix().norm());
    CHECK_THROWS_AS(helmholtz_solve(rhs, 0.0), std::invalid_argument);
}

TEST_CASE("helmholtz refinement against a finer grid") {
    // Richardson-style self-oracle: the n and 2n solutions agree closely
    auto g1 = make_grid(3, 30.0, 700, Stretching{2.0});
    auto g2 = make_grid(3, 30.0, 1400, Stretching{2.0});
    auto gauss = [](double r) { return std::exp(-r * r); };
    Eigen::ArrayXd f1(g1->n), f2(g2->n);
    for (int i = 0; i < g1->n; ++i) f1[i] = gauss(g1->nodes[i]);
    for (int i = 0; i < g2->n; ++i) f2[i] = gauss(g2->nodes[i]);
    Field s1 = helmholtz_solve(Field(g1, f1), 1.0);
    Field s2 = helmholtz_solve(Field(g2, f2), 1.0);
    // compare at shared radii (every second fine node aligns with the coarse ones)
    double worst = 0.0;
    for (int i = 0; i < g1->n; ++i)
        worst = std::max(worst, std::abs(s1.values[i] - s2.values[2 * i + 1]));
    CHECK(worst < 1e-6);
}

TEST_CASE("extremal sampling") {
    auto g = make_grid(3, 200.0, 2000, Stretching{2.0});
    Field w1 = sample_w(g, 1.0, 1.0);
    CHECK(linf_extrapolated(w1) == doctest::Approx(1.0).epsilon(1e-8));
    // L2 mass is rho-invariant up to the polynomial tail beyond r_max
    const double m1 = (g->weights * sample_w(g, 1.0, 1.0).values.square()).sum();
    const double m2 = (g->weights * sample_w(g, 2.0, 1.0).values.square()).sum();
    const double mh = (g->weights * sample_w(g, 0.5, 1.0).values.square()).sum();
    CHECK(m2 == doctest::Approx(m1).epsilon(5e-6));
    CHECK(mh == doctest::Approx(m1).epsilon(5e-6));
    // gradient scales like rho^{-2}
    const double g1 = g->kinetic_form(sample_w(g, 1.0, 1.0).values);
    const double g2 = g->kinetic_form(sample_w(g, 2.0, 1.0).values);
    CHECK(g2 == doctest::Approx(0.25 * g1).epsilon(1e-8));
    CHECK_THROWS_AS(sample_w(g, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("field serialization round trip is bit exact") {
    auto g = make_grid(3, 50.0, 64, Stretching{2.0});
    Eigen::ArrayXd v(g->n);
    for (int i = 0; i < g->n; ++i) v[i] = std::sin(1.0 + i) * std::pow(1.0 + i, -0.7);
    Field u(g, v);
    const std::string path = std::filesystem::temp_directory_path() / "choq_field_test.txt";
    save_field(u, path);
    Field back = load_field(path);
    REQUIRE(back.grid->n == g->n);
    CHECK(back.grid->r_max == g->r_max);
    for (int i = 0; i < g->n; ++i) {
        CHECK(back.grid->nodes[i] == g->nodes[i]);
        CHECK(back.values[i] == v[i]);
    }
    std::remove(path.c_str());
}
