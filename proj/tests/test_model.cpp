#include <doctest.h>

#include <cmath>

#include "choq/model.hpp"

using namespace choq;

// reference digits computed with 40-digit arithmetic from the closed forms
namespace {
constexpr double kA32 = 0.079577471545947668;   // 1/(4 pi)
constexpr double kA53 = 0.0080628836082998723;  // 1/(4 pi^3)
constexpr double kC32 = 2.294010703541599;
constexpr double kC31 = 7.3038721193751092;
constexpr double kS32 = 2.7743973083570634;
constexpr double kM032 = 1.1917317430008129;
} // namespace

TEST_CASE("riesz normalization constant") {
    CHECK(riesz_normalization(3, 2.0) == doctest::Approx(kA32).epsilon(1e-14));
    CHECK(riesz_normalization(5, 3.0) == doctest::Approx(kA53).epsilon(1e-14));
    for (double a : {0.3, 1.0, 1.7, 2.9}) CHECK(riesz_normalization(3, a) > 0.0);
    CHECK_THROWS_AS(riesz_normalization(3, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(riesz_normalization(3, -0.5), std::invalid_argument);
}

TEST_CASE("sharp HLS constant") {
    CHECK(hls_sharp_constant(3, 2.0) == doctest::Approx(kC32).epsilon(1e-14));
    CHECK(hls_sharp_constant(3, 1.0) == doctest::Approx(kC31).epsilon(1e-14));
    for (double a : {0.5, 1.5, 2.5}) CHECK(hls_sharp_constant(3, a) > 0.0);
}

TEST_CASE("lower-critical sharp quotient and limit energy") {
    CHECK(s_alpha(3, 2.0) == doctest::Approx(kS32).epsilon(1e-14));
    CHECK(m0_tilde(3, 2.0) == doctest::Approx(kM032).epsilon(1e-14));
    // determinism: repeated calls bit-identical
    CHECK(s_alpha(3, 2.0) == s_alpha(3, 2.0));
    CHECK(m0_tilde(4, 1.3) == m0_tilde(4, 1.3));
    // the printed formula is an increasing power of S_alpha
    const double s = s_alpha(3, 2.0);
    auto m0_of = [](double S) { return 2.0 / 6.0 * std::pow(3.0 / 5.0 * S, 5.0 / 2.0); };
    CHECK(m0_of(s) == doctest::Approx(m0_tilde(3, 2.0)).epsilon(1e-14));
    CHECK(m0_of(1.1 * s) > m0_of(s));
}

TEST_CASE("sigma rate exponent") {
    CHECK(sigma(3, 2.0, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(sigma(3, 2.0, 5.0 / 3.0 + 1e-9) < 1e-7);   // numerator vanishes at the lower edge
    CHECK(sigma(3, 2.0, 3.0 - 1e-9) > 1e7);          // denominator vanishes at the upper edge
    CHECK_THROWS_AS(sigma(3, 2.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(sigma(3, 2.0, 5.0 / 3.0), std::invalid_argument);
}

TEST_CASE("predicted exponents, both frequency ends") {
    NonlinearitySpec spec;
    spec.terms.push_back({1.0, 2.0});
    const auto e = predicted_exponents(3, 2.0, spec);
    REQUIRE(e.uinf.has_value());
    CHECK(*e.uinf == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(*e.grad_sq == doctest::Approx(19.0 / 6.0).epsilon(1e-15));
    CHECK(*e.mass == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(*e.dvalue == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(*e.gap == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(*e.xi == doctest::Approx(-5.0 / 6.0).epsilon(1e-15));
    CHECK(e.large_eps_energy == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(e.large_eps_grad == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(e.large_eps_mass == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.large_eps_uinf == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("xi consistency identity across the admissible box") {
    // xi = -(1 + sigma)/2 for every admissible (N, alpha, q)
    for (int N : {3, 4, 5, 6}) {
        for (double alpha : {0.4, 1.0, 2.2}) {
            if (!(alpha < N)) continue;
            const double qlo = lower_critical(N, alpha), qhi = threshold_exponent(N, alpha);
            for (double f : {0.15, 0.5, 0.85}) {
                const double q = qlo + f * (std::min(qhi, upper_critical(N, alpha)) - qlo);
                if (!(q > qlo && q < qhi && q < upper_critical(N, alpha))) continue;
                NonlinearitySpec spec;
                spec.terms.push_back({1.0, q});
                const auto e = predicted_exponents(N, alpha, spec);
                REQUIRE(e.xi.has_value());
                CHECK(*e.xi ==
                      doctest::Approx(-(1.0 + sigma(N, alpha, q)) / 2.0).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("regime classification") {
    NonlinearitySpec s2;
    s2.terms.push_back({1.0, 2.0});
    CHECK(classify(s2, 3, 2.0).region == Region::ExistsForAllEps);
    CHECK(classify(s2, 3, 2.0).sigma.has_value());

    NonlinearitySpec s35;
    s35.terms.push_back({1.0, 3.5});
    CHECK(classify(s35, 3, 2.0).region == Region::ThresholdRegime);
    CHECK_FALSE(classify(s35, 3, 2.0).sigma.has_value());

    NonlinearitySpec bad;
    bad.terms.push_back({1.0, 1.5}); // below (N+alpha)/N = 5/3
    CHECK_THROWS_AS(classify(bad, 3, 2.0), std::invalid_argument);

    // boundary is exactly q_min = (N+alpha+4)/N = 3 (threshold side)
    NonlinearitySpec s3;
    s3.terms.push_back({1.0, 3.0});
    CHECK(classify(s3, 3, 2.0).region == Region::ThresholdRegime);
    NonlinearitySpec s3m;
    s3m.terms.push_back({1.0, 3.0 - 1e-12});
    CHECK(classify(s3m, 3, 2.0).region == Region::ExistsForAllEps);
}

TEST_CASE("nonlinearity validation") {
    ProblemParams p{3, 2.0, 1.0};
    NonlinearitySpec s;
    CHECK_THROWS(s.validate(p)); // empty
    s.terms.push_back({1.0, 2.0});
    s.terms.push_back({0.5, 2.5});
    CHECK_NOTHROW(s.validate(p));
    s.terms.push_back({0.5, 2.4}); // not increasing
    CHECK_THROWS(s.validate(p));
    NonlinearitySpec neg;
    neg.terms.push_back({-1.0, 2.0});
    CHECK_THROWS(neg.validate(p));
    NonlinearitySpec edge;
    edge.terms.push_back({1.0, 5.0}); // upper critical (N+alpha)/(N-2) = 5, boundary rejected
    CHECK_THROWS(edge.validate(p));
}
