#include "choq/model.hpp"

#include <algorithm>
#include <cmath>

namespace choq {

void ProblemParams::validate() const {
    if (N < 3) throw std::invalid_argument("ProblemParams: N must be an integer >= 3");
    if (!(alpha > 0.0 && alpha < static_cast<double>(N)))
        throw std::invalid_argument("ProblemParams: alpha must lie in (0, N)");
    if (!(eps > 0.0)) throw std::invalid_argument("ProblemParams: eps must be positive");
}

void NonlinearitySpec::validate(const ProblemParams& p) const {
    p.validate();
    if (terms.empty()) throw std::invalid_argument("NonlinearitySpec: at least one power term required");
    const double lo = lower_critical(p.N, p.alpha);
    const double hi = upper_critical(p.N, p.alpha);
    double prev = -1.0;
    for (const auto& t : terms) {
        if (!(t.coeff > 0.0))
            throw std::invalid_argument("NonlinearitySpec: coefficients must be positive");
        if (!(t.exponent > lo && t.exponent < hi))
            throw std::invalid_argument(
                "NonlinearitySpec: exponent " + std::to_string(t.exponent) +
                " outside the admissible window (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
        if (!(t.exponent > prev))
            throw std::invalid_argument("NonlinearitySpec: exponents must be strictly increasing");
        prev = t.exponent;
    }
}

double NonlinearitySpec::q_min() const { return terms.front().exponent; }
double NonlinearitySpec::r_max() const { return terms.back().exponent; }
double NonlinearitySpec::coeff_of_min() const { return terms.front().coeff; }
double NonlinearitySpec::coeff_of_max() const { return terms.back().coeff; }

double lower_critical(int N, double alpha) { return (N + alpha) / N; }
double upper_critical(int N, double alpha) { return (N + alpha) / (N - 2); }
double mass_critical(int N, double alpha) { return (N + alpha + 2) / N; }
double threshold_exponent(int N, double alpha) { return (N + alpha + 4) / N; }

namespace {
void check_domain(int N, double alpha) {
    if (N < 3) throw std::invalid_argument("dimension N must be >= 3");
    if (!(alpha > 0.0 && alpha < static_cast<double>(N)))
        throw std::invalid_argument("alpha must lie in (0, N)");
}
} // namespace

double riesz_normalization(int N, double alpha) {
    check_domain(N, alpha);
    return std::tgamma((N - alpha) / 2.0) /
           (std::tgamma(alpha / 2.0) * std::pow(M_PI, N / 2.0) * std::pow(2.0, alpha));
}

double hls_sharp_constant(int N, double alpha) {
    check_domain(N, alpha);
    return std::pow(M_PI, (N - alpha) / 2.0) * std::tgamma(alpha / 2.0) /
           std::tgamma((N + alpha) / 2.0) *
           std::pow(std::tgamma(N / 2.0) / std::tgamma(static_cast<double>(N)), -alpha / N);
}

double s_alpha(int N, double alpha) {
    return std::pow(riesz_normalization(N, alpha) * hls_sharp_constant(N, alpha),
                    -static_cast<double>(N) / (N + alpha));
}

double m0_tilde(int N, double alpha) {
    const double S = s_alpha(N, alpha);
    return alpha / (2.0 * N) * std::pow(N / (N + alpha) * S, (N + alpha) / alpha);
}

double sigma(int N, double alpha, double q) {
    check_domain(N, alpha);
    if (!(q > lower_critical(N, alpha) && q < threshold_exponent(N, alpha)))
        throw std::invalid_argument("sigma: q must lie strictly inside ((N+alpha)/N, (N+alpha+4)/N)");
    return (2.0 + alpha) * (N * q - (N + alpha)) / (alpha * (N + alpha + 4.0 - N * q));
}

AnalyticConstants analytic_constants(int N, double alpha) {
    AnalyticConstants c;
    c.N = N;
    c.alpha = alpha;
    c.riesz_norm = riesz_normalization(N, alpha);
    c.hls_sharp = hls_sharp_constant(N, alpha);
    c.s_alpha = s_alpha(N, alpha);
    c.m0_tilde = m0_tilde(N, alpha);
    return c;
}

PredictedExponents predicted_exponents(int N, double alpha, const NonlinearitySpec& spec) {
    ProblemParams p{N, alpha, 1.0};
    spec.validate(p);
    PredictedExponents e;
    const double q = spec.q_min();
    if (q < threshold_exponent(N, alpha)) {
        const double den = alpha * (N + alpha + 4.0 - N * q);
        e.uinf = N * (2.0 + alpha) / den;
        e.grad_sq = ((N + 2.0) * (N + alpha) - N * (N - 2.0) * q) / den;
        e.mass = static_cast<double>(N) / alpha;
        e.dvalue = (N + alpha) / alpha;
        e.gap = sigma(N, alpha, q);
        e.xi = -(N * (q - 1.0) + alpha) / den;
    }
    const double r = spec.r_max();
    e.large_eps_uinf = (2.0 + alpha) / (4.0 * (r - 1.0));
    e.large_eps_mass = (N + alpha + 2.0 - N * r) / (2.0 * (r - 1.0));
    e.large_eps_grad = ((N + alpha) - (N - 2.0) * r) / (2.0 * (r - 1.0));
    e.large_eps_energy = e.large_eps_grad;
    return e;
}

RegimeClassification classify(const NonlinearitySpec& spec, int N, double alpha) {
    ProblemParams p{N, alpha, 1.0};
    spec.validate(p);
    RegimeClassification rc;
    rc.q_min = spec.q_min();
    rc.r_max = spec.r_max();
    rc.a = spec.coeff_of_min();
    rc.b = spec.coeff_of_max();
    rc.lower_critical = lower_critical(N, alpha);
    rc.upper_critical = upper_critical(N, alpha);
    rc.mass_critical = mass_critical(N, alpha);
    rc.threshold_exponent = threshold_exponent(N, alpha);
    if (rc.q_min < rc.threshold_exponent) {
        rc.region = Region::ExistsForAllEps;
        rc.sigma = sigma(N, alpha, rc.q_min);
    } else {
        rc.region = Region::ThresholdRegime;
    }
    return rc;
}

} // namespace choq
