#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace choq {

// Problem instance: -Laplace(u) + eps*u = (I_alpha * F(u)) F'(u) on R^N,
// F(u) = |u|^{(N+alpha)/N} + G(u).
struct ProblemParams {
    int N = 3;          // space dimension, N >= 3
    double alpha = 2.0; // Riesz order, 0 < alpha < N
    double eps = 1.0;   // frequency, eps > 0

    void validate() const;
};

// One attractive power term of the perturbation: contributes (coeff/exponent) s^exponent
// to G(s) and coeff * s^{exponent-1} to g(s).
struct PowerTerm {
    double coeff = 0.0;
    double exponent = 0.0;
};

// G as a finite sum of attractive powers. The lower-critical term |u|^{(N+alpha)/N}
// is implicit and always present; `terms` holds only the perturbation.
struct NonlinearitySpec {
    std::vector<PowerTerm> terms;

    // exponents strictly increasing, all coefficients positive, every exponent
    // strictly inside ((N+alpha)/N, (N+alpha)/(N-2))
    void validate(const ProblemParams& p) const;

    double q_min() const;
    double r_max() const;
    double coeff_of_min() const; // a, paired with q_min
    double coeff_of_max() const; // b, paired with r_max
};

// critical exponents for (N, alpha)
double lower_critical(int N, double alpha);     // (N+alpha)/N
double upper_critical(int N, double alpha);     // (N+alpha)/(N-2)
double mass_critical(int N, double alpha);      // (N+alpha+2)/N
double threshold_exponent(int N, double alpha); // q0 = (N+alpha+4)/N

enum class Region { ExistsForAllEps, ThresholdRegime };

struct RegimeClassification {
    double q_min = 0.0;
    double r_max = 0.0;
    double a = 0.0;
    double b = 0.0;
    double lower_critical = 0.0;
    double upper_critical = 0.0;
    double mass_critical = 0.0;
    double threshold_exponent = 0.0;
    Region region = Region::ExistsForAllEps;
    std::optional<double> sigma; // defined only when q_min < (N+alpha+4)/N
};

struct AnalyticConstants {
    int N = 0;
    double alpha = 0.0;
    double riesz_norm = 0.0; // A_alpha(N)
    double hls_sharp = 0.0;  // C_alpha(N)
    double s_alpha = 0.0;    // S_alpha
    double m0_tilde = 0.0;   // non-attained limit least energy
};

// Exponents predicted by the two asymptotic theorems. Small-eps entries are
// absent when q_min >= (N+alpha+4)/N.
struct PredictedExponents {
    std::optional<double> uinf;    // ||u_eps||_inf ~ eps^uinf
    std::optional<double> grad_sq; // ||grad u_eps||_2^2
    std::optional<double> mass;    // ||u_eps||_2^2 leading term, N/alpha
    std::optional<double> dvalue;  // D(u_eps) leading term, (N+alpha)/alpha
    std::optional<double> gap;     // energy-gap correction, sigma
    std::optional<double> xi;      // rescaling radius, -(1+sigma)/2
    double large_eps_uinf = 0.0;
    double large_eps_mass = 0.0;
    double large_eps_grad = 0.0;
    double large_eps_energy = 0.0;
};

// A_alpha(N) = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha)
double riesz_normalization(int N, double alpha);

// C_alpha(N) = pi^{(N-alpha)/2} Gamma(alpha/2)/Gamma((N+alpha)/2) *
//              {Gamma(N/2)/Gamma(N)}^{-alpha/N}
double hls_sharp_constant(int N, double alpha);

// S_alpha = (A_alpha(N) C_alpha(N))^{-N/(N+alpha)}
double s_alpha(int N, double alpha);

// m0_tilde = (alpha/2N) ((N/(N+alpha)) S_alpha)^{(N+alpha)/alpha}
double m0_tilde(int N, double alpha);

// sigma = (2+alpha)[Nq-(N+alpha)] / (alpha (N+alpha+4-Nq)),
// defined for q strictly inside ((N+alpha)/N, (N+alpha+4)/N)
double sigma(int N, double alpha, double q);

AnalyticConstants analytic_constants(int N, double alpha);

PredictedExponents predicted_exponents(int N, double alpha, const NonlinearitySpec& spec);

RegimeClassification classify(const NonlinearitySpec& spec, int N, double alpha);

} // namespace choq
