#pragma once

#include <string>
#include <vector>

#include "choq/functionals.hpp"
#include "choq/solver.hpp"

namespace choq {

struct ExtremalCalibration {
    double amplitude = 0.0;     // A with W_1 = (A/(1+|x|^2))^{N/2} solving the limit equation
    double residual = 0.0;      // sup relative residual of the limit equation at W_1
    double s_alpha_check = 0.0; // quadrature quotient at W_1
};

ExtremalCalibration calibrate_extremal(const GridPtr& grid, const RieszOperator& op);

// rho_0 = (2q ||grad W_1||^2 / (a [Nq-(N+alpha)] int (I*W_1^p) W_1^q))^{2/(N+alpha+4-Nq)}
double rho0_predicted(int N, double alpha, double q, double a, const GridPtr& grid,
                      const RieszOperator& op, const ExtremalCalibration& cal);

struct SweepEntry {
    double eps = 0.0;
    GroundState state; // in the sweep's solve frame
    double frame_energy = 0.0;
    double tau_value = 0.0;
    // original-frame quantities via the exact rescaling identities
    double u_l2_sq = 0.0;
    double u_grad_sq = 0.0;
    double u_linf = 0.0;
    double u_d_value = 0.0;
    double u_energy = 0.0;
    double u_half_mass_radius = 0.0;
};

struct SweepResult {
    ProblemParams base;
    NonlinearitySpec spec;
    Frame frame = Frame::WFrame;
    std::vector<SweepEntry> entries; // eps decreasing
};

// warm-start continuation, largest eps first; solver failures recorded per entry
SweepResult sweep(const RieszOperator& op, const ProblemParams& params_base,
                  const NonlinearitySpec& spec, std::vector<double> eps_list,
                  const SolveConfig& config, Frame frame);

// wraps a solved state into a sweep entry, filling the original-frame quantities
// through the exact rescaling identities
SweepEntry make_sweep_entry(const RieszOperator& op, const ProblemParams& params,
                            const NonlinearitySpec& spec, Frame frame, GroundState state);

enum class Quantity {
    LinfU,
    GradSqU,
    MassU,
    DValueU,
    EnergyGap,
    Xi,
    TauDev,
    LargeEpsEnergy,
    LargeEpsMass,
    LargeEpsGrad,
    LargeEpsLinf,
};

struct FitWindow {
    int lo = -1, hi = -1; // entry index range [lo, hi); -1 = default policy
};

struct ExponentFit {
    Quantity quantity{};
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;
    double r_squared = 0.0;
    double intercept = 0.0;             // from the free fit
    double constrained_intercept = 0.0; // geometric-mean intercept at the predicted slope
    int lo = 0, hi = 0;
};

ExponentFit fit_exponent(const SweepResult& sweep, Quantity quantity, FitWindow window = {});

struct LimitProfileReport {
    double rho0_predicted = 0.0;
    std::vector<double> eps;
    std::vector<double> xi_eps;     // measured half-mass radii in the original frame
    std::vector<double> h1_errors;  // ||w_eps - W_rho0||_H1 / ||W_rho0||_H1
    std::vector<double> tau_values;
    std::vector<double> gap_values; // m0_tilde - m_eps
    std::vector<double> lemma42_defect; // relative defect of the gradient identity
    // boundedness band quantities: D(w), ||w||_2^2, ||grad w||_2^2, cross pairing
    std::vector<std::array<double, 4>> band_quantities;
};

LimitProfileReport limit_profile(const RieszOperator& op, const SweepResult& sw,
                                 const ExtremalCalibration& cal);

struct ThresholdReport {
    double lo = 0.0, hi = 0.0; // final bracket for eps_q
    std::vector<std::pair<double, double>> m_curve; // (eps, m_eps), eps increasing
    std::string below_status;
    std::string above_status;
};

// bisection on the indicator [m_eps < m0_tilde - delta_detect], delta_detect = 1e-3 m0_tilde
ThresholdReport threshold_find(const RieszOperator& op, const ProblemParams& params_base,
                               const NonlinearitySpec& spec, double bracket_lo, double bracket_hi,
                               double rel_tol, const SolveConfig& config);

struct LargeEpsReport {
    ExponentFit energy, mass, grad, linf;
    double s_r = 0.0;
    double h1_dist_at_largest = 0.0; // relative H1 distance to the limit ground state
};

LargeEpsReport large_eps_analysis(const RieszOperator& op, const SweepResult& sw,
                                  const NonlinearitySpec& spec, const SolveConfig& config);

struct MassCurve {
    std::vector<std::pair<double, double>> samples; // (eps, M), eps increasing
    std::vector<int> slope_signs;                   // sign of centered d log M / d log eps
    std::vector<std::string> regime_tags;           // stable / unstable per interval
    double small_eps_slope = 0.0;
    double large_eps_slope = 0.0;
};

MassCurve mass_curve(const SweepResult& small_sweep, const SweepResult& large_sweep);

} // namespace choq
