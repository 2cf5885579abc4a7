#pragma once

#include <Eigen/Dense>
#include <vector>

#include "choq/grid.hpp"
#include "choq/model.hpp"
#include "choq/riesz.hpp"

namespace choq {

// Every frame's action has the shape
//   J(u) = gw/2 ||grad u||^2 + mw/2 ||u||^2 - 1/2 <I_alpha * Phi(u), Phi(u)>,
//   Phi(u) = chi |u|^p + sum_i (C_i/q_i) |u|^{q_i},  p = (N+alpha)/N,
// with frame-dependent weights; one implementation covers all frames.
enum class Frame { Original, VFrame, WFrame, Limit, LargeEps, LargeEpsLimit };

struct FrameCoefficients {
    double grad_weight = 1.0;
    double mass_weight = 1.0;
    double chi = 1.0; // coefficient of the lower-critical term inside Phi
    std::vector<PowerTerm> terms;
    double p = 0.0;
};

FrameCoefficients make_frame_coefficients(const ProblemParams& params,
                                          const NonlinearitySpec& spec, Frame frame);

// w-frame bookkeeping of the small-eps rescaling
struct RescaledProblem {
    double sigma = 0.0;
    double eps1 = 0.0; // eps^{(N+alpha)(2+alpha)/(4 alpha) + (N+alpha) sigma/4}
    double eps2 = 0.0; // eps^{N(2+alpha)/(4 alpha) + N sigma/4}
};
RescaledProblem rescaled_problem(const ProblemParams& params, const NonlinearitySpec& spec);

struct EnergyBreakdown {
    double kinetic = 0.0;
    double mass = 0.0;
    double nonlocal_crit = 0.0;
    double nonlocal_cross = 0.0;
    double nonlocal_gg = 0.0;
    double total = 0.0;
};

struct Residuals {
    double nehari = 0.0;
    double pohozaev = 0.0;
    double euler_lagrange = 0.0;
};

// per-iterate assembly shared by action, residuals and the Nehari projection
struct ComponentData {
    std::vector<double> coef, expo;         // Phi = sum_k coef[k] |u|^{expo[k]}
    std::vector<Eigen::ArrayXd> funcs;      // |u|^{expo[k]}
    std::vector<Eigen::ArrayXd> pots;       // I_alpha * funcs[k]
    Eigen::MatrixXd pair;                   // <I funcs[k], funcs[l]>
    double kinetic_q = 0.0;                 // u^T A u
    double l2 = 0.0;                        // int u^2
};

ComponentData assemble_components(const RieszOperator& op, const FrameCoefficients& fc,
                                  const Eigen::ArrayXd& u);

EnergyBreakdown action_breakdown(const RieszOperator& op, const FrameCoefficients& fc,
                                 const Eigen::ArrayXd& u);
EnergyBreakdown action(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                       Frame frame, const RieszOperator& op);

// Nehari functional value normalized by gw||grad u||^2 + mw||u||^2; zero on the manifold
double nehari_residual(const Field& w, const ProblemParams& params, const NonlinearitySpec& spec,
                       Frame frame, const RieszOperator& op);

// Pohozaev combination normalized by the sum of absolute term values
double pohozaev_residual(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                         Frame frame, const RieszOperator& op);

struct TauValue {
    double tau = 0.0;
    double h = 0.0; // (tau - 1)/tau
};
TauValue tau(const Field& w, const RieszOperator& op);

// sup-norm of the weak-form PDE residual over interior nodes, scale-normalized
double el_residual(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                   Frame frame, const RieszOperator& op);

// the t* > 0 maximizing t -> J(t u); closed form tau^{N/(2 alpha)} in the Limit frame
double nehari_scale(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                    Frame frame, const RieszOperator& op);

// u(./t) resampled by monotone cubic interpolation, zero beyond t * r_max
Field dilate(const Field& u, double t);

enum class RescaleDirection { UtoV, VtoW, UtoW_small_eps, UtoW_large_eps };

// exact node relabeling: values scaled by the amplitude factor, grid radii by the
// length factor; satisfies the rescaling norm identities to machine precision
Field rescale(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
              RescaleDirection direction);
Field rescale_inverse(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                      RescaleDirection direction);

// internal: pieces used by the solver
double action_value(const FrameCoefficients& fc, const ComponentData& cd);
double nehari_residual_value(const FrameCoefficients& fc, const ComponentData& cd);
double nehari_scale_value(const FrameCoefficients& fc, const ComponentData& cd);
double pohozaev_residual_value(const FrameCoefficients& fc, const ComponentData& cd, int N,
                               double alpha);

} // namespace choq
