#include "choq/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace choq {

ExtremalCalibration calibrate_extremal(const GridPtr& grid, const RieszOperator& op) {
    if (grid.get() != op.grid.get())
        throw std::invalid_argument("calibrate_extremal: operator grid mismatch");
    const int N = grid->N;
    const double alpha = op.alpha;
    const double p = lower_critical(N, alpha);
    // shape S = (1+r^2)^{-N/2}; amplitude from the power balance at r = 0
    const Eigen::ArrayXd S = (1.0 + grid->nodes.square()).pow(-N / 2.0);
    const Eigen::ArrayXd pot = apply(op, S.pow(p));
    const double pot0 = linf_extrapolated(Field(grid, pot));
    const double kappa = (N + alpha) / N * pot0;
    ExtremalCalibration cal;
    cal.amplitude = std::pow(kappa, -1.0 / alpha);

    // verify the full-field residual of the limit equation at the calibrated W_1
    Field W1 = sample_w(grid, 1.0, cal.amplitude);
    ProblemParams pp{N, alpha, 1.0};
    NonlinearitySpec dummy; // the Limit frame ignores the perturbation
    dummy.terms.push_back({1.0, 0.5 * (lower_critical(N, alpha) + threshold_exponent(N, alpha))});
    cal.residual = el_residual(W1, pp, dummy, Frame::Limit, op);

    const double l2 = (grid->weights * W1.values.square()).sum();
    const double D = d_value(op, W1);
    cal.s_alpha_check = l2 / std::pow(D, static_cast<double>(N) / (N + alpha));
    if (cal.residual > 1e-4)
        throw std::runtime_error("calibrate_extremal: residual above 1e-4; grid too coarse");
    return cal;
}

double rho0_predicted(int N, double alpha, double q, double a, const GridPtr& grid,
                      const RieszOperator& op, const ExtremalCalibration& cal) {
    if (!(q < threshold_exponent(N, alpha)))
        throw std::invalid_argument("rho0_predicted: q must be below the threshold exponent");
    const double p = lower_critical(N, alpha);
    Field W1 = sample_w(grid, 1.0, cal.amplitude);
    const double grad = grid->kinetic_form(W1.values);
    const Eigen::ArrayXd pot = apply(op, W1.values.pow(p));
    const double cross = (grid->weights * pot * W1.values.pow(q)).sum();
    return std::pow(2.0 * q * grad / (a * (N * q - (N + alpha)) * cross),
                    2.0 / (N + alpha + 4.0 - N * q));
}

namespace {

// original-frame quantities from a frame-local state via the exact rescaling identities
void fill_uframe(SweepEntry& e, const ProblemParams& params, const NonlinearitySpec& spec,
                 Frame frame) {
    const int N = params.N;
    const double alpha = params.alpha;
    const double eps = e.eps;
    const auto& s = e.state;
    switch (frame) {
        case Frame::Original:
            e.u_l2_sq = s.norms.l2_sq;
            e.u_grad_sq = s.norms.grad_sq;
            e.u_linf = s.norms.linf;
            e.u_d_value = s.norms.d_value;
            e.u_energy = s.energy;
            e.u_half_mass_radius = s.half_mass_radius;
            break;
        case Frame::VFrame: {
            e.u_l2_sq = std::pow(eps, N / alpha) * s.norms.l2_sq;
            e.u_grad_sq = std::pow(eps, (N + alpha) / alpha) * s.norms.grad_sq;
            e.u_linf = std::pow(eps, N * (2.0 + alpha) / (4.0 * alpha)) * s.norms.linf;
            e.u_d_value = std::pow(eps, (N + alpha) / alpha) * s.norms.d_value;
            e.u_energy = std::pow(eps, (N + alpha) / alpha) * s.energy;
            e.u_half_mass_radius = std::pow(eps, -0.5) * s.half_mass_radius;
            break;
        }
        case Frame::WFrame: {
            const double sig = sigma(N, alpha, spec.q_min());
            e.u_l2_sq = std::pow(eps, N / alpha) * s.norms.l2_sq;
            e.u_grad_sq = std::pow(eps, (N + alpha) / alpha + sig) * s.norms.grad_sq;
            e.u_linf = std::pow(eps, N * (2.0 + alpha) / (4.0 * alpha) + N * sig / 4.0) * s.norms.linf;
            e.u_d_value = std::pow(eps, (N + alpha) / alpha) * s.norms.d_value;
            e.u_energy = std::pow(eps, (N + alpha) / alpha) * s.energy;
            e.u_half_mass_radius = std::pow(eps, -(1.0 + sig) / 2.0) * s.half_mass_radius;
            break;
        }
        case Frame::LargeEps:
        case Frame::LargeEpsLimit: {
            const double r = spec.r_max();
            const double mu = (2.0 + alpha) / (4.0 * (r - 1.0));
            const double p = lower_critical(N, alpha);
            e.u_l2_sq = std::pow(eps, 2.0 * mu - N / 2.0) * s.norms.l2_sq;
            e.u_grad_sq = std::pow(eps, 2.0 * mu + 1.0 - N / 2.0) * s.norms.grad_sq;
            e.u_linf = std::pow(eps, mu) * s.norms.linf;
            e.u_d_value = std::pow(eps, 2.0 * p * mu - (N + alpha) / 2.0) * s.norms.d_value;
            e.u_energy = std::pow(eps, 2.0 * mu + 1.0 - N / 2.0) * s.energy;
            e.u_half_mass_radius = std::pow(eps, -0.5) * s.half_mass_radius;
            break;
        }
        case Frame::Limit:
            throw std::invalid_argument("sweep: Limit is not a solve frame");
    }
}

} // namespace

SweepEntry make_sweep_entry(const RieszOperator& op, const ProblemParams& params,
                            const NonlinearitySpec& spec, Frame frame, GroundState state) {
    SweepEntry e;
    e.eps = params.eps;
    e.state = std::move(state);
    e.frame_energy = e.state.energy;
    if (e.state.norms.l2_sq > 0.0) e.tau_value = tau(e.state.u, op).tau;
    fill_uframe(e, params, spec, frame);
    return e;
}

SweepResult sweep(const RieszOperator& op, const ProblemParams& params_base,
                  const NonlinearitySpec& spec, std::vector<double> eps_list,
                  const SolveConfig& config, Frame frame) {
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    if (!eps_list.empty() &&
        std::adjacent_find(eps_list.begin(), eps_list.end()) != eps_list.end())
        throw std::invalid_argument("sweep: eps values must be distinct");
    SweepResult out;
    out.base = params_base;
    out.spec = spec;
    out.frame = frame;
    SolveConfig cfg = config;
    for (double eps : eps_list) {
        ProblemParams p = params_base;
        p.eps = eps;
        GroundState gs = solve_ground_state(op, p, spec, cfg, frame);
        if (gs.status == SolveStatus::Converged) {
            cfg.init = InitKind::WarmStart;
            cfg.warm_start = gs.u;
        }
        out.entries.push_back(make_sweep_entry(op, p, spec, frame, std::move(gs)));
    }
    return out;
}

namespace {

bool is_large_quantity(Quantity q) {
    return q == Quantity::LargeEpsEnergy || q == Quantity::LargeEpsMass ||
           q == Quantity::LargeEpsGrad || q == Quantity::LargeEpsLinf;
}

double entry_value(const SweepEntry& e, Quantity q, double m0) {
    switch (q) {
        case Quantity::LinfU: return e.u_linf;
        case Quantity::GradSqU: return e.u_grad_sq;
        case Quantity::MassU:
        case Quantity::LargeEpsMass: return e.u_l2_sq;
        case Quantity::DValueU: return e.u_d_value;
        case Quantity::EnergyGap: return m0 - e.frame_energy;
        case Quantity::Xi: return e.u_half_mass_radius;
        case Quantity::TauDev: return std::abs(e.tau_value - 1.0);
        case Quantity::LargeEpsEnergy: return e.u_energy;
        case Quantity::LargeEpsGrad: return e.u_grad_sq;
        case Quantity::LargeEpsLinf: return e.u_linf;
    }
    return 0.0;
}

double predicted_slope_for(const SweepResult& sw, Quantity q) {
    const PredictedExponents pe = predicted_exponents(sw.base.N, sw.base.alpha, sw.spec);
    auto opt = [](const std::optional<double>& v) { return v ? *v : 0.0; };
    switch (q) {
        case Quantity::LinfU: return opt(pe.uinf);
        case Quantity::GradSqU: return opt(pe.grad_sq);
        case Quantity::MassU: return opt(pe.mass);
        case Quantity::DValueU: return opt(pe.dvalue);
        case Quantity::EnergyGap: return opt(pe.gap);
        case Quantity::Xi: return opt(pe.xi);
        case Quantity::TauDev: return opt(pe.gap); // tau deviation decays like eps^sigma
        case Quantity::LargeEpsEnergy: return pe.large_eps_energy;
        case Quantity::LargeEpsMass: return pe.large_eps_mass;
        case Quantity::LargeEpsGrad: return pe.large_eps_grad;
        case Quantity::LargeEpsLinf: return pe.large_eps_uinf;
    }
    return 0.0;
}

} // namespace

ExponentFit fit_exponent(const SweepResult& sw, Quantity quantity, FitWindow window) {
    const int n = static_cast<int>(sw.entries.size());
    int lo = window.lo, hi = window.hi;
    if (lo < 0 || hi < 0) {
        // default: drop the two entries nearest the pre-asymptotic end
        // (entries are eps-decreasing: drop the head for eps->0 laws, the tail for eps->inf)
        if (is_large_quantity(quantity)) {
            lo = 0;
            hi = std::max(0, n - 2);
        } else {
            lo = std::min(2, n);
            hi = n;
        }
    }
    std::vector<double> xs, ys;
    const double m0 = m0_tilde(sw.base.N, sw.base.alpha);
    for (int i = lo; i < hi; ++i) {
        const auto& e = sw.entries[i];
        if (e.state.status != SolveStatus::Converged) continue;
        const double v = entry_value(e, quantity, m0);
        if (!(v > 0.0)) continue;
        xs.push_back(std::log(e.eps));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 4) throw std::runtime_error("fit_exponent: fewer than 4 converged points in window");
    const int m = static_cast<int>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    ExponentFit fit;
    fit.quantity = quantity;
    fit.lo = lo;
    fit.hi = hi;
    fit.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - fit.fitted_slope * sx) / m;
    fit.intercept = std::exp(icpt);
    fit.predicted_slope = predicted_slope_for(sw, quantity);
    double cons = 0.0, ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / m;
    for (int i = 0; i < m; ++i) {
        const double yhat = icpt + fit.fitted_slope * xs[i];
        ss_res += (ys[i] - yhat) * (ys[i] - yhat);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
        cons += ys[i] - fit.predicted_slope * xs[i];
    }
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    fit.constrained_intercept = std::exp(cons / m);
    return fit;
}

LimitProfileReport limit_profile(const RieszOperator& op, const SweepResult& sw,
                                 const ExtremalCalibration& cal) {
    if (sw.frame != Frame::WFrame)
        throw std::invalid_argument("limit_profile: requires a w-frame sweep");
    const auto rc = classify(sw.spec, sw.base.N, sw.base.alpha);
    if (rc.region != Region::ExistsForAllEps)
        throw std::invalid_argument("limit_profile: requires the existence regime");
    const int N = sw.base.N;
    const double alpha = sw.base.alpha;
    const double q = sw.spec.q_min();
    const double a = sw.spec.coeff_of_min();
    LimitProfileReport rep;
    rep.rho0_predicted = rho0_predicted(N, alpha, q, a, op.grid, op, cal);
    Field W = sample_w(op.grid, rep.rho0_predicted, cal.amplitude);
    const double h1W = std::sqrt(op.grid->kinetic_form(W.values) +
                                 (op.grid->weights * W.values.square()).sum());
    const double m0 = m0_tilde(N, alpha);
    const double fac = a * (N * q - (N + alpha)) / (2.0 * q);
    for (const auto& e : sw.entries) {
        if (e.state.status != SolveStatus::Converged) continue;
        rep.eps.push_back(e.eps);
        rep.xi_eps.push_back(e.u_half_mass_radius);
        const Eigen::ArrayXd diff = e.state.u.values - W.values;
        const double h1d =
            std::sqrt(op.grid->kinetic_form(diff) + (op.grid->weights * diff.square()).sum());
        rep.h1_errors.push_back(h1d / h1W);
        rep.tau_values.push_back(e.tau_value);
        rep.gap_values.push_back(m0 - e.frame_energy);
        const double cross_q = e.state.norms.cross.front();
        rep.lemma42_defect.push_back(
            std::abs(e.state.norms.grad_sq - fac * cross_q) / e.state.norms.grad_sq);
        rep.band_quantities.push_back(
            {e.state.norms.d_value, e.state.norms.l2_sq, e.state.norms.grad_sq, cross_q});
    }
    return rep;
}

ThresholdReport threshold_find(const RieszOperator& op, const ProblemParams& params_base,
                               const NonlinearitySpec& spec, double bracket_lo, double bracket_hi,
                               double rel_tol, const SolveConfig& config) {
    const auto rc = classify(spec, params_base.N, params_base.alpha);
    if (rc.region != Region::ThresholdRegime)
        throw std::invalid_argument("threshold_find: spec is not in the threshold regime");
    const double m0 = m0_tilde(params_base.N, params_base.alpha);
    const double delta = 1e-3 * m0;

    ThresholdReport rep;
    SolveConfig cfg_above = config, cfg_below = config;
    auto probe = [&](double eps) -> bool {
        ProblemParams p = params_base;
        p.eps = eps;
        SolveConfig& cfg = cfg_above; // warm start from the latest existence-side state
        GroundState gs = solve_ground_state(op, p, spec, cfg, Frame::VFrame);
        rep.m_curve.emplace_back(eps, std::min(gs.energy, m0)); // the continuum value never exceeds m0
        const bool exists =
            gs.status == SolveStatus::Converged && gs.energy < m0 - delta;
        if (exists) {
            cfg_above.init = InitKind::WarmStart;
            cfg_above.warm_start = gs.u;
        }
        return exists;
    };

    double lo = bracket_lo, hi = bracket_hi;
    if (probe(lo)) throw std::runtime_error("threshold_find: lower bracket already has a ground state");
    if (!probe(hi)) throw std::runtime_error("threshold_find: upper bracket shows no ground state");
    while (hi / lo - 1.0 > rel_tol) {
        const double mid = std::sqrt(lo * hi);
        if (probe(mid))
            hi = mid;
        else
            lo = mid;
    }
    rep.lo = lo;
    rep.hi = hi;
    std::sort(rep.m_curve.begin(), rep.m_curve.end());
    rep.below_status = "energy pinned at the non-attained bound (spread profile)";
    rep.above_status = "converged ground state strictly below the bound";
    return rep;
}

LargeEpsReport large_eps_analysis(const RieszOperator& op, const SweepResult& sw,
                                  const NonlinearitySpec& spec, const SolveConfig& config) {
    if (sw.frame != Frame::LargeEps)
        throw std::invalid_argument("large_eps_analysis: requires a large-eps-frame sweep");
    LargeEpsReport rep;
    rep.energy = fit_exponent(sw, Quantity::LargeEpsEnergy);
    rep.mass = fit_exponent(sw, Quantity::LargeEpsMass);
    rep.grad = fit_exponent(sw, Quantity::LargeEpsGrad);
    rep.linf = fit_exponent(sw, Quantity::LargeEpsLinf);
    ProblemParams p = sw.base;
    auto lim = solve_large_eps_limit(op, p, spec, config);
    rep.s_r = lim.s_r;
    // the sweep states live in the section-5 frame, so the rescaled comparison is direct
    const auto& largest = sw.entries.front();
    const Eigen::ArrayXd diff = largest.state.u.values - lim.state.u.values;
    const double h1d =
        std::sqrt(op.grid->kinetic_form(diff) + (op.grid->weights * diff.square()).sum());
    const double h1l = std::sqrt(lim.state.norms.grad_sq + lim.state.norms.l2_sq);
    rep.h1_dist_at_largest = h1d / h1l;
    return rep;
}

MassCurve mass_curve(const SweepResult& small_sweep, const SweepResult& large_sweep) {
    MassCurve mc;
    auto add = [&ms = mc.samples](const SweepResult& sw) {
        for (const auto& e : sw.entries)
            if (e.state.status == SolveStatus::Converged) ms.emplace_back(e.eps, e.u_l2_sq);
    };
    add(small_sweep);
    add(large_sweep);
    std::sort(mc.samples.begin(), mc.samples.end());
    if (mc.samples.size() < 4) throw std::runtime_error("mass_curve: too few converged points");
    for (size_t i = 1; i + 1 < mc.samples.size(); ++i) {
        const double slope = (std::log(mc.samples[i + 1].second) - std::log(mc.samples[i - 1].second)) /
                             (std::log(mc.samples[i + 1].first) - std::log(mc.samples[i - 1].first));
        mc.slope_signs.push_back(slope > 0 ? 1 : (slope < 0 ? -1 : 0));
        mc.regime_tags.push_back(slope > 0 ? "stable" : "unstable");
    }
    mc.small_eps_slope = fit_exponent(small_sweep, Quantity::MassU).fitted_slope;
    mc.large_eps_slope = fit_exponent(large_sweep, Quantity::LargeEpsMass).fitted_slope;
    return mc;
}

} // namespace choq
