#include "choq/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace choq {

FrameCoefficients make_frame_coefficients(const ProblemParams& params,
                                          const NonlinearitySpec& spec, Frame frame) {
    params.validate();
    const int N = params.N;
    const double alpha = params.alpha;
    const double eps = params.eps;
    FrameCoefficients fc;
    fc.p = lower_critical(N, alpha);
    switch (frame) {
        case Frame::Original:
            spec.validate(params);
            fc.grad_weight = 1.0;
            fc.mass_weight = eps;
            fc.chi = 1.0;
            fc.terms = spec.terms;
            break;
        case Frame::VFrame: {
            spec.validate(params);
            fc.grad_weight = 1.0;
            fc.mass_weight = 1.0;
            fc.chi = 1.0;
            for (const auto& t : spec.terms)
                fc.terms.push_back(
                    {t.coeff * std::pow(eps, (2.0 + alpha) * (N * t.exponent - (N + alpha)) /
                                                 (4.0 * alpha)),
                     t.exponent});
            break;
        }
        case Frame::WFrame: {
            spec.validate(params);
            const double q = spec.q_min();
            if (!(q < threshold_exponent(N, alpha)))
                throw std::invalid_argument(
                    "WFrame requires q_min < (N+alpha+4)/N (sigma undefined in the threshold regime)");
            const double sig = sigma(N, alpha, q);
            fc.grad_weight = std::pow(eps, sig);
            fc.mass_weight = 1.0;
            fc.chi = 1.0;
            for (const auto& t : spec.terms)
                fc.terms.push_back(
                    {t.coeff * std::pow(eps, (N * t.exponent - (N + alpha)) *
                                                 ((2.0 + alpha) / (4.0 * alpha) + sig / 4.0)),
                     t.exponent});
            break;
        }
        case Frame::Limit:
            fc.grad_weight = 0.0;
            fc.mass_weight = 1.0;
            fc.chi = 1.0;
            break;
        case Frame::LargeEps: {
            spec.validate(params);
            const double r = spec.r_max();
            const double mu = (2.0 + alpha) / (4.0 * (r - 1.0));
            fc.grad_weight = 1.0;
            fc.mass_weight = 1.0;
            fc.chi = std::pow(eps, mu * (fc.p - 1.0) - (2.0 + alpha) / 4.0);
            for (const auto& t : spec.terms)
                fc.terms.push_back(
                    {t.coeff * std::pow(eps, mu * (t.exponent - 1.0) - (2.0 + alpha) / 4.0),
                     t.exponent});
            break;
        }
        case Frame::LargeEpsLimit: {
            spec.validate(params);
            fc.grad_weight = 1.0;
            fc.mass_weight = 1.0;
            fc.chi = 0.0;
            fc.terms.push_back({spec.coeff_of_max(), spec.r_max()});
            break;
        }
    }
    return fc;
}

RescaledProblem rescaled_problem(const ProblemParams& params, const NonlinearitySpec& spec) {
    const int N = params.N;
    const double alpha = params.alpha;
    const double q = spec.q_min();
    RescaledProblem rp;
    rp.sigma = sigma(N, alpha, q);
    rp.eps1 = std::pow(params.eps,
                       (N + alpha) * (2.0 + alpha) / (4.0 * alpha) + (N + alpha) * rp.sigma / 4.0);
    rp.eps2 = std::pow(params.eps, N * (2.0 + alpha) / (4.0 * alpha) + N * rp.sigma / 4.0);
    return rp;
}

ComponentData assemble_components(const RieszOperator& op, const FrameCoefficients& fc,
                                  const Eigen::ArrayXd& u) {
    ComponentData cd;
    if (fc.chi != 0.0) {
        cd.coef.push_back(fc.chi);
        cd.expo.push_back(fc.p);
    }
    for (const auto& t : fc.terms) {
        cd.coef.push_back(t.coeff / t.exponent);
        cd.expo.push_back(t.exponent);
    }
    const int m = static_cast<int>(cd.coef.size());
    cd.funcs.reserve(m);
    cd.pots.reserve(m);
    const Eigen::ArrayXd ua = u.abs();
    for (int k = 0; k < m; ++k) {
        cd.funcs.push_back(ua.pow(cd.expo[k]));
        cd.pots.push_back(apply(op, cd.funcs.back()));
    }
    cd.pair.resize(m, m);
    const auto& w = op.grid->weights;
    for (int k = 0; k < m; ++k)
        for (int l = k; l < m; ++l) {
            const double v = (w * cd.pots[k] * cd.funcs[l]).sum();
            cd.pair(k, l) = v;
            cd.pair(l, k) = v;
        }
    cd.kinetic_q = op.grid->kinetic_form(u);
    cd.l2 = (w * u * u).sum();
    return cd;
}

namespace {
double nonlocal_total(const ComponentData& cd) {
    double s = 0.0;
    const int m = static_cast<int>(cd.coef.size());
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) s += cd.coef[k] * cd.coef[l] * cd.pair(k, l);
    return s;
}
} // namespace

double action_value(const FrameCoefficients& fc, const ComponentData& cd) {
    return 0.5 * fc.grad_weight * cd.kinetic_q + 0.5 * fc.mass_weight * cd.l2 -
           0.5 * nonlocal_total(cd);
}

double nehari_residual_value(const FrameCoefficients& fc, const ComponentData& cd) {
    const double a2 = fc.grad_weight * cd.kinetic_q + fc.mass_weight * cd.l2;
    double rhs = 0.0;
    const int m = static_cast<int>(cd.coef.size());
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
            rhs += cd.coef[k] * cd.coef[l] * cd.expo[l] * cd.pair(k, l);
    if (a2 == 0.0) return 0.0; // degenerate zero field
    return (a2 - rhs) / a2;
}

double pohozaev_residual_value(const FrameCoefficients& fc, const ComponentData& cd, int N,
                               double alpha) {
    const double t1 = 0.5 * (N - 2.0) * fc.grad_weight * cd.kinetic_q;
    const double t2 = 0.5 * N * fc.mass_weight * cd.l2;
    const double t3 = -0.5 * (N + alpha) * nonlocal_total(cd);
    const double den = std::abs(t1) + std::abs(t2) + std::abs(t3);
    if (den == 0.0) return 0.0;
    return (t1 + t2 + t3) / den;
}

double nehari_scale_value(const FrameCoefficients& fc, const ComponentData& cd) {
    const double a2 = fc.grad_weight * cd.kinetic_q + fc.mass_weight * cd.l2;
    if (!(a2 > 0.0)) throw std::invalid_argument("nehari_scale: zero field");
    const int m = static_cast<int>(cd.coef.size());
    std::vector<double> pw, cf;
    pw.reserve(m * m);
    cf.reserve(m * m);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            pw.push_back(cd.expo[k] + cd.expo[l]);
            cf.push_back(cd.coef[k] * cd.coef[l] * cd.pair(k, l));
        }
    // phi'(t)/t = a2 - sum (e/2) c t^{e-2}; the sum is strictly increasing in t,
    // so the positive maximizer is the unique root
    auto gfun = [&](double t) {
        double s = 0.0;
        for (size_t k = 0; k < pw.size(); ++k) s += 0.5 * pw[k] * cf[k] * std::pow(t, pw[k] - 2.0);
        return a2 - s;
    };
    double lo = 1.0, hi = 1.0;
    if (gfun(1.0) > 0.0) {
        while (gfun(hi) > 0.0) {
            hi *= 2.0;
            if (hi > 1e12) throw std::runtime_error("nehari_scale: no positive maximizer found");
        }
        lo = hi / 2.0;
    } else {
        while (gfun(lo) < 0.0) {
            lo *= 0.5;
            if (lo < 1e-12) throw std::runtime_error("nehari_scale: no positive maximizer found");
        }
        hi = lo * 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (gfun(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi / lo - 1.0 < 1e-15) break;
    }
    return std::sqrt(lo * hi);
}

EnergyBreakdown action_breakdown(const RieszOperator& op, const FrameCoefficients& fc,
                                 const Eigen::ArrayXd& u) {
    const ComponentData cd = assemble_components(op, fc, u);
    EnergyBreakdown e;
    e.kinetic = 0.5 * fc.grad_weight * cd.kinetic_q;
    e.mass = 0.5 * fc.mass_weight * cd.l2;
    const int m = static_cast<int>(cd.coef.size());
    const int i0 = (fc.chi != 0.0) ? 1 : 0; // index of the first perturbation component
    if (fc.chi != 0.0) e.nonlocal_crit = 0.5 * cd.coef[0] * cd.coef[0] * cd.pair(0, 0);
    for (int i = i0; i < m; ++i) {
        if (fc.chi != 0.0) e.nonlocal_cross += cd.coef[0] * cd.coef[i] * cd.pair(0, i);
        for (int j = i0; j < m; ++j) e.nonlocal_gg += 0.5 * cd.coef[i] * cd.coef[j] * cd.pair(i, j);
    }
    e.total = e.kinetic + e.mass - e.nonlocal_crit - e.nonlocal_cross - e.nonlocal_gg;
    return e;
}

EnergyBreakdown action(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                       Frame frame, const RieszOperator& op) {
    return action_breakdown(op, make_frame_coefficients(params, spec, frame), u.values);
}

double nehari_residual(const Field& w, const ProblemParams& params, const NonlinearitySpec& spec,
                       Frame frame, const RieszOperator& op) {
    const auto fc = make_frame_coefficients(params, spec, frame);
    return nehari_residual_value(fc, assemble_components(op, fc, w.values));
}

double pohozaev_residual(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                         Frame frame, const RieszOperator& op) {
    const auto fc = make_frame_coefficients(params, spec, frame);
    return pohozaev_residual_value(fc, assemble_components(op, fc, u.values), params.N,
                                   params.alpha);
}

TauValue tau(const Field& w, const RieszOperator& op) {
    const int N = op.grid->N;
    const double alpha = op.alpha;
    const double l2 = (op.grid->weights * w.values * w.values).sum();
    if (!(l2 > 0.0)) throw std::invalid_argument("tau: zero field");
    const double D = d_value(op, w);
    TauValue t;
    t.tau = static_cast<double>(N) / (N + alpha) * l2 / D;
    t.h = (t.tau - 1.0) / t.tau;
    return t;
}

double el_residual(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                   Frame frame, const RieszOperator& op) {
    const auto fc = make_frame_coefficients(params, spec, frame);
    const ComponentData cd = assemble_components(op, fc, u.values);
    const auto& g = *op.grid;
    const int n = g.n;
    // RHS = (I * Phi) Phi'(u) assembled from the cached component potentials
    Eigen::ArrayXd pot_phi = Eigen::ArrayXd::Zero(n);
    const int m = static_cast<int>(cd.coef.size());
    for (int k = 0; k < m; ++k) pot_phi += cd.coef[k] * cd.pots[k];
    Eigen::ArrayXd dphi = Eigen::ArrayXd::Zero(n);
    const Eigen::ArrayXd ua = u.values.abs();
    for (int k = 0; k < m; ++k) dphi += cd.coef[k] * cd.expo[k] * ua.pow(cd.expo[k] - 1.0);
    const Eigen::ArrayXd rhs = pot_phi * dphi;
    // weak-form LHS: (1/w) A u + mw u
    Eigen::ArrayXd au = g.kinetic.apply(u.values.matrix()).array();
    Eigen::ArrayXd lhs = fc.grad_weight * (au / g.weights) + fc.mass_weight * u.values;
    const double scale =
        std::max({rhs.abs().maxCoeff(), fc.mass_weight * u.values.abs().maxCoeff(), 1e-300});
    double sup = 0.0;
    for (int i = 0; i + 1 < n; ++i) sup = std::max(sup, std::abs(lhs[i] - rhs[i]));
    return sup / scale;
}

double nehari_scale(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                    Frame frame, const RieszOperator& op) {
    if (frame == Frame::Limit) {
        const TauValue t = tau(u, op);
        return std::pow(t.tau, params.N / (2.0 * params.alpha));
    }
    const auto fc = make_frame_coefficients(params, spec, frame);
    return nehari_scale_value(fc, assemble_components(op, fc, u.values));
}

// ---- monotone cubic interpolation (Fritsch-Carlson) ---------------------

namespace {
struct Pchip {
    const Eigen::ArrayXd& x;
    const Eigen::ArrayXd& y;
    Eigen::ArrayXd d; // node slopes

    explicit Pchip(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys) : x(xs), y(ys) {
        const int n = static_cast<int>(x.size());
        Eigen::ArrayXd h(n - 1), del(n - 1);
        for (int i = 0; i < n - 1; ++i) {
            h[i] = x[i + 1] - x[i];
            del[i] = (y[i + 1] - y[i]) / h[i];
        }
        d.resize(n);
        d[0] = del[0];
        d[n - 1] = del[n - 2];
        for (int i = 1; i < n - 1; ++i) {
            if (del[i - 1] * del[i] <= 0.0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
    }

    double eval(double q) const {
        const int n = static_cast<int>(x.size());
        if (q <= x[0]) {
            // even extension toward r = 0: quadratic in r^2 through the first two nodes
            const double t = (q * q - x[0] * x[0]) / (x[1] * x[1] - x[0] * x[0]);
            return y[0] + (y[1] - y[0]) * t;
        }
        if (q > x[n - 1]) return 0.0;
        if (q == x[n - 1]) return y[n - 1];
        int lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            if (x[mid] <= q)
                lo = mid;
            else
                hi = mid;
        }
        const double h = x[lo + 1] - x[lo];
        const double t = (q - x[lo]) / h;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        return h00 * y[lo] + h10 * h * d[lo] + h01 * y[lo + 1] + h11 * h * d[lo + 1];
    }
};
} // namespace

Field dilate(const Field& u, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
    const auto& g = *u.grid;
    Pchip interp(g.nodes, u.values);
    Eigen::ArrayXd v(g.n);
    const double cutoff = t * g.r_max;
    for (int i = 0; i < g.n; ++i) {
        const double q = g.nodes[i] / t;
        v[i] = (g.nodes[i] > cutoff) ? 0.0 : interp.eval(q);
    }
    return Field(u.grid, std::move(v));
}

namespace {
// amplitude and length factors: target(x) = amp * source(x / len)
void rescale_factors(const ProblemParams& params, const NonlinearitySpec& spec,
                     RescaleDirection dir, double& amp, double& len) {
    const int N = params.N;
    const double alpha = params.alpha;
    const double eps = params.eps;
    switch (dir) {
        case RescaleDirection::UtoV: {
            amp = std::pow(eps, -N * (2.0 + alpha) / (4.0 * alpha));
            len = std::pow(eps, 0.5);
            break;
        }
        case RescaleDirection::VtoW: {
            const double sig = sigma(N, alpha, spec.q_min());
            amp = std::pow(eps, -N * sig / 4.0);
            len = std::pow(eps, sig / 2.0);
            break;
        }
        case RescaleDirection::UtoW_small_eps: {
            const double sig = sigma(N, alpha, spec.q_min());
            amp = std::pow(eps, -N * (2.0 + alpha) / (4.0 * alpha) - N * sig / 4.0);
            len = std::pow(eps, (1.0 + sig) / 2.0);
            break;
        }
        case RescaleDirection::UtoW_large_eps: {
            const double r = spec.r_max();
            amp = std::pow(eps, -(2.0 + alpha) / (4.0 * (r - 1.0)));
            len = std::pow(eps, 0.5);
            break;
        }
    }
}
} // namespace

Field rescale(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
              RescaleDirection direction) {
    double amp = 1.0, len = 1.0;
    rescale_factors(params, spec, direction, amp, len);
    // target(y) = amp * u(y / len); relabel nodes y_i = len * r_i exactly
    const auto& g = *u.grid;
    auto grid2 = make_grid(g.N, len * g.r_max, g.n, g.stretching);
    return Field(grid2, amp * u.values);
}

Field rescale_inverse(const Field& u, const ProblemParams& params, const NonlinearitySpec& spec,
                      RescaleDirection direction) {
    double amp = 1.0, len = 1.0;
    rescale_factors(params, spec, direction, amp, len);
    const auto& g = *u.grid;
    auto grid2 = make_grid(g.N, g.r_max / len, g.n, g.stretching);
    return Field(grid2, u.values / amp);
}

} // namespace choq
