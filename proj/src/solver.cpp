#include "choq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "choq/banded.hpp"

namespace choq {

namespace {

double half_mass_radius(const RadialGrid& g, const Eigen::ArrayXd& u) {
    const Eigen::ArrayXd m = g.weights * u * u;
    const double total = m.sum();
    if (!(total > 0.0)) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        acc += m[i];
        if (acc >= 0.5 * total) return g.nodes[i];
    }
    return g.r_max;
}

struct SolveContext {
    const RieszOperator& op;
    const RadialGrid& g;
    FrameCoefficients fc;
    BandedLU helm; // gw * A + mw * W

    SolveContext(const RieszOperator& op_, const FrameCoefficients& fc_)
        : op(op_), g(*op_.grid), fc(fc_), helm(make_helm(op_, fc_)) {}

    static BandedLU make_helm(const RieszOperator& op_, const FrameCoefficients& fc_) {
        const auto& g = *op_.grid;
        BandedMatrix m(g.n, 4);
        if (fc_.grad_weight > 0.0) {
            for (int i = 0; i < g.n; ++i)
                for (int j = std::max(0, i - 4); j <= std::min(g.n - 1, i + 4); ++j)
                    m.at(i, j) = fc_.grad_weight * g.kinetic.at(i, j);
        }
        for (int i = 0; i < g.n; ++i) m.at(i, i) += fc_.mass_weight * g.weights[i];
        return BandedLU(m);
    }

    // gradient of the discrete action in the Euclidean sense (rows carry w)
    Eigen::ArrayXd gradient(const Eigen::ArrayXd& u, const ComponentData& cd) const {
        Eigen::ArrayXd au = g.kinetic.apply(u.matrix()).array();
        Eigen::ArrayXd pot_phi = Eigen::ArrayXd::Zero(g.n);
        Eigen::ArrayXd dphi = Eigen::ArrayXd::Zero(g.n);
        const Eigen::ArrayXd ua = u.abs();
        for (size_t k = 0; k < cd.coef.size(); ++k) {
            pot_phi += cd.coef[k] * cd.pots[k];
            dphi += cd.coef[k] * cd.expo[k] * ua.pow(cd.expo[k] - 1.0);
        }
        return fc.grad_weight * au + fc.mass_weight * (g.weights * u) -
               g.weights * pot_phi * dphi;
    }

    double el_from_gradient(const Eigen::ArrayXd& u, const ComponentData& cd,
                            const Eigen::ArrayXd& grad) const {
        Eigen::ArrayXd pot_phi = Eigen::ArrayXd::Zero(g.n);
        const Eigen::ArrayXd ua = u.abs();
        Eigen::ArrayXd dphi = Eigen::ArrayXd::Zero(g.n);
        for (size_t k = 0; k < cd.coef.size(); ++k) {
            pot_phi += cd.coef[k] * cd.pots[k];
            dphi += cd.coef[k] * cd.expo[k] * ua.pow(cd.expo[k] - 1.0);
        }
        const double scale = std::max(
            {(pot_phi * dphi).abs().maxCoeff(), fc.mass_weight * u.abs().maxCoeff(), 1e-300});
        const Eigen::ArrayXd res = grad / g.weights;
        double sup = 0.0;
        for (int i = 0; i + 1 < g.n; ++i) sup = std::max(sup, std::abs(res[i]));
        return sup / scale;
    }

    Eigen::ArrayXd project(const Eigen::ArrayXd& u) const {
        const ComponentData cd = assemble_components(op, fc, u);
        return nehari_scale_value(fc, cd) * u;
    }
};

} // namespace

GroundState solve_ground_state(const RieszOperator& op, const ProblemParams& params,
                               const NonlinearitySpec& spec, const SolveConfig& config,
                               Frame frame) {
    const auto fc = make_frame_coefficients(params, spec, frame);
    SolveContext ctx(op, fc);
    const auto& g = *op.grid;
    const int n = g.n;

    Eigen::ArrayXd u;
    switch (config.init) {
        case InitKind::ScaledExtremal:
            u = (1.0 / (1.0 + g.nodes.square())).pow(g.N / 2.0);
            break;
        case InitKind::Gaussian:
            u = (-g.nodes.square() / 2.0).exp();
            break;
        case InitKind::WarmStart:
            if (!config.warm_start || config.warm_start->grid->n != n)
                throw std::invalid_argument("solver: warm start field missing or on the wrong grid");
            u = config.warm_start->values.max(0.0);
            break;
    }

    // the non-attained bound is meaningful in the unit-mass frames
    const bool watch_vanish = (frame == Frame::VFrame || frame == Frame::WFrame);
    const double m0 = watch_vanish ? m0_tilde(params.N, params.alpha) : 0.0;

    GroundState out;
    out.eps = params.eps;
    out.frame = frame;
    out.status = SolveStatus::MaxIter;

    u = ctx.project(u);
    ComponentData cd = assemble_components(op, fc, u);
    double J = action_value(fc, cd);
    double step = config.step;
    int it = 0;
    int vanish_count = 0;
    double elr = 0.0, nres = 0.0;

    auto vanish_check = [&](double Jcur) -> bool {
        if (u.abs().maxCoeff() < config.vanish_threshold) return true;
        if (!watch_vanish) return false;
        if (std::abs(Jcur - m0) > config.vanish_energy_margin * m0) {
            vanish_count = 0;
            return false;
        }
        const double tail =
            (g.weights * u * u * (g.nodes > 0.5 * g.r_max).cast<double>()).sum() / cd.l2;
        const double rh = half_mass_radius(g, u);
        if (tail > config.vanish_tail_fraction || rh > 0.05 * g.r_max) {
            if (++vanish_count > 10) return true;
        } else {
            vanish_count = 0;
        }
        return false;
    };

    auto current_elr = [&]() {
        const Eigen::ArrayXd grad = ctx.gradient(u, cd);
        return ctx.el_from_gradient(u, cd, grad);
    };

    auto converged_now = [&]() {
        elr = current_elr();
        nres = nehari_residual_value(fc, cd);
        return elr <= config.tol_el && std::abs(nres) <= config.tol_manifold;
    };

    // alternate bounded descent bursts (globalization, vanishing detection) with
    // safeguarded Anderson-accelerated fixed-point phases (local convergence)
    bool done = false;
    int descent_budget = 15;
    while (!done && it < config.max_iter) {
        // ---- descent phase -------------------------------------------------
        bool stalled = false;
        for (int k = 0; k < descent_budget && it < config.max_iter; ++k, ++it) {
            Eigen::ArrayXd grad = ctx.gradient(u, cd);
            elr = ctx.el_from_gradient(u, cd, grad);
            nres = nehari_residual_value(fc, cd);
            if (elr <= config.tol_el && std::abs(nres) <= config.tol_manifold) {
                out.status = SolveStatus::Converged;
                done = true;
                break;
            }
            if (elr <= config.descent_switch) break;
            if (vanish_check(J)) {
                out.status = SolveStatus::VanishingDetected;
                done = true;
                break;
            }
            Eigen::VectorXd d = ctx.helm.solve(grad.matrix());
            double slope = grad.matrix().dot(d);
            if (slope <= 0.0) {
                d = (grad / g.weights).matrix();
                slope = grad.matrix().dot(d);
            }
            bool accepted = false;
            double st = step;
            for (int ls = 0; ls < 60; ++ls) {
                Eigen::ArrayXd cand = (u - st * d.array()).max(0.0);
                if (cand.abs().maxCoeff() > 0.0) {
                    ComponentData cc = assemble_components(op, fc, cand);
                    const double tc = nehari_scale_value(fc, cc);
                    Eigen::ArrayXd proj = tc * cand;
                    ComponentData cp = assemble_components(op, fc, proj);
                    const double Jc = action_value(fc, cp);
                    if (Jc <= J - 1e-4 * st * slope + 1e-14 * std::abs(J)) {
                        u = std::move(proj);
                        cd = std::move(cp);
                        J = Jc;
                        accepted = true;
                        break;
                    }
                }
                st *= 0.5;
            }
            if (!accepted) {
                stalled = true;
                break;
            }
            step = std::min(st * 2.0, 4.0);
        }
        if (done) break;
        descent_budget = 40;

        // ---- Anderson-accelerated fixed-point phase -------------------------
        const int depth = 3;
        std::deque<Eigen::VectorXd> us, fs;
        auto residual_of = [&](const Eigen::ArrayXd& v, ComponentData& cdv) {
            cdv = assemble_components(op, fc, v);
            const Eigen::ArrayXd grad = ctx.gradient(v, cdv);
            return ctx.el_from_gradient(v, cdv, grad);
        };
        auto picard = [&](const Eigen::ArrayXd& v, const ComponentData& cdv) {
            Eigen::ArrayXd pot_phi = Eigen::ArrayXd::Zero(n);
            Eigen::ArrayXd dphi = Eigen::ArrayXd::Zero(n);
            const Eigen::ArrayXd va = v.abs();
            for (size_t k = 0; k < cdv.coef.size(); ++k) {
                pot_phi += cdv.coef[k] * cdv.pots[k];
                dphi += cdv.coef[k] * cdv.expo[k] * va.pow(cdv.expo[k] - 1.0);
            }
            return Eigen::ArrayXd(
                ctx.helm.solve((g.weights * pot_phi * dphi).matrix()).array().max(0.0));
        };
        elr = current_elr();
        Eigen::ArrayXd best_u = u;
        ComponentData best_cd = cd;
        double best_elr = elr;
        int bad_steps = 0;
        for (int k = 0; k < 150 && it < config.max_iter; ++k, ++it) {
            Eigen::ArrayXd tu = picard(u, cd);
            if (!(tu.abs().maxCoeff() > 0.0)) {
                out.status = SolveStatus::VanishingDetected;
                done = true;
                break;
            }
            tu = ctx.project(tu);
            ComponentData ct;
            const double elr_t = residual_of(tu, ct);
            const Eigen::VectorXd f = (tu - u).matrix();
            us.push_back(u.matrix());
            fs.push_back(f);
            if (static_cast<int>(us.size()) > depth + 1) {
                us.pop_front();
                fs.pop_front();
            }
            Eigen::ArrayXd next = tu;
            ComponentData cn = std::move(ct);
            double elr_n = elr_t;
            const int mk = static_cast<int>(us.size()) - 1;
            if (mk >= 1 && std::isfinite(elr_t)) {
                Eigen::MatrixXd dF(n, mk), dU(n, mk);
                for (int kk = 0; kk < mk; ++kk) {
                    dF.col(kk) = fs[kk + 1] - fs[kk];
                    dU.col(kk) = us[kk + 1] - us[kk];
                }
                Eigen::MatrixXd ata = dF.transpose() * dF;
                ata.diagonal().array() += 1e-10 * (ata.trace() + 1e-300);
                const Eigen::VectorXd gamma = ata.ldlt().solve(dF.transpose() * f);
                if (gamma.allFinite() && gamma.norm() < 1e6) {
                    Eigen::ArrayXd acc = (tu - ((dU + dF) * gamma).array()).max(0.0);
                    if (acc.abs().maxCoeff() > 0.0) {
                        acc = ctx.project(acc);
                        ComponentData ca;
                        const double elr_a = residual_of(acc, ca);
                        if (std::isfinite(elr_a) && elr_a < elr_t) {
                            next = std::move(acc);
                            cn = std::move(ca);
                            elr_n = elr_a;
                        }
                    }
                }
            }
            u = std::move(next);
            cd = std::move(cn);
            elr = elr_n;
            nres = nehari_residual_value(fc, cd);
            J = action_value(fc, cd);
            if (elr <= config.tol_el && std::abs(nres) <= config.tol_manifold) {
                out.status = SolveStatus::Converged;
                done = true;
                break;
            }
            if (vanish_check(J)) {
                out.status = SolveStatus::VanishingDetected;
                done = true;
                break;
            }
            if (elr < best_elr) {
                best_elr = elr;
                best_u = u;
                best_cd = cd;
                bad_steps = 0;
            } else if (++bad_steps >= 8) {
                break; // hand back to descent from the best state seen
            }
        }
        if (!done && best_elr < elr) {
            u = best_u;
            cd = best_cd;
            elr = best_elr;
            J = action_value(fc, cd);
        }
        if (!done && stalled && elr > config.descent_switch && bad_steps >= 8) {
            // neither phase is moving; accept the best iterate as the final answer
            break;
        }
    }

    out.u = Field(op.grid, u);
    out.iterations = it;
    out.energy = J;
    out.residuals.euler_lagrange = elr;
    out.residuals.nehari = nres;
    out.residuals.pohozaev = pohozaev_residual_value(fc, cd, params.N, params.alpha);
    out.half_mass_radius = half_mass_radius(g, u);
    // norms and cross pairings of the returned iterate
    out.norms.l2_sq = cd.l2;
    out.norms.grad_sq = cd.kinetic_q;
    out.norms.linf = std::max(linf_extrapolated(out.u), u.maxCoeff());
    {
        const double p = lower_critical(params.N, params.alpha);
        const Eigen::ArrayXd up = u.abs().pow(p);
        const Eigen::ArrayXd pot = apply(op, up);
        out.norms.d_value = (g.weights * pot * up).sum();
        for (const auto& t : spec.terms)
            out.norms.cross.push_back((g.weights * pot * u.abs().pow(t.exponent)).sum());
    }
    return out;
}

GroundState solve_ground_state(const ProblemParams& params, const NonlinearitySpec& spec,
                               const SolveConfig& config, Frame frame) {
    auto grid = make_grid(params.N, config.r_max, config.grid_n, config.stretching);
    auto op = build_operator(grid, params.alpha);
    return solve_ground_state(op, params, spec, config, frame);
}

LargeEpsLimitResult solve_large_eps_limit(const RieszOperator& op, const ProblemParams& params,
                                          const NonlinearitySpec& spec,
                                          const SolveConfig& config) {
    LargeEpsLimitResult res;
    SolveConfig cfg = config;
    if (cfg.init == InitKind::ScaledExtremal && !cfg.warm_start) cfg.init = InitKind::Gaussian;
    res.state = solve_ground_state(op, params, spec, cfg, Frame::LargeEpsLimit);
    const double r = spec.r_max();
    const auto& g = *op.grid;
    const Eigen::ArrayXd& w = res.state.u.values;
    const Eigen::ArrayXd wr = w.abs().pow(r);
    const double pr = (g.weights * apply(op, wr) * wr).sum();
    const double h1 = res.state.norms.grad_sq + res.state.norms.l2_sq;
    res.s_r = h1 / std::pow(pr, 1.0 / r);
    return res;
}

} // namespace choq
