#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "choq/experiments.hpp"

namespace choq {

namespace {

struct Reporter {
    std::ostream& log;
    int failures = 0;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void start() { t0 = std::chrono::steady_clock::now(); }
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    void criterion(int idx, const std::string& name, bool pass, const std::string& detail) {
        log << "criterion " << idx << " [" << (pass ? "PASS" : "FAIL") << "] " << name << " ("
            << std::fixed << std::setprecision(1) << elapsed() << " s): " << detail << "\n"
            << std::defaultfloat << std::setprecision(6);
        if (!pass) ++failures;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

bool within(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

} // namespace

int run_verification(std::ostream& log, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Reporter rep{log};
    const int N = 3;
    const double alpha = 2.0;
    const double S = s_alpha(N, alpha);
    const double m0 = m0_tilde(N, alpha);
    const double p = lower_critical(N, alpha);

    NonlinearitySpec spec_q2;
    spec_q2.terms.push_back({1.0, 2.0});

    // shared production grid for criteria 1, 2, 4, 5 and the dilation identities of 8
    rep.start();
    auto gridA = make_grid(N, 200.0, 2500, Stretching{2.0});
    auto opA = build_operator(gridA, alpha);
    log << "# production grid n=2500 r_max=200 built in " << fmt(rep.elapsed()) << " s\n";

    // ---- criterion 1: sharp-constant closure --------------------------------
    rep.start();
    try {
        Field shape(gridA, (1.0 + gridA->nodes.square()).pow(-1.5));
        const double l2 = (gridA->weights * shape.values.square()).sum();
        const double D = d_value(opA, shape);
        const double quot = l2 / std::pow(D, static_cast<double>(N) / (N + alpha));
        const bool closure_ok = within(quot, S, 5e-3);
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> uni(0.3, 3.0);
        double worst = 1e300;
        for (int t = 0; t < 200; ++t) {
            const double a1 = uni(rng), a2 = uni(rng), a3 = uni(rng), c = uni(rng);
            Eigen::ArrayXd f = a1 * (-a2 * gridA->nodes.square()).exp() +
                               a3 * (1.0 + gridA->nodes.square()).pow(-2.0) *
                                   (-(gridA->nodes - c).square() / 2.0).exp();
            Field ff(gridA, f);
            const double q = (gridA->weights * f.square()).sum() /
                             std::pow(d_value(opA, ff), static_cast<double>(N) / (N + alpha));
            worst = std::min(worst, q);
        }
        const bool floor_ok = worst >= S * (1.0 - 2e-3);
        rep.criterion(1, "sharp-constant closure", closure_ok && floor_ok && rep.elapsed() < 60.0,
                      "quotient=" + fmt(quot) + " closed-form=" + fmt(S) +
                          " rel=" + fmt(quot / S - 1.0) + "; min trial quotient=" + fmt(worst) +
                          " floor=" + fmt(S * (1.0 - 2e-3)));
    } catch (const std::exception& e) {
        rep.criterion(1, "sharp-constant closure", false, e.what());
    }

    // ---- criterion 2: extremal calibration ----------------------------------
    rep.start();
    ExtremalCalibration cal;
    try {
        cal = calibrate_extremal(gridA, opA);
        Field W1 = sample_w(gridA, 1.0, cal.amplitude);
        const double tw = tau(W1, opA).tau;
        bool rho_ok = true;
        std::string rhomsg;
        ProblemParams pp{N, alpha, 1.0};
        for (double rho : {0.5, 1.0, 2.0}) {
            Field W = sample_w(gridA, rho, cal.amplitude);
            const auto eb = action(W, pp, spec_q2, Frame::Limit, opA);
            rho_ok = rho_ok && within(eb.total, m0, 5e-3);
            rhomsg += " J0(W_" + fmt(rho) + ")=" + fmt(eb.total);
        }
        const bool ok = cal.residual <= 1e-4 && within(tw, 1.0, 5e-3) && rho_ok;
        rep.criterion(2, "extremal calibration", ok && rep.elapsed() < 60.0,
                      "A=" + fmt(cal.amplitude) + " residual=" + fmt(cal.residual) +
                          " tau(W1)=" + fmt(tw) + rhomsg + " m0=" + fmt(m0));
    } catch (const std::exception& e) {
        rep.criterion(2, "extremal calibration", false, e.what());
    }

    // ---- criterion 3: solution identities at eps = 1 -------------------------
    rep.start();
    try {
        // the ground state has an |x|^{-N} tail, so the Pohozaev check needs a
        // larger truncation radius than the default desk scale
        auto gridB = make_grid(N, 400.0, 3000, Stretching{2.0});
        auto opB = build_operator(gridB, alpha);
        ProblemParams pp{N, alpha, 1.0};
        SolveConfig sc;
        const double build_time = rep.elapsed();
        rep.start();
        GroundState gs = solve_ground_state(opB, pp, spec_q2, sc, Frame::Original);
        const bool conv = gs.status == SolveStatus::Converged;
        const bool resid_ok = std::abs(gs.residuals.nehari) <= 1e-10 &&
                              std::abs(gs.residuals.pohozaev) <= 1e-6 &&
                              gs.residuals.euler_lagrange <= 1e-8;
        const bool pos = (gs.u.values >= 0.0).all();
        bool monotone = true;
        for (int i = 0; i + 1 < gridB->n; ++i)
            monotone = monotone && (gs.u.values[i + 1] <= gs.u.values[i] + 1e-12);
        rep.criterion(3, "solution identities (eps=1, q=2)",
                      conv && resid_ok && pos && monotone && rep.elapsed() < 30.0,
                      "status=" + std::string(conv ? "Converged" : "not converged") +
                          " nehari=" + fmt(gs.residuals.nehari) +
                          " pohozaev=" + fmt(gs.residuals.pohozaev) +
                          " el=" + fmt(gs.residuals.euler_lagrange) + " it=" +
                          std::to_string(gs.iterations) + " (solve " + fmt(rep.elapsed()) +
                          " s, kernel " + fmt(build_time) + " s)");
    } catch (const std::exception& e) {
        rep.criterion(3, "solution identities", false, e.what());
    }

    // ---- criteria 4 + 5: small-eps scaling laws and limit profile -----------
    rep.start();
    SweepResult sw_small;
    bool have_small = false;
    try {
        std::vector<double> eps_list;
        for (int i = 0; i < 20; ++i) eps_list.push_back(std::pow(10.0, -1.0 - 2.0 * i / 19.0));
        SolveConfig sc;
        sw_small = sweep(opA, ProblemParams{N, alpha, 1.0}, spec_q2, eps_list, sc, Frame::WFrame);
        have_small = true;
        int conv = 0;
        for (const auto& e : sw_small.entries)
            if (e.state.status == SolveStatus::Converged) ++conv;

        const auto f_linf = fit_exponent(sw_small, Quantity::LinfU);
        const auto f_grad = fit_exponent(sw_small, Quantity::GradSqU);
        const auto f_mass = fit_exponent(sw_small, Quantity::MassU);
        const auto f_dval = fit_exponent(sw_small, Quantity::DValueU);
        const auto f_gap = fit_exponent(sw_small, Quantity::EnergyGap);
        // intercept measured on the asymptotic tail (six smallest eps)
        const auto f_mass_tail = fit_exponent(sw_small, Quantity::MassU, FitWindow{14, 20});
        const double K0 = std::pow(3.0 / 5.0, 1.5) * std::pow(S, 2.5);
        const bool ok = conv == 20 && within(f_linf.fitted_slope, 2.0, 0.05) &&
                        within(f_grad.fitted_slope, 19.0 / 6.0, 0.05) &&
                        within(f_mass.fitted_slope, 1.5, 0.03) &&
                        within(f_mass_tail.constrained_intercept, K0, 0.02) &&
                        within(f_dval.fitted_slope, 2.5, 0.05) &&
                        within(f_gap.fitted_slope, 2.0 / 3.0, 0.10);
        rep.criterion(4, "eps->0 scaling laws (Theorem-1.2 family)", ok && rep.elapsed() < 900.0,
                      "converged=" + std::to_string(conv) + "/20 slopes: linf=" +
                          fmt(f_linf.fitted_slope) + " grad=" + fmt(f_grad.fitted_slope) +
                          " mass=" + fmt(f_mass.fitted_slope) + " D=" + fmt(f_dval.fitted_slope) +
                          " gap=" + fmt(f_gap.fitted_slope) + " mass-intercept=" +
                          fmt(f_mass_tail.constrained_intercept) + " (expect " + fmt(K0) + ")");
    } catch (const std::exception& e) {
        rep.criterion(4, "eps->0 scaling laws", false, e.what());
    }

    rep.start();
    try {
        if (!have_small) throw std::runtime_error("small sweep unavailable");
        const auto lp = limit_profile(opA, sw_small, cal);
        const auto f_tau = fit_exponent(sw_small, Quantity::TauDev);
        const double sig = 2.0 / 3.0;
        bool h1_decreasing = true;
        for (size_t i = 0; i + 1 < lp.h1_errors.size(); ++i)
            h1_decreasing = h1_decreasing && (lp.h1_errors[i + 1] <= lp.h1_errors[i] + 1e-10);
        bool bands_ok = true;
        for (const auto& b : lp.band_quantities)
            for (double v : b) bands_ok = bands_ok && v >= 0.1 && v <= 10.0;
        const bool ok = f_tau.fitted_slope >= 0.8 * sig && h1_decreasing &&
                        lp.h1_errors.back() <= 0.05 && lp.lemma42_defect.back() <= 0.05 &&
                        bands_ok;
        rep.criterion(5, "limit profile (rescaled convergence to the extremal)", ok,
                      "tau-slope=" + fmt(f_tau.fitted_slope) + " (need >= " + fmt(0.8 * sig) +
                          ") h1-final=" + fmt(lp.h1_errors.back()) +
                          " h1-monotone=" + (h1_decreasing ? "yes" : "no") +
                          " gradient-identity-defect=" + fmt(lp.lemma42_defect.back()) +
                          " rho0=" + fmt(lp.rho0_predicted));
        // artifact CSV
        std::ofstream os(out_dir + "/acceptance_limit_profile.csv");
        os << "# eps,xi,h1_error,tau,gap,defect\n";
        for (size_t i = 0; i < lp.eps.size(); ++i)
            os << lp.eps[i] << ',' << lp.xi_eps[i] << ',' << lp.h1_errors[i] << ','
               << lp.tau_values[i] << ',' << lp.gap_values[i] << ',' << lp.lemma42_defect[i]
               << '\n';
    } catch (const std::exception& e) {
        rep.criterion(5, "limit profile", false, e.what());
    }

    // ---- criterion 6: threshold (q = 3.5) ------------------------------------
    rep.start();
    try {
        NonlinearitySpec spec_thr;
        spec_thr.terms.push_back({1.0, 3.5});
        // the spreading family below threshold needs a large domain before its
        // energy pins to the non-attained bound within 1e-3
        auto gridC = make_grid(N, 1400.0, 4096, Stretching{2.0});
        auto opC = build_operator(gridC, alpha);
        SolveConfig sc;
        sc.max_iter = 4000;
        const auto tr = threshold_find(opC, ProblemParams{N, alpha, 1.0}, spec_thr, 1e-3, 1e3,
                                       0.1, sc);
        const bool width_ok = tr.hi / tr.lo - 1.0 <= 0.10001;
        // spot checks
        ProblemParams pb{N, alpha, tr.lo / 2.0};
        GroundState below = solve_ground_state(opC, pb, spec_thr, sc, Frame::VFrame);
        const bool below_ok = below.status == SolveStatus::VanishingDetected ||
                              std::abs(below.energy - m0) <= 1e-3 * m0;
        ProblemParams pa{N, alpha, 2.0 * tr.hi};
        GroundState above = solve_ground_state(opC, pa, spec_thr, sc, Frame::VFrame);
        const bool above_ok =
            above.status == SolveStatus::Converged && above.energy < m0 - 1e-3 * m0;
        bool mono = true;
        for (size_t i = 0; i + 1 < tr.m_curve.size(); ++i)
            mono = mono && (tr.m_curve[i + 1].second <= tr.m_curve[i].second + 1e-6);
        rep.criterion(6, "threshold detection (q=3.5)",
                      width_ok && below_ok && above_ok && mono && rep.elapsed() < 1200.0,
                      "eps_q in [" + fmt(tr.lo) + ", " + fmt(tr.hi) + "] (reported, not asserted); "
                          "below: status=" +
                          (below.status == SolveStatus::VanishingDetected ? "Vanishing" : "other") +
                          " |J-m0|/m0=" + fmt(std::abs(below.energy - m0) / m0) +
                          "; above: J=" + fmt(above.energy) + " < m0-delta=" +
                          fmt(m0 - 1e-3 * m0) + "; m-curve monotone=" + (mono ? "yes" : "no"));
        std::ofstream os(out_dir + "/acceptance_threshold.csv");
        os << "# eps,m_eps\n";
        for (const auto& [e, m] : tr.m_curve) os << e << ',' << m << '\n';
    } catch (const std::exception& e) {
        rep.criterion(6, "threshold detection", false, e.what());
    }

    // ---- criterion 7: eps->infinity asymptotics (r = 2) -----------------------
    rep.start();
    auto gridD = make_grid(N, 80.0, 2000, Stretching{2.0});
    auto opD = build_operator(gridD, alpha);
    try {
        std::vector<double> eps_list;
        for (int i = 0; i < 15; ++i) eps_list.push_back(std::pow(10.0, 1.0 + 2.0 * i / 14.0));
        SolveConfig sc;
        SweepResult sw =
            sweep(opD, ProblemParams{N, alpha, 1.0}, spec_q2, eps_list, sc, Frame::LargeEps);
        const auto la = large_eps_analysis(opD, sw, spec_q2, sc);
        const bool ok = within(la.energy.fitted_slope, 1.5, 0.05) &&
                        within(la.mass.fitted_slope, 0.5, 0.05) &&
                        within(la.grad.fitted_slope, 1.5, 0.05) &&
                        within(la.linf.fitted_slope, 1.0, 0.05) && la.h1_dist_at_largest <= 0.05;
        rep.criterion(
            7, "eps->infinity asymptotics (Theorem-5.1 family, r=2)", ok,
            "slopes: I=" + fmt(la.energy.fitted_slope) + " (want 1.5) mass=" +
                fmt(la.mass.fitted_slope) + " (0.5) grad=" + fmt(la.grad.fitted_slope) +
                " (1.5) linf=" + fmt(la.linf.fitted_slope) + " (1.0); H1-dist@1e3=" +
                fmt(la.h1_dist_at_largest) + " S_r=" + fmt(la.s_r) +
                "  [finite-eps crossover: the critical admixture decays like eps^{-1/3}]");
    } catch (const std::exception& e) {
        rep.criterion(7, "eps->infinity asymptotics", false, e.what());
    }

    // ---- criterion 8: operator unit oracle ------------------------------------
    rep.start();
    try {
        auto gridE = make_grid(N, 2.5, 4000, Stretching{1.0});
        auto opE = build_operator(gridE, alpha);
        // uniform ball, interface node at r = 1 carries the half value
        Eigen::ArrayXd f(gridE->n);
        for (int i = 0; i < gridE->n; ++i) {
            const double r = gridE->nodes[i];
            f[i] = (std::abs(r - 1.0) < 1e-12) ? 0.5 : (r < 1.0 ? 1.0 : 0.0);
        }
        const Eigen::ArrayXd pot = apply(opE, f);
        double worst_away = 0.0, worst_near = 0.0;
        for (int i = 0; i < gridE->n; ++i) {
            const double r = gridE->nodes[i];
            const double exact = (r <= 1.0) ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r);
            const double rel = std::abs(pot[i] - exact) / exact;
            if (std::abs(r - 1.0) > 0.1)
                worst_away = std::max(worst_away, rel);
            else
                worst_near = std::max(worst_near, rel);
        }
        // pairing-form symmetry
        double max_m = 0.0, max_asym = 0.0;
        for (int i = 0; i < gridE->n; i += 7)
            for (int j = 0; j < gridE->n; j += 7) {
                const double mij = gridE->weights[i] * opE.kernel(i, j);
                const double mji = gridE->weights[j] * opE.kernel(j, i);
                max_m = std::max(max_m, std::abs(mij));
                max_asym = std::max(max_asym, std::abs(mij - mji));
            }
        const double asym = max_asym / max_m;
        // homogeneity and dilation identities on the production grid
        Field u(gridA, (-gridA->nodes.square() / 2.0).exp());
        const double Du = d_value(opA, u);
        Field u3(gridA, 3.0 * u.values);
        const double hom =
            std::abs(d_value(opA, u3) / (std::pow(3.0, 2.0 * p) * Du) - 1.0);
        const auto tv = tau(u, opA);
        Field u2(gridA, 2.0 * u.values);
        const double tau_hom =
            std::abs(tau(u2, opA).tau / (std::pow(2.0, -2.0 * alpha / N) * tv.tau) - 1.0);
        Field uproj(gridA, std::pow(tv.tau, N / (2.0 * alpha)) * u.values);
        const double tau_proj = std::abs(tau(uproj, opA).tau - 1.0);
        const double t = 1.37;
        Field ut = dilate(u, t);
        const auto nu = norms(u, 1.0);
        const auto nut = norms(ut, 1.0);
        const double dil_l2 = std::abs(nut.l2_sq / (std::pow(t, N) * nu.l2_sq) - 1.0);
        const double dil_D = std::abs(d_value(opA, ut) / (std::pow(t, N + alpha) * Du) - 1.0);
        const bool ok = worst_away <= 1e-6 && worst_near <= 1e-4 && asym <= 1e-10 &&
                        hom <= 1e-10 && tau_hom <= 1e-10 && tau_proj <= 1e-10 &&
                        dil_l2 <= 1e-6 && dil_D <= 1e-6;
        rep.criterion(8, "operator unit oracle", ok && rep.elapsed() < 60.0,
                      "ball: away=" + fmt(worst_away) + " near=" + fmt(worst_near) +
                          "; form-asymmetry=" + fmt(asym) + "; D-homogeneity=" + fmt(hom) +
                          " tau-homogeneity=" + fmt(tau_hom) + " tau-projection=" + fmt(tau_proj) +
                          "; dilation l2=" + fmt(dil_l2) + " D=" + fmt(dil_D));
    } catch (const std::exception& e) {
        rep.criterion(8, "operator unit oracle", false, e.what());
    }

    // ---- criterion 9: mass-curve regimes --------------------------------------
    rep.start();
    try {
        if (!have_small) throw std::runtime_error("small sweep unavailable");
        const auto f_mass = fit_exponent(sw_small, Quantity::MassU);
        SolveConfig sc;
        std::vector<double> large2, large3;
        for (int i = 0; i < 8; ++i) large2.push_back(std::pow(10.0, 4.0 + 2.0 * i / 7.0));
        for (int i = 0; i < 8; ++i) large3.push_back(std::pow(10.0, 2.0 + 2.0 * i / 7.0));
        SweepResult sw2 =
            sweep(opD, ProblemParams{N, alpha, 1.0}, spec_q2, large2, sc, Frame::LargeEps);
        NonlinearitySpec spec_r3;
        spec_r3.terms.push_back({1.0, 3.0});
        SweepResult sw3 =
            sweep(opD, ProblemParams{N, alpha, 1.0}, spec_r3, large3, sc, Frame::LargeEps);
        const auto f2 = fit_exponent(sw2, Quantity::LargeEpsMass);
        const auto f3 = fit_exponent(sw3, Quantity::LargeEpsMass);
        const auto mc2 = mass_curve(sw_small, sw2);
        const bool pattern_ok = mc2.slope_signs.front() > 0 && mc2.slope_signs.back() > 0 &&
                                f3.fitted_slope < 0.0;
        const bool ok = within(f_mass.fitted_slope, 1.5, 0.05) &&
                        within(f2.fitted_slope, 0.5, 0.10) &&
                        within(f3.fitted_slope, -0.5, 0.10) && pattern_ok;
        rep.criterion(9, "mass-curve regimes", ok,
                      "small slope=" + fmt(f_mass.fitted_slope) + " (1.5); large r=2 slope=" +
                          fmt(f2.fitted_slope) + " (+0.5); large r=3 slope=" +
                          fmt(f3.fitted_slope) + " (-0.5); limit pattern M(0)=0, M(inf) per row " +
                          (pattern_ok ? "matches" : "differs"));
    } catch (const std::exception& e) {
        rep.criterion(9, "mass-curve regimes", false, e.what());
    }

    log << (rep.failures == 0 ? "acceptance: all criteria passed\n"
                              : "acceptance: " + std::to_string(rep.failures) +
                                    " criterion(s) failed\n");
    return rep.failures;
}

} // namespace choq
