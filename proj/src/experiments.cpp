#include "choq/experiments.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace choq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

uint64_t fnv1a_str(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIter: return "MaxIter";
        case SolveStatus::VanishingDetected: return "VanishingDetected";
    }
    return "?";
}

SolveStatus status_from(const std::string& s) {
    if (s == "Converged") return SolveStatus::Converged;
    if (s == "VanishingDetected") return SolveStatus::VanishingDetected;
    return SolveStatus::MaxIter;
}

std::string frame_name(Frame f) {
    switch (f) {
        case Frame::Original: return "original";
        case Frame::VFrame: return "v";
        case Frame::WFrame: return "w";
        case Frame::Limit: return "limit";
        case Frame::LargeEps: return "large";
        case Frame::LargeEpsLimit: return "large-limit";
    }
    return "?";
}

Frame frame_from(const std::string& s) {
    if (s == "original") return Frame::Original;
    if (s == "v") return Frame::VFrame;
    if (s == "w") return Frame::WFrame;
    if (s == "limit") return Frame::Limit;
    if (s == "large") return Frame::LargeEps;
    if (s == "large-limit") return Frame::LargeEpsLimit;
    throw std::invalid_argument("unknown frame name: " + s);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i)
        out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i /
                               std::max(1, count - 1)));
    return out;
}

const char* kSweepCsvHeader =
    "# choq sweep csv, column contract v1\n"
    "# eps,status,iterations,frame_energy,u_l2_sq,u_grad_sq,u_linf,u_d_value,u_energy,"
    "u_half_mass,tau,res_el,res_nehari,res_pohozaev\n";

void write_sweep_csv(const SweepResult& sw, const std::string& path) {
    std::ofstream os(path);
    os << kSweepCsvHeader;
    for (const auto& e : sw.entries) {
        os << shortest(e.eps) << ',' << status_name(e.state.status) << ','
           << e.state.iterations << ',' << shortest(e.frame_energy) << ','
           << shortest(e.u_l2_sq) << ',' << shortest(e.u_grad_sq) << ',' << shortest(e.u_linf)
           << ',' << shortest(e.u_d_value) << ',' << shortest(e.u_energy) << ','
           << shortest(e.u_half_mass_radius) << ',' << shortest(e.tau_value) << ','
           << shortest(e.state.residuals.euler_lagrange) << ','
           << shortest(e.state.residuals.nehari) << ','
           << shortest(e.state.residuals.pohozaev) << '\n';
    }
}

void print_fit(std::ostream& os, const std::string& name, const ExponentFit& f) {
    const double dev = (f.predicted_slope != 0.0)
                           ? f.fitted_slope / f.predicted_slope - 1.0
                           : f.fitted_slope;
    os << "fit." << name << ".fitted_slope = " << shortest(f.fitted_slope) << "\n"
       << "fit." << name << ".predicted_slope = " << shortest(f.predicted_slope) << "\n"
       << "fit." << name << ".rel_deviation = " << shortest(dev) << "\n"
       << "fit." << name << ".r_squared = " << shortest(f.r_squared) << "\n";
}

} // namespace

void ExperimentConfig::validate() const {
    ProblemParams p{N, alpha, eps > 0 ? eps : 1.0};
    p.validate();
    if (kind != "constants") spec.validate(p);
    if (n < 16) throw std::invalid_argument("grid.n: must be >= 16");
    if (!(r_max > 0)) throw std::invalid_argument("grid.r_max: must be positive");
    if (!(gamma >= 1.0)) throw std::invalid_argument("grid.gamma: must be >= 1");
    if (!(tol_el > 0) || !(tol_manifold > 0))
        throw std::invalid_argument("solver tolerances must be positive");
    if (max_iter < 1) throw std::invalid_argument("solver.max_iter: must be >= 1");
    static const char* kinds[] = {"constants", "solve",     "sweep",      "threshold",
                                  "limit-profile", "large-eps", "mass-curve", "verify"};
    bool ok = false;
    for (auto* k : kinds) ok = ok || kind == k;
    if (!ok) throw std::invalid_argument("experiment.kind: unknown kind '" + kind + "'");
    if (kind == "sweep" || kind == "limit-profile" || kind == "large-eps") {
        if (!(eps_min > 0 && eps_max > eps_min))
            throw std::invalid_argument("experiment: need 0 < eps_min < eps_max");
        if (eps_count < 4) throw std::invalid_argument("experiment.eps_count: must be >= 4");
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    if (j.contains("problem")) {
        const auto& p = j["problem"];
        cfg.N = p.value("N", cfg.N);
        cfg.alpha = p.value("alpha", cfg.alpha);
    }
    if (j.contains("nonlinearity")) {
        for (const auto& t : j["nonlinearity"])
            cfg.spec.terms.push_back({t.value("coeff", 0.0), t.value("exponent", 0.0)});
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        cfg.n = g.value("n", cfg.n);
        cfg.r_max = g.value("r_max", cfg.r_max);
        cfg.gamma = g.value("gamma", cfg.gamma);
        if (g.value("stretching", "") == std::string("uniform")) cfg.gamma = 1.0;
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        cfg.tol_el = s.value("tol_el", cfg.tol_el);
        cfg.tol_manifold = s.value("tol_manifold", cfg.tol_manifold);
        cfg.max_iter = s.value("max_iter", cfg.max_iter);
    }
    if (j.contains("experiment")) {
        const auto& e = j["experiment"];
        cfg.kind = e.value("kind", cfg.kind);
        cfg.eps = e.value("eps", cfg.eps);
        cfg.eps_min = e.value("eps_min", cfg.eps_min);
        cfg.eps_max = e.value("eps_max", cfg.eps_max);
        cfg.eps_count = e.value("eps_count", cfg.eps_count);
        cfg.frame = e.value("frame", cfg.frame);
        if (e.contains("bracket")) {
            cfg.bracket_lo = e["bracket"][0].get<double>();
            cfg.bracket_hi = e["bracket"][1].get<double>();
        }
        cfg.bracket_rel_tol = e.value("bracket_rel_tol", cfg.bracket_rel_tol);
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        cfg.out_dir = o.value("directory", cfg.out_dir);
        cfg.use_cache = o.value("cache", cfg.use_cache);
        if (o.contains("cache_dir")) cfg.cache_dir = o["cache_dir"].get<std::string>();
    }
    return cfg;
}

std::string cache_key(const ProblemParams& params, const NonlinearitySpec& spec,
                      const RadialGrid& grid, const SolveConfig& config, Frame frame) {
    std::ostringstream os;
    os << "N=" << params.N << ";alpha=" << shortest(params.alpha) << ";eps=" << shortest(params.eps)
       << ";terms=";
    for (const auto& t : spec.terms) os << shortest(t.coeff) << ':' << shortest(t.exponent) << ',';
    os << ";grid=" << grid.n << ',' << shortest(grid.r_max) << ',' << shortest(grid.stretching.gamma)
       << ";tol=" << shortest(config.tol_el) << ',' << shortest(config.tol_manifold)
       << ";maxit=" << config.max_iter << ";frame=" << frame_name(frame);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_str(os.str())));
    return std::string(buf);
}

void cache_store(const std::string& dir, const std::string& key, const GroundState& gs,
                 const ProblemParams& params) {
    fs::create_directories(dir);
    save_field(gs.u, dir + "/" + key + ".field");
    std::ofstream os(dir + "/" + key + ".manifest");
    os << "key = " << key << "\n"
       << "status = " << status_name(gs.status) << "\n"
       << "frame = " << frame_name(gs.frame) << "\n"
       << "eps = " << shortest(params.eps) << "\n"
       << "energy = " << shortest(gs.energy) << "\n"
       << "iterations = " << gs.iterations << "\n"
       << "res_el = " << shortest(gs.residuals.euler_lagrange) << "\n"
       << "res_nehari = " << shortest(gs.residuals.nehari) << "\n"
       << "res_pohozaev = " << shortest(gs.residuals.pohozaev) << "\n"
       << "l2_sq = " << shortest(gs.norms.l2_sq) << "\n"
       << "grad_sq = " << shortest(gs.norms.grad_sq) << "\n"
       << "linf = " << shortest(gs.norms.linf) << "\n"
       << "d_value = " << shortest(gs.norms.d_value) << "\n"
       << "half_mass = " << shortest(gs.half_mass_radius) << "\n";
    for (size_t i = 0; i < gs.norms.cross.size(); ++i)
        os << "cross." << i << " = " << shortest(gs.norms.cross[i]) << "\n";
    os << "field = " << key << ".field\n";
}

std::optional<GroundState> cache_load(const std::string& dir, const std::string& key,
                                      const RieszOperator& op, const ProblemParams& params,
                                      const NonlinearitySpec& spec, Frame frame) {
    const std::string mpath = dir + "/" + key + ".manifest";
    std::ifstream is(mpath);
    if (!is) return std::nullopt;
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        const auto pos = line.find(" = ");
        if (pos == std::string::npos) continue;
        kv[line.substr(0, pos)] = line.substr(pos + 3);
    }
    auto getd = [&](const std::string& k) -> double {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::runtime_error("cache manifest missing " + k);
        return std::stod(it->second);
    };
    try {
        GroundState gs;
        gs.u = load_field(dir + "/" + key + ".field");
        if (gs.u.grid->n != op.grid->n || gs.u.grid->r_max != op.grid->r_max) return std::nullopt;
        gs.u.grid = op.grid; // share the operator's grid instance
        gs.status = status_from(kv["status"]);
        gs.frame = frame;
        gs.eps = params.eps;
        gs.energy = getd("energy");
        gs.iterations = static_cast<int>(getd("iterations"));
        gs.residuals.euler_lagrange = getd("res_el");
        gs.residuals.nehari = getd("res_nehari");
        gs.residuals.pohozaev = getd("res_pohozaev");
        gs.norms.l2_sq = getd("l2_sq");
        gs.norms.grad_sq = getd("grad_sq");
        gs.norms.linf = getd("linf");
        gs.norms.d_value = getd("d_value");
        gs.half_mass_radius = getd("half_mass");
        for (size_t i = 0;; ++i) {
            auto it = kv.find("cross." + std::to_string(i));
            if (it == kv.end()) break;
            gs.norms.cross.push_back(std::stod(it->second));
        }
        // re-verify before reuse: the recomputed Pohozaev residual must reproduce
        const double p = pohozaev_residual(gs.u, params, spec, frame, op);
        if (std::abs(p - gs.residuals.pohozaev) > 1e-10 + 1e-6 * std::abs(p)) return std::nullopt;
        return gs;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

namespace {

struct Workspace {
    ExperimentConfig cfg;
    GridPtr grid;
    RieszOperator op;
    std::string cache_dir;

    explicit Workspace(const ExperimentConfig& c) : cfg(c) {
        grid = make_grid(cfg.N, cfg.r_max, cfg.n, Stretching{cfg.gamma});
        RieszBuildOptions opts;
        opts.threads = cfg.jobs;
        cache_dir = cfg.cache_dir.value_or(cfg.out_dir + "/cache");
        if (cfg.use_cache) {
            fs::create_directories(cache_dir);
            std::ostringstream os;
            os << cache_dir << "/kernel_N" << cfg.N << "_a" << shortest(cfg.alpha) << "_n" << cfg.n
               << "_R" << shortest(cfg.r_max) << "_g" << shortest(cfg.gamma) << ".bin";
            opts.cache_file = os.str();
        }
        op = build_operator(grid, cfg.alpha, opts);
    }

    SolveConfig solve_config() const {
        SolveConfig sc;
        sc.grid_n = cfg.n;
        sc.r_max = cfg.r_max;
        sc.stretching = Stretching{cfg.gamma};
        sc.tol_el = cfg.tol_el;
        sc.tol_manifold = cfg.tol_manifold;
        sc.max_iter = cfg.max_iter;
        return sc;
    }

    GroundState cached_solve(const ProblemParams& p, Frame frame, const SolveConfig& sc) {
        const std::string key = cache_key(p, cfg.spec, *grid, sc, frame);
        if (cfg.use_cache) {
            if (auto hit = cache_load(cache_dir, key, op, p, cfg.spec, frame)) return *hit;
        }
        GroundState gs = solve_ground_state(op, p, cfg.spec, sc, frame);
        if (cfg.use_cache) cache_store(cache_dir, key, gs, p);
        return gs;
    }

    SweepResult cached_sweep(const std::vector<double>& eps_list, Frame frame) {
        SolveConfig sc = solve_config();
        ProblemParams base{cfg.N, cfg.alpha, 1.0};
        SweepResult out;
        out.base = base;
        out.spec = cfg.spec;
        out.frame = frame;
        std::vector<double> sorted = eps_list;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        for (double eps : sorted) {
            ProblemParams p = base;
            p.eps = eps;
            GroundState gs = cached_solve(p, frame, sc);
            if (gs.status == SolveStatus::Converged) {
                sc.init = InitKind::WarmStart;
                sc.warm_start = gs.u;
            }
            out.entries.push_back(make_sweep_entry(op, p, cfg.spec, frame, std::move(gs)));
        }
        return out;
    }
};

Frame resolve_frame(const ExperimentConfig& cfg, bool large) {
    if (cfg.frame != "auto") return frame_from(cfg.frame);
    if (large) return Frame::LargeEps;
    const auto rc = classify(cfg.spec, cfg.N, cfg.alpha);
    return rc.region == Region::ExistsForAllEps ? Frame::WFrame : Frame::VFrame;
}

} // namespace

int run_experiment(const ExperimentConfig& cfg0, std::ostream& log) {
    ExperimentConfig cfg = cfg0;
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }
    fs::create_directories(cfg.out_dir);

    try {
        if (cfg.kind == "constants") {
            const auto c = analytic_constants(cfg.N, cfg.alpha);
            std::ostringstream os;
            os << "N = " << cfg.N << "\nalpha = " << shortest(cfg.alpha) << "\n"
               << "riesz_norm A_alpha = " << shortest(c.riesz_norm) << "\n"
               << "hls_sharp C_alpha = " << shortest(c.hls_sharp) << "\n"
               << "s_alpha = " << shortest(c.s_alpha) << "\n"
               << "m0_tilde = " << shortest(c.m0_tilde) << "\n";
            if (!cfg.spec.terms.empty()) {
                const auto rc = classify(cfg.spec, cfg.N, cfg.alpha);
                os << "region = "
                   << (rc.region == Region::ExistsForAllEps ? "ExistsForAllEps" : "ThresholdRegime")
                   << "\n";
                if (rc.sigma) os << "sigma = " << shortest(*rc.sigma) << "\n";
                const auto pe = predicted_exponents(cfg.N, cfg.alpha, cfg.spec);
                if (pe.uinf) os << "exponent.uinf = " << shortest(*pe.uinf) << "\n";
                if (pe.grad_sq) os << "exponent.grad_sq = " << shortest(*pe.grad_sq) << "\n";
                if (pe.mass) os << "exponent.mass = " << shortest(*pe.mass) << "\n";
                if (pe.dvalue) os << "exponent.dvalue = " << shortest(*pe.dvalue) << "\n";
                if (pe.gap) os << "exponent.gap = " << shortest(*pe.gap) << "\n";
                if (pe.xi) os << "exponent.xi = " << shortest(*pe.xi) << "\n";
                os << "exponent.large_eps_uinf = " << shortest(pe.large_eps_uinf) << "\n"
                   << "exponent.large_eps_mass = " << shortest(pe.large_eps_mass) << "\n"
                   << "exponent.large_eps_grad = " << shortest(pe.large_eps_grad) << "\n"
                   << "exponent.large_eps_energy = " << shortest(pe.large_eps_energy) << "\n";
            }
            log << os.str();
            std::ofstream(cfg.out_dir + "/constants.txt") << os.str();
            return 0;
        }

        if (cfg.kind == "verify") return run_verification(log, cfg.out_dir) == 0 ? 0 : 4;

        Workspace ws(cfg);

        if (cfg.kind == "solve") {
            ProblemParams p{cfg.N, cfg.alpha, cfg.eps};
            const Frame frame = (cfg.frame == "auto") ? Frame::Original : frame_from(cfg.frame);
            GroundState gs = ws.cached_solve(p, frame, ws.solve_config());
            const std::string key = cache_key(p, cfg.spec, *ws.grid, ws.solve_config(), frame);
            cache_store(cfg.out_dir, "solve_" + key, gs, p);
            log << "status = " << status_name(gs.status) << "\n"
                << "energy = " << shortest(gs.energy) << "\n"
                << "res_el = " << shortest(gs.residuals.euler_lagrange) << "\n"
                << "res_nehari = " << shortest(gs.residuals.nehari) << "\n"
                << "res_pohozaev = " << shortest(gs.residuals.pohozaev) << "\n"
                << "iterations = " << gs.iterations << "\n";
            return gs.status == SolveStatus::MaxIter ? 3 : 0;
        }

        if (cfg.kind == "sweep" || cfg.kind == "limit-profile" || cfg.kind == "large-eps") {
            const bool large = (cfg.kind == "large-eps") ||
                               (cfg.frame == "large") ||
                               (cfg.frame == "auto" && cfg.eps_min >= 1.0);
            const Frame frame = resolve_frame(cfg, large);
            SweepResult sw = ws.cached_sweep(log_spaced(cfg.eps_min, cfg.eps_max, cfg.eps_count), frame);
            write_sweep_csv(sw, cfg.out_dir + "/sweep.csv");
            std::ostringstream rep;
            int failures = 0;
            for (const auto& e : sw.entries)
                if (e.state.status == SolveStatus::MaxIter) ++failures;
            if (frame == Frame::WFrame || frame == Frame::VFrame || frame == Frame::Original) {
                print_fit(rep, "linf", fit_exponent(sw, Quantity::LinfU));
                print_fit(rep, "grad_sq", fit_exponent(sw, Quantity::GradSqU));
                print_fit(rep, "mass", fit_exponent(sw, Quantity::MassU));
                print_fit(rep, "d_value", fit_exponent(sw, Quantity::DValueU));
                if (frame == Frame::WFrame) {
                    print_fit(rep, "energy_gap", fit_exponent(sw, Quantity::EnergyGap));
                    print_fit(rep, "xi", fit_exponent(sw, Quantity::Xi));
                }
            } else {
                print_fit(rep, "large_energy", fit_exponent(sw, Quantity::LargeEpsEnergy));
                print_fit(rep, "large_mass", fit_exponent(sw, Quantity::LargeEpsMass));
                print_fit(rep, "large_grad", fit_exponent(sw, Quantity::LargeEpsGrad));
                print_fit(rep, "large_linf", fit_exponent(sw, Quantity::LargeEpsLinf));
            }

            if (cfg.kind == "limit-profile") {
                const auto cal = calibrate_extremal(ws.grid, ws.op);
                const auto lp = limit_profile(ws.op, sw, cal);
                std::ofstream os(cfg.out_dir + "/limit_profile.csv");
                os << "# choq limit-profile csv v1\n"
                   << "# eps,xi,h1_error,tau,gap,lemma42_defect,d_w,l2_w,grad_w,cross_w\n";
                for (size_t i = 0; i < lp.eps.size(); ++i)
                    os << shortest(lp.eps[i]) << ',' << shortest(lp.xi_eps[i]) << ','
                       << shortest(lp.h1_errors[i]) << ',' << shortest(lp.tau_values[i]) << ','
                       << shortest(lp.gap_values[i]) << ',' << shortest(lp.lemma42_defect[i]) << ','
                       << shortest(lp.band_quantities[i][0]) << ','
                       << shortest(lp.band_quantities[i][1]) << ','
                       << shortest(lp.band_quantities[i][2]) << ','
                       << shortest(lp.band_quantities[i][3]) << '\n';
                rep << "rho0_predicted = " << shortest(lp.rho0_predicted) << "\n"
                    << "calibration.amplitude = " << shortest(cal.amplitude) << "\n"
                    << "calibration.residual = " << shortest(cal.residual) << "\n";
                print_fit(rep, "tau_dev", fit_exponent(sw, Quantity::TauDev));
            }
            if (cfg.kind == "large-eps") {
                const auto la = large_eps_analysis(ws.op, sw, cfg.spec, ws.solve_config());
                rep << "s_r = " << shortest(la.s_r) << "\n"
                    << "h1_dist_at_largest = " << shortest(la.h1_dist_at_largest) << "\n";
            }
            log << rep.str();
            std::ofstream(cfg.out_dir + "/report.txt") << rep.str();
            return failures > 0 ? 3 : 0;
        }

        if (cfg.kind == "threshold") {
            SolveConfig sc = ws.solve_config();
            const auto tr = threshold_find(ws.op, ProblemParams{cfg.N, cfg.alpha, 1.0}, cfg.spec,
                                           cfg.bracket_lo, cfg.bracket_hi, cfg.bracket_rel_tol, sc);
            std::ofstream os(cfg.out_dir + "/threshold.csv");
            os << "# choq threshold csv v1\n# eps,m_eps\n";
            for (const auto& [e, m] : tr.m_curve) os << shortest(e) << ',' << shortest(m) << '\n';
            std::ostringstream rep;
            rep << "eps_q.lo = " << shortest(tr.lo) << "\n"
                << "eps_q.hi = " << shortest(tr.hi) << "\n"
                << "below = " << tr.below_status << "\n"
                << "above = " << tr.above_status << "\n";
            log << rep.str();
            std::ofstream(cfg.out_dir + "/report.txt") << rep.str();
            return 0;
        }

        if (cfg.kind == "mass-curve") {
            const Frame small_frame = resolve_frame(cfg, false);
            SweepResult small = ws.cached_sweep(log_spaced(cfg.eps_min, cfg.eps_max, cfg.eps_count), small_frame);
            // the large-eps window opens where the critical admixture has decayed
            const double r = cfg.spec.r_max();
            const double p = lower_critical(cfg.N, cfg.alpha);
            const double chi_rate = (2.0 + cfg.alpha) * (r - p) / (4.0 * (r - 1.0));
            const double lo = (chi_rate >= 0.5) ? 1e2 : 1e4;
            SweepResult largesw = ws.cached_sweep(log_spaced(lo, lo * 1e2, 8), Frame::LargeEps);
            const auto mc = mass_curve(small, largesw);
            std::ofstream os(cfg.out_dir + "/mass_curve.csv");
            os << "# choq mass-curve csv v1\n# eps,mass\n";
            for (const auto& [e, m] : mc.samples) os << shortest(e) << ',' << shortest(m) << '\n';
            std::ostringstream rep;
            rep << "small_eps_slope = " << shortest(mc.small_eps_slope) << "\n"
                << "large_eps_slope = " << shortest(mc.large_eps_slope) << "\n";
            log << rep.str();
            std::ofstream(cfg.out_dir + "/report.txt") << rep.str();
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        log << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

} // namespace choq
