#include "choq/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <thread>
#include <vector>

#include "choq/model.hpp"

namespace choq {

namespace {

constexpr int kGL = 8;
const double kGLx[kGL] = {
    0.5 - 0.9602898564975363 / 2, 0.5 - 0.7966664774136267 / 2,
    0.5 - 0.5255324099163290 / 2, 0.5 - 0.1834346424956498 / 2,
    0.5 + 0.1834346424956498 / 2, 0.5 + 0.5255324099163290 / 2,
    0.5 + 0.7966664774136267 / 2, 0.5 + 0.9602898564975363 / 2};
const double kGLw[kGL] = {
    0.1012285362903763 / 2, 0.2223810344533745 / 2, 0.3137066458778873 / 2,
    0.3626837833783620 / 2, 0.3626837833783620 / 2, 0.3137066458778873 / 2,
    0.2223810344533745 / 2, 0.1012285362903763 / 2};

double surface_measure(int N) {
    return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0);
}

// int_{ua}^{ub} u^k |u|^{alpha-1} du, closed form (interval may cross zero)
double sing_moment(double ua, double ub, double alpha, int k) {
    auto anti = [&](double u) {
        if (u == 0.0) return 0.0;
        const double p = alpha + k;
        const double v = std::pow(std::abs(u), p) / p;
        return (u > 0) ? v : ((k % 2 == 0) ? -v : v);
    };
    return anti(ub) - anti(ua);
}

// int_{ua}^{ub} u^k ln|u| du
double log_moment(double ua, double ub, int k) {
    auto anti = [&](double u) {
        if (u == 0.0) return 0.0;
        return std::pow(u, k + 1) * (std::log(std::abs(u)) / (k + 1) - 1.0 / ((k + 1.0) * (k + 1.0)));
    };
    return anti(ub) - anti(ua);
}

// Gauss-Jacobi nodes/weights for weight (1-x^2)^{lam} on [-1,1] (Golub-Welsch)
void gauss_gegenbauer(int m, double lam, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    const double a = lam; // Jacobi a = b = lam
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double tk = 2.0 * k + 2.0 * a;
        const double beta = 4.0 * k * (k + a) * (k + a) * (k + 2.0 * a) /
                            (tk * tk * (tk + 1.0) * (tk - 1.0));
        J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    x = es.eigenvalues();
    const double mu0 = std::pow(2.0, 2.0 * a + 1.0) * std::tgamma(a + 1.0) * std::tgamma(a + 1.0) /
                       std::tgamma(2.0 * a + 2.0);
    w.resize(m);
    for (int k = 0; k < m; ++k) {
        const double v = es.eigenvectors()(0, k);
        w[k] = mu0 * v * v;
    }
}

struct KernelDensity {
    int N;
    double alpha;
    double Aal;
    double geg_scale = 0.0; // A * |S^{N-2}| / |S^{N-1}|
    Eigen::VectorXd ju, jw; // Gauss-Jacobi rule for the angular integral
    int order = 0;

    // symmetric density: (I_alpha * f)(r) = int khat(r,s) f(s) dmu(s), dmu = |S^{N-1}| s^{N-1} ds
    double khat(double r, double s) const {
        if (N == 3) {
            if (alpha == 1.0) return Aal * std::log((r + s) / std::abs(r - s)) / (2.0 * r * s);
            return Aal *
                   (std::pow(r + s, alpha - 1.0) - std::pow(std::abs(r - s), alpha - 1.0)) /
                   ((alpha - 1.0) * 2.0 * r * s);
        }
        // general N: angular Gauss-Jacobi with weight (1-u^2)^{(N-3)/2}
        const double c = r * r + s * s;
        double acc = 0.0;
        for (int k = 0; k < order; ++k)
            acc += jw[k] * std::pow(c - 2.0 * r * s * ju[k], (alpha - N) / 2.0);
        return geg_scale * acc;
    }
};

KernelDensity make_density(int N, double alpha, int& angular_order_out) {
    KernelDensity kd;
    kd.N = N;
    kd.alpha = alpha;
    kd.Aal = riesz_normalization(N, alpha);
    angular_order_out = 0;
    if (N > 3) {
        kd.geg_scale = kd.Aal * surface_measure(N - 1) / surface_measure(N);
        // double the order until probe entries settle below 1e-10
        int m = 64;
        Eigen::VectorXd xp, wp;
        gauss_gegenbauer(m, (N - 3.0) / 2.0, kd.ju, kd.jw);
        kd.order = m;
        const double probes[][2] = {{1.0, 1.3}, {0.5, 2.0}, {3.0, 3.2}, {0.2, 0.21}};
        while (m < 1024) {
            gauss_gegenbauer(2 * m, (N - 3.0) / 2.0, xp, wp);
            KernelDensity fine = kd;
            fine.ju = xp;
            fine.jw = wp;
            fine.order = 2 * m;
            double worst = 0.0;
            for (auto& pr : probes) {
                const double c0 = kd.khat(pr[0], pr[1]);
                const double c1 = fine.khat(pr[0], pr[1]);
                worst = std::max(worst, std::abs(c1 - c0) / std::abs(c1));
            }
            if (worst < 1e-10) break;
            kd = fine;
            m *= 2;
        }
        angular_order_out = kd.order;
    }
    return kd;
}

// ---- near-band product integration (N = 3 closed form) -----------------

// adds to row: int_a^b (c0 + c1 y + c2 y^2 + c3 y^3) * [(r+y)^{a-1} - |r-y|^{a-1}]/(a-1) dy
// (log forms for alpha = 1); polynomial includes the measure factor y and basis
double cell_integral_closed(double a, double b, double r, double alpha, const double* cy) {
    const double h = b - a;
    double smooth = 0.0;
    for (int g = 0; g < kGL; ++g) {
        const double y = a + h * kGLx[g];
        const double P = cy[0] + y * (cy[1] + y * (cy[2] + y * cy[3]));
        smooth += kGLw[g] * P * ((alpha == 1.0) ? std::log(r + y) : std::pow(r + y, alpha - 1.0));
    }
    smooth *= h;
    // expand P in powers of u = y - r
    double cu[4];
    cu[0] = cy[0] + r * (cy[1] + r * (cy[2] + r * cy[3]));
    cu[1] = cy[1] + r * (2.0 * cy[2] + 3.0 * r * cy[3]);
    cu[2] = cy[2] + 3.0 * r * cy[3];
    cu[3] = cy[3];
    double sing = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (cu[k] == 0.0) continue;
        sing += cu[k] * ((alpha == 1.0) ? log_moment(a - r, b - r, k)
                                        : sing_moment(a - r, b - r, alpha, k));
    }
    if (alpha == 1.0) return smooth - sing;
    return (smooth - sing) / (alpha - 1.0);
}

// general N: hat-basis cell integral with the kernel density sampled by split GL
double cell_integral_split(const KernelDensity& kd, double a, double b, double r,
                           const double* cy, double measure_pow) {
    auto piece = [&](double lo, double hi) {
        if (hi <= lo) return 0.0;
        const double h = hi - lo;
        double acc = 0.0;
        for (int g = 0; g < kGL; ++g) {
            const double y = lo + h * kGLx[g];
            const double P = cy[0] + y * (cy[1] + y * (cy[2] + y * cy[3]));
            acc += kGLw[g] * P * std::pow(y, measure_pow) * kd.khat(r, y);
        }
        return h * acc;
    };
    if (r > a && r < b) return piece(a, r) + piece(r, b);
    return piece(a, b);
}

uint64_t fnv1a(const void* data, size_t len, uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

struct CacheHeader {
    char magic[8] = {'c', 'h', 'o', 'q', 'k', 'e', 'r', '1'};
    int32_t N = 0;
    int32_t n = 0;
    double alpha = 0.0;
    double r_max = 0.0;
    double gamma = 0.0;
};

bool try_load_cache(const std::string& path, const GridPtr& grid, double alpha,
                    Eigen::MatrixXd& kernel) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    CacheHeader h;
    if (!is.read(reinterpret_cast<char*>(&h), sizeof(h))) return false;
    CacheHeader want;
    want.N = grid->N;
    want.n = grid->n;
    want.alpha = alpha;
    want.r_max = grid->r_max;
    want.gamma = grid->stretching.gamma;
    if (std::memcmp(h.magic, want.magic, 8) != 0 || h.N != want.N || h.n != want.n ||
        h.alpha != want.alpha || h.r_max != want.r_max || h.gamma != want.gamma)
        return false;
    const size_t count = static_cast<size_t>(grid->n) * grid->n;
    kernel.resize(grid->n, grid->n);
    if (!is.read(reinterpret_cast<char*>(kernel.data()), count * sizeof(double))) return false;
    uint64_t sum = 0, expect = 0;
    if (!is.read(reinterpret_cast<char*>(&expect), sizeof(expect))) return false;
    sum = fnv1a(kernel.data(), count * sizeof(double));
    return sum == expect;
}

void save_cache(const std::string& path, const GridPtr& grid, double alpha,
                const Eigen::MatrixXd& kernel) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return;
    CacheHeader h;
    h.N = grid->N;
    h.n = grid->n;
    h.alpha = alpha;
    h.r_max = grid->r_max;
    h.gamma = grid->stretching.gamma;
    os.write(reinterpret_cast<const char*>(&h), sizeof(h));
    const size_t count = static_cast<size_t>(grid->n) * grid->n;
    os.write(reinterpret_cast<const char*>(kernel.data()), count * sizeof(double));
    const uint64_t sum = fnv1a(kernel.data(), count * sizeof(double));
    os.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
}

} // namespace

RieszOperator build_operator(const GridPtr& grid, double alpha, const RieszBuildOptions& opts) {
    const int N = grid->N;
    if (!(alpha > 0.0 && alpha < static_cast<double>(N)))
        throw std::invalid_argument("build_operator: alpha must lie in (0, N)");

    RieszOperator op;
    op.grid = grid;
    op.alpha = alpha;

    if (opts.cache_file && try_load_cache(*opts.cache_file, grid, alpha, op.kernel)) {
        op.diagnostics.from_cache = true;
        return op;
    }

    const int n = grid->n;
    const auto& r = grid->nodes;
    const auto& w = grid->weights;
    int angular_order = 0;
    const KernelDensity kd = make_density(N, alpha, angular_order);
    op.diagnostics.angular_order = angular_order;

    Eigen::MatrixXd K(n, n);
    const int m = opts.near_band;
    const double surf = surface_measure(N);

    auto build_rows = [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            const double ri = r[i];
            // plain symmetric Nystrom row
            for (int j = 0; j < n; ++j) K(i, j) = (j == i) ? 0.0 : kd.khat(ri, r[j]) * w[j];

            const int jlo = std::max(i - m, 0);
            const int jhi = std::min(i + m, n - 1);
            // remove the rule's contributions from intervals inside the band
            for (int j = jlo; j < jhi; ++j) {
                const auto& c = grid->contribs[j];
                for (int k = 0; k < 6; ++k) {
                    const int im = c.lo + k;
                    if (im != i && c.w[k] != 0.0) K(i, im) -= c.w[k] * kd.khat(ri, r[im]);
                }
            }
            if (jlo == 0) K(i, 0) -= (i != 0) ? grid->stub_weight * kd.khat(ri, r[0]) : 0.0;

            // product integration over the band with averaged quadratic windows
            // integrand per basis: basis(y) * y^{N-1} * surf * khat(ri, y)
            // N = 3 closed form folds to (2 pi A / ri) * basis(y) * y * psi(ri,y)
            const double pref3 = (N == 3) ? 2.0 * M_PI * kd.Aal / ri : 0.0;
            auto add_basis = [&](int node, const double* cpoly_deg2, double a, double b) {
                // basis polynomial c0 + c1 y + c2 y^2 (degree <= 2)
                if (N == 3) {
                    // multiply by y: cy has degree 3
                    double cy[4] = {0.0, cpoly_deg2[0], cpoly_deg2[1], cpoly_deg2[2]};
                    K(i, node) += pref3 * cell_integral_closed(a, b, ri, alpha, cy);
                } else {
                    double cy[4] = {cpoly_deg2[0], cpoly_deg2[1], cpoly_deg2[2], 0.0};
                    K(i, node) += surf * cell_integral_split(kd, a, b, ri, cy, N - 1.0);
                }
            };
            for (int j = jlo; j < jhi; ++j) {
                const double a = r[j], b = r[j + 1];
                int tri0[3] = {j - 1, j, j + 1};
                int tri1[3] = {j, j + 1, j + 2};
                const bool have0 = tri0[0] >= 0;
                const bool have1 = tri1[2] <= n - 1;
                const double fac = (have0 && have1) ? 0.5 : 1.0;
                for (int wsel = 0; wsel < 2; ++wsel) {
                    const int* tri = (wsel == 0) ? tri0 : tri1;
                    if ((wsel == 0 && !have0) || (wsel == 1 && !have1)) continue;
                    const double x0 = r[tri[0]], x1 = r[tri[1]], x2 = r[tri[2]];
                    const double xs[3] = {x0, x1, x2};
                    for (int mm = 0; mm < 3; ++mm) {
                        // Lagrange basis mm over (x0,x1,x2) in monomial form
                        double sc = fac;
                        double cpoly[3] = {1.0, 0.0, 0.0};
                        for (int kk = 0; kk < 3; ++kk) {
                            if (kk == mm) continue;
                            // multiply by (y - xs[kk])
                            const double c0 = cpoly[0], c1 = cpoly[1];
                            cpoly[2] = c1;
                            cpoly[1] = c0 - xs[kk] * c1;
                            cpoly[0] = -xs[kk] * c0;
                            sc /= (xs[mm] - xs[kk]);
                        }
                        double cf[3] = {cpoly[0] * sc, cpoly[1] * sc, cpoly[2] * sc};
                        add_basis(tri[mm], cf, a, b);
                    }
                }
            }
            if (jlo == 0) {
                // stub cell [0, r_1], constant basis on node 0
                const double cf[3] = {1.0, 0.0, 0.0};
                add_basis(0, cf, 0.0, r[0]);
            }
        }
    };

    int nthreads = opts.threads > 0 ? opts.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min(nthreads, n);
    {
        std::vector<std::thread> pool;
        const int chunk = (n + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const int i0 = t * chunk, i1 = std::min(n, i0 + chunk);
            if (i0 >= i1) break;
            pool.emplace_back(build_rows, i0, i1);
        }
        for (auto& th : pool) th.join();
    }

    // diagnostics on the raw pairing form, then exact min-weight symmetrization
    double max_m = 0.0, max_asym = 0.0, min_entry = 0.0;
    long clamped = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double mij = w[i] * K(i, j), mji = w[j] * K(j, i);
            max_m = std::max(max_m, std::abs(mij));
            max_asym = std::max(max_asym, std::abs(mij - mji));
        }
    op.diagnostics.raw_asymmetry = (max_m > 0) ? max_asym / max_m : 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            // source the entry from the smaller-weight row: its native accuracy wins
            double p = (w[i] <= w[j]) ? w[i] * K(i, j) : w[j] * K(j, i);
            min_entry = std::min(min_entry, p);
            if (p < 0.0) {
                p = 0.0;
                ++clamped;
            }
            K(i, j) = p / w[i];
            K(j, i) = p / w[j];
        }
    op.diagnostics.min_entry_raw = min_entry;
    op.diagnostics.clamped_entries = clamped;
    op.kernel = std::move(K);

    if (opts.cache_file) save_cache(*opts.cache_file, grid, alpha, op.kernel);
    return op;
}

Eigen::ArrayXd apply(const RieszOperator& op, const Eigen::ArrayXd& f) {
    return (op.kernel * f.matrix()).array();
}

Field apply(const RieszOperator& op, const Field& f) {
    if (f.grid.get() != op.grid.get())
        throw std::invalid_argument("riesz apply: field grid does not match operator grid");
    return Field(f.grid, apply(op, f.values));
}

double pairing(const RieszOperator& op, const Eigen::ArrayXd& f, const Eigen::ArrayXd& g) {
    return (op.grid->weights * apply(op, f) * g).sum();
}

double pairing(const RieszOperator& op, const Field& f, const Field& g) {
    if (f.grid.get() != op.grid.get() || g.grid.get() != op.grid.get())
        throw std::invalid_argument("riesz pairing: field grid does not match operator grid");
    return pairing(op, f.values, g.values);
}

double d_value(const RieszOperator& op, const Field& u) {
    const double p = lower_critical(op.grid->N, op.alpha);
    Eigen::ArrayXd up = u.values.abs().pow(p);
    return pairing(op, up, up);
}

} // namespace choq
