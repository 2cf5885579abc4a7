#include "choq/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace choq {

namespace {

// 8-point Gauss-Legendre on [0,1]
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

// weights of d^{order}/dx^{order} of the Lagrange interpolant at x0, m nodes
void lagrange_deriv(const double* xs, int m, double x0, int order, double* out) {
    for (int j = 0; j < m; ++j) {
        double tot = 0.0;
        if (order == 1) {
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                double p = 1.0 / (xs[j] - xs[k]);
                for (int l = 0; l < m; ++l)
                    if (l != j && l != k) p *= (x0 - xs[l]) / (xs[j] - xs[l]);
                tot += p;
            }
        } else { // order == 2
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                for (int k2 = 0; k2 < m; ++k2) {
                    if (k2 == j || k2 == k) continue;
                    double p = 1.0 / ((xs[j] - xs[k]) * (xs[j] - xs[k2]));
                    for (int l = 0; l < m; ++l)
                        if (l != j && l != k && l != k2) p *= (x0 - xs[l]) / (xs[j] - xs[l]);
                    tot += p;
                }
            }
        }
        out[j] = tot;
    }
}

} // namespace

Eigen::ArrayXd RadialGrid::apply_d(const Eigen::ArrayXd& u) const {
    Eigen::ArrayXd v(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += d_coef(i, k) * u[d_base[i] + k];
        v[i] = s;
    }
    return v;
}

Eigen::ArrayXd RadialGrid::apply_l(const Eigen::ArrayXd& u) const {
    Eigen::ArrayXd v(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += l_coef(i, k) * u[l_base[i] + k];
        v[i] = s;
    }
    return v;
}

double RadialGrid::kinetic_form(const Eigen::ArrayXd& u) const {
    const Eigen::ArrayXd du = apply_d(u);
    return (weights * du * du).sum();
}

GridPtr make_grid(int N, double r_max, int n, Stretching stretching) {
    if (n < 16) throw std::invalid_argument("make_grid: n must be >= 16");
    if (!(r_max > 0.0)) throw std::invalid_argument("make_grid: r_max must be positive");
    if (!(stretching.gamma >= 1.0)) throw std::invalid_argument("make_grid: gamma must be >= 1");
    if (N < 3) throw std::invalid_argument("make_grid: N must be >= 3");

    auto g = std::make_shared<RadialGrid>();
    g->N = N;
    g->r_max = r_max;
    g->n = n;
    g->stretching = stretching;

    const double gamma = stretching.gamma;
    g->nodes.resize(n);
    for (int i = 0; i < n; ++i) g->nodes[i] = r_max * std::pow((i + 1.0) / n, gamma);

    // quadrature weights: product integration in s of f(r(s)) * dens(s),
    // dens = |S^{N-1}| r^{N-1} dr/ds
    const double surf = surface_measure(N);
    auto dens = [&](double s) {
        const double r = r_max * std::pow(s, gamma);
        return surf * std::pow(r, N - 1) * r_max * gamma * std::pow(s, gamma - 1.0);
    };
    Eigen::ArrayXd snodes(n);
    for (int i = 0; i < n; ++i) snodes[i] = (i + 1.0) / n;

    g->weights = Eigen::ArrayXd::Zero(n);
    // stub [0, s_1], f extrapolated by its value at the first node
    {
        double wsum = 0.0;
        for (int gq = 0; gq < kGL; ++gq) wsum += kGLw[gq] * dens(snodes[0] * kGLx[gq]);
        g->stub_weight = snodes[0] * wsum;
        g->weights[0] += g->stub_weight;
    }
    g->contribs.resize(n - 1);
    for (int j = 0; j + 1 < n; ++j) {
        const double a = snodes[j], b = snodes[j + 1], h = b - a;
        int lo1 = std::clamp(j - 2, 0, n - 5);
        int lo2 = std::clamp(j - 1, 0, n - 5);
        const int nw = (lo1 == lo2) ? 1 : 2;
        const double fac = 1.0 / nw;
        auto& c = g->contribs[j];
        c.lo = lo1;
        c.w.fill(0.0);
        for (int wi = 0; wi < nw; ++wi) {
            const int lo = (wi == 0) ? lo1 : lo2;
            for (int m = 0; m < 5; ++m) {
                double acc = 0.0;
                for (int gq = 0; gq < kGL; ++gq) {
                    const double s = a + h * kGLx[gq];
                    double L = 1.0;
                    for (int mm = 0; mm < 5; ++mm)
                        if (mm != m) L *= (s - snodes[lo + mm]) / (snodes[lo + m] - snodes[lo + mm]);
                    acc += kGLw[gq] * dens(s) * L;
                }
                const double cw = fac * h * acc;
                g->weights[lo + m] += cw;
                c.w[static_cast<size_t>(lo + m - lo1)] += cw;
            }
        }
    }

    // first-derivative stencil: 5-point, even reflection across r = 0,
    // one-sided window at the outer boundary
    g->d_coef.resize(n, 5);
    g->d_base.resize(n);
    g->l_coef.resize(n, 5);
    g->l_base.resize(n);
    const double rg1 = r_max * std::pow((n + 1.0) / n, gamma);
    const double rg2 = r_max * std::pow((n + 2.0) / n, gamma);
    for (int i = 0; i < n; ++i) {
        // D: window of real nodes (shift right boundary inward)
        {
            int w0 = std::min(i - 2, n - 5);
            double xs[5];
            int cols[5];
            for (int k = 0; k < 5; ++k) {
                int idx = w0 + k;
                if (idx < 0) { // reflect
                    xs[k] = -g->nodes[-idx - 1];
                    cols[k] = -idx - 1;
                } else {
                    xs[k] = g->nodes[idx];
                    cols[k] = idx;
                }
            }
            double wd[5];
            lagrange_deriv(xs, 5, g->nodes[i], 1, wd);
            int base = n;
            for (int k = 0; k < 5; ++k) base = std::min(base, cols[k]);
            base = std::min(base, n - 5);
            g->d_base[i] = base;
            for (int k = 0; k < 5; ++k) g->d_coef(i, k) = 0.0;
            for (int k = 0; k < 5; ++k) g->d_coef(i, cols[k] - base) += wd[k];
        }
        // L: window centered, even reflection on the left, Dirichlet ghosts on the right
        {
            double xs[5];
            int cols[5];
            for (int k = 0; k < 5; ++k) {
                int idx = i - 2 + k;
                if (idx < 0) {
                    xs[k] = -g->nodes[-idx - 1];
                    cols[k] = -idx - 1;
                } else if (idx >= n) {
                    xs[k] = (idx == n) ? rg1 : rg2;
                    cols[k] = -1; // ghost, value 0
                } else {
                    xs[k] = g->nodes[idx];
                    cols[k] = idx;
                }
            }
            double w2[5], w1[5];
            lagrange_deriv(xs, 5, g->nodes[i], 2, w2);
            lagrange_deriv(xs, 5, g->nodes[i], 1, w1);
            const double fac = (N - 1.0) / g->nodes[i];
            int base = n;
            for (int k = 0; k < 5; ++k)
                if (cols[k] >= 0) base = std::min(base, cols[k]);
            base = std::min(base, n - 5);
            g->l_base[i] = base;
            for (int k = 0; k < 5; ++k) g->l_coef(i, k) = 0.0;
            for (int k = 0; k < 5; ++k)
                if (cols[k] >= 0) g->l_coef(i, cols[k] - base) += w2[k] + fac * w1[k];
        }
    }

    // kinetic quadratic form A = D^T W D (banded, symmetric)
    g->kinetic = BandedMatrix(n, 4);
    for (int i = 0; i < n; ++i) {
        const double wi = g->weights[i];
        for (int k = 0; k < 5; ++k) {
            const int ck = g->d_base[i] + k;
            const double vk = g->d_coef(i, k);
            if (vk == 0.0) continue;
            for (int l = k; l < 5; ++l) {
                const int cl = g->d_base[i] + l;
                const double v = wi * vk * g->d_coef(i, l);
                if (v == 0.0) continue;
                g->kinetic.add_symmetric(ck, cl, (k == l) ? v : v);
            }
        }
    }
    return g;
}

Norms norms(const Field& u, double eps) {
    Norms out;
    const auto& g = *u.grid;
    out.l2_sq = (g.weights * u.values * u.values).sum();
    out.grad_sq = g.kinetic_form(u.values);
    out.h1eps_sq = out.grad_sq + eps * out.l2_sq;
    out.linf = std::max(linf_extrapolated(u), u.values.abs().maxCoeff());
    return out;
}

double lp_norm(const Field& u, double p) {
    const auto& g = *u.grid;
    return std::pow((g.weights * u.values.abs().pow(p)).sum(), 1.0 / p);
}

double linf_extrapolated(const Field& u) {
    const auto& r = u.grid->nodes;
    const auto& v = u.values;
    // quadratic through the first three nodes, evaluated at r = 0
    const double x0 = r[0], x1 = r[1], x2 = r[2];
    const double l0 = (0 - x1) * (0 - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (0 - x0) * (0 - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (0 - x0) * (0 - x1) / ((x2 - x0) * (x2 - x1));
    return l0 * v[0] + l1 * v[1] + l2 * v[2];
}

Field laplacian_apply(const Field& u) {
    return Field(u.grid, u.grid->apply_l(u.values));
}

Field helmholtz_solve(const Field& f, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("helmholtz_solve: eps must be positive");
    const auto& g = *f.grid;
    const int n = g.n;
    BandedMatrix m(n, 4);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 5; ++k) {
            const double c = g.l_coef(i, k);
            if (c != 0.0) m.at(i, g.l_base[i] + k) -= c;
        }
        m.at(i, i) += eps;
    }
    BandedLU lu(m);
    Eigen::VectorXd rhs = f.values.matrix();
    Eigen::VectorXd x = lu.solve(rhs);
    // iterative refinement keeps the residual near machine precision
    const double fn = rhs.norm();
    for (int round = 0; round < 3; ++round) {
        Eigen::VectorXd resid = rhs - (-g.apply_l(x.array()) + eps * x.array()).matrix();
        if (resid.norm() <= 1e-12 * fn) break;
        x += lu.solve(resid);
    }
    return Field(f.grid, x.array());
}

Field sample_w(const GridPtr& grid, double rho, double amplitude) {
    if (!(rho > 0.0) || !(amplitude > 0.0))
        throw std::invalid_argument("sample_w: rho and amplitude must be positive");
    const double N = grid->N;
    Eigen::ArrayXd v =
        std::pow(rho, -N / 2.0) *
        (amplitude / (1.0 + (grid->nodes / rho).square())).pow(N / 2.0);
    return Field(grid, std::move(v));
}

namespace {
std::string shortest(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}
} // namespace

void save_field(const Field& u, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_field: cannot open " + path);
    const auto& g = *u.grid;
    os << "# choq-field N=" << g.N << " n=" << g.n << " r_max=" << shortest(g.r_max)
       << " gamma=" << shortest(g.stretching.gamma) << "\n";
    for (int i = 0; i < g.n; ++i)
        os << shortest(g.nodes[i]) << " " << shortest(u.values[i]) << "\n";
}

Field load_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_field: cannot open " + path);
    std::string header;
    std::getline(is, header);
    int N = 0, n = 0;
    double r_max = 0.0, gamma = 0.0;
    {
        std::istringstream hs(header);
        std::string tok;
        while (hs >> tok) {
            auto eat = [&](const char* key, auto& dst) {
                const std::string k(key);
                if (tok.rfind(k, 0) == 0) {
                    std::string vs = tok.substr(k.size());
                    double v = 0;
                    auto r = std::from_chars(vs.data(), vs.data() + vs.size(), v);
                    if (r.ec == std::errc()) dst = v;
                }
            };
            double Nd = 0, nd = 0;
            eat("N=", Nd);
            eat("n=", nd);
            eat("r_max=", r_max);
            eat("gamma=", gamma);
            if (Nd != 0) N = static_cast<int>(Nd);
            if (nd != 0) n = static_cast<int>(nd);
        }
    }
    if (N == 0 || n == 0 || r_max == 0.0 || gamma == 0.0)
        throw std::runtime_error("load_field: malformed header in " + path);
    auto grid = make_grid(N, r_max, n, Stretching{gamma});
    Eigen::ArrayXd vals(n);
    for (int i = 0; i < n; ++i) {
        std::string rs, vs;
        if (!(is >> rs >> vs)) throw std::runtime_error("load_field: truncated data in " + path);
        double v = 0;
        auto rr = std::from_chars(vs.data(), vs.data() + vs.size(), v);
        if (rr.ec != std::errc()) throw std::runtime_error("load_field: bad value in " + path);
        vals[i] = v;
    }
    return Field(grid, std::move(vals));
}

} // namespace choq
