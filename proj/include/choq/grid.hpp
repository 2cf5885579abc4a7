#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "choq/banded.hpp"

namespace choq {

// Node map r(s) = r_max * s^gamma on s_i = i/n, i = 1..n. gamma = 1 is uniform,
// gamma = 2 (default) grades toward the origin and stretches the far field.
struct Stretching {
    double gamma = 2.0;
    bool uniform() const { return gamma == 1.0; }
};

// Radial discretization of R^N. Weights absorb the surface measure |S^{N-1}| r^{N-1}
// so that  int_{R^N} f ~= sum_i weights[i] f(nodes[i])  for radial f.
//
// The quadrature interpolates f in the stretched coordinate with two averaged
// quartic Lagrange windows per interval and integrates the measure density exactly;
// constants are integrated to machine precision on every grid.
class RadialGrid {
public:
    int N = 3;
    double r_max = 0.0;
    int n = 0;
    Stretching stretching;

    Eigen::ArrayXd nodes;   // increasing radii, size n
    Eigen::ArrayXd weights; // positive quadrature weights, size n

    // rule weight contributed by the sub-node stub [0, r_1] (lands on node 0)
    double stub_weight = 0.0;
    // per-interval rule contributions: interval j spans [nodes[j], nodes[j+1]]
    // and contributes w[k] to node lo+k. Used for near-band bookkeeping in riesz.
    struct IntervalContrib {
        int lo = 0;
        std::array<double, 6> w{};
    };
    std::vector<IntervalContrib> contribs;

    // 5-point stencils: first derivative (even reflection at 0, one-sided at r_max)
    // and radial Laplacian u'' + (N-1)/r u' (even reflection at 0, Dirichlet beyond r_max)
    Eigen::MatrixXd d_coef; // n x 5
    Eigen::VectorXi d_base;
    Eigen::MatrixXd l_coef; // n x 5
    Eigen::VectorXi l_base;

    // symmetric banded kinetic form A = D^T W D; kinetic_form(u) = u^T A u ~= ||grad u||_2^2
    BandedMatrix kinetic;

    Eigen::ArrayXd apply_d(const Eigen::ArrayXd& u) const;
    Eigen::ArrayXd apply_l(const Eigen::ArrayXd& u) const;
    double kinetic_form(const Eigen::ArrayXd& u) const;

    double volume_element_total() const { return weights.sum(); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Sampled radial function on a grid.
struct Field {
    GridPtr grid;
    Eigen::ArrayXd values;

    Field() = default;
    Field(GridPtr g, Eigen::ArrayXd v) : grid(std::move(g)), values(std::move(v)) {}
};

GridPtr make_grid(int N, double r_max, int n, Stretching stretching = {});

struct Norms {
    double l2_sq = 0.0;
    double grad_sq = 0.0;
    double h1eps_sq = 0.0;
    double linf = 0.0;
};

Norms norms(const Field& u, double eps);
double lp_norm(const Field& u, double p);
// sup norm as the r -> 0 extrapolation (quadratic through the first three nodes)
double linf_extrapolated(const Field& u);

Field laplacian_apply(const Field& u);

// solve (-Laplace + eps) u = f with the grid's Laplacian stencil; residual <= 1e-10 ||f||
Field helmholtz_solve(const Field& f, double eps);

// W_rho with amplitude A: rho^{-N/2} (A / (1 + |x/rho|^2))^{N/2}
Field sample_w(const GridPtr& grid, double rho, double amplitude);

// two-column text serialization, shortest round-trip decimal formatting
void save_field(const Field& u, const std::string& path);
Field load_field(const std::string& path);

} // namespace choq
