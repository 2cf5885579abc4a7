#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "choq/grid.hpp"

namespace choq {

struct RieszBuildDiagnostics {
    double raw_asymmetry = 0.0;    // max |w_i K_ij - w_j K_ji| / max |w_i K_ij| before symmetrization
    double min_entry_raw = 0.0;    // most negative raw entry (clamped away afterwards)
    long clamped_entries = 0;      // entries clamped to zero by positivity
    int angular_order = 0;         // Gauss-Jacobi order used (general N only)
    bool from_cache = false;
};

// Dense quadrature realization of f -> I_alpha * f for radial f.
// kernel is entrywise >= 0 and the pairing form M_ij = w_i K_ij is exactly symmetric.
class RieszOperator {
public:
    GridPtr grid;
    double alpha = 0.0;
    Eigen::MatrixXd kernel; // (I_alpha * f)(r_i) ~= sum_j kernel(i,j) f_j
    RieszBuildDiagnostics diagnostics;
};

struct RieszBuildOptions {
    int near_band = 4;             // product-integration half-width in cells
    int threads = 0;               // 0 = hardware concurrency
    std::optional<std::string> cache_file; // optional kernel cache path
};

RieszOperator build_operator(const GridPtr& grid, double alpha, const RieszBuildOptions& opts = {});

Field apply(const RieszOperator& op, const Field& f);
Eigen::ArrayXd apply(const RieszOperator& op, const Eigen::ArrayXd& f);

// int (I_alpha * f) g ; symmetric bilinear form
double pairing(const RieszOperator& op, const Field& f, const Field& g);
double pairing(const RieszOperator& op, const Eigen::ArrayXd& f, const Eigen::ArrayXd& g);

// D(u) = int (I_alpha * |u|^{(N+alpha)/N}) |u|^{(N+alpha)/N}
double d_value(const RieszOperator& op, const Field& u);

} // namespace choq
