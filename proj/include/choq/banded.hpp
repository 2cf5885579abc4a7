#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace choq {

// General banded matrix with equal lower/upper bandwidth kb, dense band storage.
// Row i holds columns [i-kb, i+kb] clipped to [0, n).
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int kb) : n_(n), kb_(kb), a_(Eigen::MatrixXd::Zero(2 * kb + 1, n)) {}

    double& at(int i, int j) { return a_(j - i + kb_, i); }
    double at(int i, int j) const { return a_(j - i + kb_, i); }
    int size() const { return n_; }
    int bandwidth() const { return kb_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < n_; ++i) {
            const int jlo = std::max(0, i - kb_), jhi = std::min(n_ - 1, i + kb_);
            double s = 0.0;
            for (int j = jlo; j <= jhi; ++j) s += at(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    void add_symmetric(int i, int j, double v) {
        at(i, j) += v;
        if (i != j) at(j, i) += v;
    }

private:
    int n_ = 0, kb_ = 0;
    Eigen::MatrixXd a_;
};

// LU factorization of a banded matrix without pivoting (diagonally dominant use).
class BandedLU {
public:
    BandedLU() = default;
    explicit BandedLU(const BandedMatrix& m) : a_(m), n_(m.size()), kb_(m.bandwidth()) {
        for (int k = 0; k < n_ - 1; ++k) {
            const double piv = a_.at(k, k);
            if (piv == 0.0) throw std::runtime_error("BandedLU: zero pivot");
            const int iend = std::min(n_ - 1, k + kb_);
            for (int i = k + 1; i <= iend; ++i) {
                const double l = a_.at(i, k) / piv;
                a_.at(i, k) = l;
                const int jend = std::min(n_ - 1, k + kb_);
                for (int j = k + 1; j <= jend; ++j) a_.at(i, j) -= l * a_.at(k, j);
            }
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x = b;
        for (int i = 1; i < n_; ++i) {
            const int jlo = std::max(0, i - kb_);
            double s = x[i];
            for (int j = jlo; j < i; ++j) s -= a_.at(i, j) * x[j];
            x[i] = s;
        }
        for (int i = n_ - 1; i >= 0; --i) {
            const int jhi = std::min(n_ - 1, i + kb_);
            double s = x[i];
            for (int j = i + 1; j <= jhi; ++j) s -= a_.at(i, j) * x[j];
            x[i] = s / a_.at(i, i);
        }
        return x;
    }

private:
    BandedMatrix a_;
    int n_ = 0, kb_ = 0;
};

} // namespace choq
