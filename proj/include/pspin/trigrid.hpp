#pragma once

#include <cassert>
#include <stdexcept>
#include <vector>

namespace pspin {

// Dense square matrix over a snapshot/solver grid, row-major.
struct Matrix {
    int n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(int n_, double fill = 0.0)
        : n(n_), a(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), fill) {}

    double& operator()(int i, int j) {
        return a[static_cast<std::size_t>(i) * n + j];
    }
    double operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i) * n + j];
    }
};

// Lower-triangular two-time array over the uniform grid t_k = k*h.
// Stores v(i,j) for i >= j only; what a read with j > i means (zero for R,
// mirror for C) is decided by the owner, not here.
class TriGrid {
public:
    TriGrid() = default;
    TriGrid(double h, int n)
        : h_(h), n_(n), v_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0) {
        if (h <= 0.0) throw std::invalid_argument("TriGrid: step h must be > 0");
        if (n < 1) throw std::invalid_argument("TriGrid: need at least one grid time");
    }

    double h() const { return h_; }
    int n() const { return n_; }
    double time(int i) const { return i * h_; }

    double& at(int i, int j) {
        assert(i >= j && j >= 0 && i < n_);
        return v_[index(i, j)];
    }
    double at(int i, int j) const {
        assert(i >= j && j >= 0 && i < n_);
        return v_[index(i, j)];
    }

private:
    static std::size_t index(int i, int j) {
        return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
    }

    double h_ = 0.0;
    int n_ = 0;
    std::vector<double> v_;
};

} // namespace pspin
