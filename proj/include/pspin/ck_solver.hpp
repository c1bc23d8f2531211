#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pspin/model.hpp"
#include "pspin/trigrid.hpp"

namespace pspin {

// soft: confinement enters as f'(K(s)); hard: f'(K(s)) is replaced by the
// multiplier z(s) = 1/2 + int_0^s psi(C(s,u)) R(s,u) du and K is pinned to 1.
enum class ConstraintMode { Soft, Hard };

struct SolverConfig {
    double h = 0.005;
    double T = 2.0;
    double K0 = 1.0;              // C(0,0); ignored in hard mode
    double corrector_tol = 1e-10;
    int corrector_max_iter = 50;
    ConstraintMode mode = ConstraintMode::Soft;

    int n() const;                // grid size, t_k = k*h for k = 0..n-1
    void validate() const;
};

struct SolverDiagnostics {
    int max_sweeps = 0;           // worst corrector sweep count over rows
    long total_sweeps = 0;
    double worst_correction = 0.0; // last sweep's correction at the worst row
};

struct CorrectorError : std::runtime_error {
    int row;
    double residual;
    CorrectorError(int row_, double residual_)
        : std::runtime_error("corrector did not converge at row " + std::to_string(row_) +
                             " (residual " + std::to_string(residual_) + ")"),
          row(row_), residual(residual_) {}
};

// Solution of the limiting two-time system on the causal triangular grid.
// Off-triangle reads: R vanishes for t > s, C mirrors, chi freezes at its
// diagonal value (the response is causal).
class CKSolution {
public:
    CKSolution(double h, int n, ConstraintMode mode)
        : mode_(mode), R_(h, n), C_(h, n), chi_(h, n),
          K_(static_cast<std::size_t>(n), 0.0),
          zlag_(mode == ConstraintMode::Hard ? static_cast<std::size_t>(n) : 0, 0.0) {}

    double h() const { return R_.h(); }
    int n() const { return R_.n(); }
    double time(int i) const { return R_.time(i); }
    ConstraintMode mode() const { return mode_; }

    double R(int i, int j) const { return j > i ? 0.0 : R_.at(i, j); }
    double C(int i, int j) const { return j > i ? C_.at(j, i) : C_.at(i, j); }
    double chi(int i, int j) const { return chi_.at(i, std::min(i, j)); }
    double K(int i) const { return K_[static_cast<std::size_t>(i)]; }
    double z(int i) const { return zlag_[static_cast<std::size_t>(i)]; }

    // f'(K(s)) in soft mode, the multiplier z(s) in hard mode
    double fp(int i, const ConfinementSpec& conf) const {
        return mode_ == ConstraintMode::Hard ? z(i) : conf.f_prime(K(i));
    }

    TriGrid& R_grid() { return R_; }
    TriGrid& C_grid() { return C_; }
    TriGrid& chi_grid() { return chi_; }
    const TriGrid& R_grid() const { return R_; }
    const TriGrid& C_grid() const { return C_; }
    const TriGrid& chi_grid() const { return chi_; }
    std::vector<double>& K_values() { return K_; }
    std::vector<double>& z_values() { return zlag_; }
    const std::vector<double>& K_values() const { return K_; }
    const std::vector<double>& z_values() const { return zlag_; }

    SolverDiagnostics diagnostics;

private:
    ConstraintMode mode_;
    TriGrid R_, C_, chi_;
    std::vector<double> K_, zlag_;
};

// March the coupled (R, C, K) system row by row in s: explicit-Euler
// predictor, then fixed-point corrector sweeps of the implicit trapezoidal
// scheme until the row stabilizes to corrector_tol. chi is filled from R at
// the end.
CKSolution solve_ck(const ModelSpec& model, const SolverConfig& config);

// chi(s,t) = int_0^t R(s,u) du by cumulative trapezoid along the second
// argument; chi(s,t) = chi(s,s) for t >= s since R vanishes there.
TriGrid chi_from_R(const CKSolution& sol);

// Sup-norm residuals of the integral form of the system, with D and E
// reconstructed from (R, C, K) via the differentiation identities
// D = d/dt (C - chi) and the closed expression for E.
struct ResidualReport {
    double eq_c = 0.0;      // C(s,t) = C(s,0) + chi(s,t) + int_0^t D(s,u) du
    double eq_chi = 0.0;    // chi(s,t) = s^t + int_0^s E(u,t) du
    double eq_d = 0.0;
    double eq_e = 0.0;
    double boundary_e0 = 0.0;   // sup |E(s,0)|
    double boundary_ess = 0.0;  // sup_{t>=s} |E(s,t) - E(s,s)|
    double max_equation() const;
};
ResidualReport residual_integral_system(const CKSolution& sol, const ModelSpec& model);

// Full-square reconstructions used by the residual checker (also handy for
// diagnostics): D(s,t) = -f'(K(t)) C(t,s) + int_0^{s v t} nu'(C(t,u)) R(s,u) du
//                        + int_0^{s v t} C(s,u) nu''(C(t,u)) R(t,u) du
// and E(s,t) = -f'(K(s)) chi(s,t) + int_0^s chi(u,t) nu''(C(s,u)) R(s,u) du
// for s >= t, frozen at E(s,s) beyond.
Matrix reconstruct_D(const CKSolution& sol, const ModelSpec& model);
Matrix reconstruct_E(const CKSolution& sol, const ModelSpec& model);

// Solve at h, h/2, h/4, ...; restrict to the coarsest grid and report
// successive sup-norm differences with the observed convergence order.
struct RefineRow {
    double h_fine = 0.0;
    double sup_diff = 0.0;
    double observed_order = 0.0;  // NaN on the first row
};
std::vector<RefineRow> grid_refine_compare(const ModelSpec& model, SolverConfig config,
                                           int levels);

} // namespace pspin
