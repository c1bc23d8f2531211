#include "pspin/ck_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pspin {

int SolverConfig::n() const {
    return static_cast<int>(std::llround(T / h)) + 1;
}

void SolverConfig::validate() const {
    if (h <= 0.0) throw std::invalid_argument("solver: h must be > 0");
    if (T < h) throw std::invalid_argument("solver: T must be >= h");
    const double steps = T / h;
    if (std::abs(steps - std::llround(steps)) > 1e-6)
        throw std::invalid_argument("solver: T must be an integer multiple of h");
    if (mode == ConstraintMode::Soft && K0 <= 0.0)
        throw std::invalid_argument("solver: K0 must be > 0 in soft mode");
    if (corrector_tol <= 0.0) throw std::invalid_argument("solver: corrector_tol must be > 0");
    if (corrector_max_iter < 1) throw std::invalid_argument("solver: corrector_max_iter must be >= 1");
}

namespace {

// Row-by-row integrator state. All memory integrals are trapezoidal on the
// uniform grid; the corrector iterates the implicit trapezoid equations for
// the new row to a fixed point (Gauss-Seidel over the row entries).
struct Marcher {
    const ModelSpec& model;
    const SolverConfig& cfg;
    NuPolynomial nu;
    CKSolution sol;
    double h;

    Marcher(const ModelSpec& model_, const SolverConfig& cfg_)
        : model(model_), cfg(cfg_), nu(model_),
          sol(cfg_.h, cfg_.n(), cfg_.mode), h(cfg_.h) {}

    bool hard() const { return cfg.mode == ConstraintMode::Hard; }
    double fp(int i) const { return sol.fp(i, model.confinement); }
    double Rv(int i, int j) const { return sol.R_grid().at(i, j); }
    double Cv(int i, int j) const { return sol.C_grid().at(i, j); }
    double Cm(int i, int j) const { return j > i ? sol.C_grid().at(j, i) : sol.C_grid().at(i, j); }
    double Kv(int i) const { return sol.K_values()[static_cast<std::size_t>(i)]; }

    template <typename F>
    double trapz(int lo, int hi, F&& f) const {
        if (hi <= lo) return 0.0;
        double s = 0.5 * (f(lo) + f(hi));
        for (int k = lo + 1; k < hi; ++k) s += f(k);
        return s * h;
    }

    // ds R(s,t) = -f'(K(s)) R(s,t) + int_t^s R(u,t) R(s,u) nu''(C(s,u)) du
    double FR(int i, int j) const {
        return -fp(i) * Rv(i, j) +
               trapz(j, i, [&](int k) { return Rv(k, j) * Rv(i, k) * nu.nu2(Cv(i, k)); });
    }

    // ds C(s,t) = -f'(K(s)) C(s,t) + int_0^s C(u,t) R(s,u) nu''(C(s,u)) du
    //             + int_0^t nu'(C(s,u)) R(t,u) du
    double FC(int i, int j) const {
        return -fp(i) * Cv(i, j) +
               trapz(0, i, [&](int k) { return Cm(k, j) * Rv(i, k) * nu.nu2(Cv(i, k)); }) +
               trapz(0, j, [&](int k) { return nu.nu1(Cv(i, k)) * Rv(j, k); });
    }

    // ds K(s) = -2 f'(K(s)) K(s) + 1 + 2 int_0^s psi(C(s,u)) R(s,u) du
    double FK(int i) const {
        return -2.0 * fp(i) * Kv(i) + 1.0 +
               2.0 * trapz(0, i, [&](int k) { return nu.psi(Cv(i, k)) * Rv(i, k); });
    }

    // z(s) = 1/2 + int_0^s psi(C(s,u)) R(s,u) du (hard constraint)
    double z_of_row(int i) const {
        return 0.5 + trapz(0, i, [&](int k) { return nu.psi(Cv(i, k)) * Rv(i, k); });
    }

    void init_row0() {
        const double K0 = hard() ? 1.0 : cfg.K0;
        sol.K_values()[0] = K0;
        sol.C_grid().at(0, 0) = K0;
        sol.R_grid().at(0, 0) = 1.0;
        if (hard()) sol.z_values()[0] = 0.5;
    }

    // Midpoint-refined predictor for the first row: one explicit Euler half
    // step to s = h/2, then a full step with the midpoint derivatives. Memory
    // integrals at s = 0 are empty; at the midpoint they use the two-point
    // trapezoid on {0, h/2}.
    void predict_row1() {
        const double K0 = Kv(0);
        const double fp0 = fp(0);
        double K_half = hard() ? 1.0 : K0 + 0.5 * h * (-2.0 * fp0 * K0 + 1.0);
        double R_half = 1.0 - 0.5 * h * fp0;
        double C_half = K0 * (1.0 - 0.5 * h * fp0);
        const double quarter = 0.25 * h;
        double fp_half;
        if (hard())
            fp_half = 0.5 + quarter * (nu.psi(C_half) * R_half + nu.psi(K_half));
        else
            fp_half = model.confinement.f_prime(K_half);

        const double FR_mid =
            -fp_half * R_half + quarter * (R_half * nu.nu2(C_half) + R_half * nu.nu2(K_half));
        const double FC_mid =
            -fp_half * C_half + quarter * (K0 * R_half * nu.nu2(C_half) + C_half * nu.nu2(K_half));
        const double FK_mid = -2.0 * fp_half * K_half + 1.0 +
                              2.0 * quarter * (nu.psi(C_half) * R_half + nu.psi(K_half));

        sol.K_values()[1] = hard() ? 1.0 : K0 + h * FK_mid;
        sol.R_grid().at(1, 0) = 1.0 + h * FR_mid;
        sol.C_grid().at(1, 0) = K0 + h * FC_mid;
        sol.R_grid().at(1, 1) = 1.0;
        sol.C_grid().at(1, 1) = hard() ? 1.0 : Kv(1);
        if (hard()) sol.z_values()[1] = z_of_row(1);
    }

    void advance(int i) {
        // derivatives of the completed row, reused across corrector sweeps
        std::vector<double> fr(static_cast<std::size_t>(i) + 1), fc(static_cast<std::size_t>(i) + 1);
        for (int j = 0; j <= i; ++j) {
            fr[static_cast<std::size_t>(j)] = FR(i, j);
            fc[static_cast<std::size_t>(j)] = FC(i, j);
        }
        const double fk = hard() ? 0.0 : FK(i);

        if (i == 0) {
            predict_row1();
        } else {
            sol.K_values()[static_cast<std::size_t>(i) + 1] =
                hard() ? 1.0 : Kv(i) + h * fk;
            for (int j = 0; j <= i; ++j) {
                sol.R_grid().at(i + 1, j) = Rv(i, j) + h * fr[static_cast<std::size_t>(j)];
                sol.C_grid().at(i + 1, j) = Cv(i, j) + h * fc[static_cast<std::size_t>(j)];
            }
            sol.R_grid().at(i + 1, i + 1) = 1.0;
            sol.C_grid().at(i + 1, i + 1) = hard() ? 1.0 : Kv(i + 1);
            if (hard()) sol.z_values()[static_cast<std::size_t>(i) + 1] = z_of_row(i + 1);
        }

        int sweeps = 0;
        double delta = std::numeric_limits<double>::infinity();
        while (sweeps < cfg.corrector_max_iter) {
            delta = 0.0;
            if (hard()) {
                const double znew = z_of_row(i + 1);
                delta = std::max(delta, std::abs(znew - sol.z_values()[static_cast<std::size_t>(i) + 1]));
                sol.z_values()[static_cast<std::size_t>(i) + 1] = znew;
            } else {
                const double Knew = Kv(i) + 0.5 * h * (fk + FK(i + 1));
                delta = std::max(delta, std::abs(Knew - Kv(i + 1)));
                sol.K_values()[static_cast<std::size_t>(i) + 1] = Knew;
                sol.C_grid().at(i + 1, i + 1) = Knew;
            }
            for (int j = 0; j <= i; ++j) {
                const double Rnew = Rv(i, j) + 0.5 * h * (fr[static_cast<std::size_t>(j)] + FR(i + 1, j));
                delta = std::max(delta, std::abs(Rnew - Rv(i + 1, j)));
                sol.R_grid().at(i + 1, j) = Rnew;
                const double Cnew = Cv(i, j) + 0.5 * h * (fc[static_cast<std::size_t>(j)] + FC(i + 1, j));
                delta = std::max(delta, std::abs(Cnew - Cv(i + 1, j)));
                sol.C_grid().at(i + 1, j) = Cnew;
            }
            ++sweeps;
            if (delta <= cfg.corrector_tol) break;
        }
        sol.diagnostics.total_sweeps += sweeps;
        if (sweeps > sol.diagnostics.max_sweeps) {
            sol.diagnostics.max_sweeps = sweeps;
            sol.diagnostics.worst_correction = delta;
        }
        if (delta > cfg.corrector_tol) throw CorrectorError(i + 1, delta);
        if (!std::isfinite(Kv(i + 1)) || !std::isfinite(Rv(i + 1, 0)) || !std::isfinite(Cv(i + 1, 0)))
            throw std::runtime_error("solver: non-finite values at row " + std::to_string(i + 1));
    }
};

} // namespace

CKSolution solve_ck(const ModelSpec& model, const SolverConfig& config) {
    model.validate();
    config.validate();
    Marcher m(model, config);
    m.init_row0();
    const int n = config.n();
    for (int i = 0; i + 1 < n; ++i) m.advance(i);
    m.sol.chi_grid() = chi_from_R(m.sol);
    return std::move(m.sol);
}

TriGrid chi_from_R(const CKSolution& sol) {
    const int n = sol.n();
    TriGrid chi(sol.h(), n);
    for (int i = 0; i < n; ++i) {
        chi.at(i, 0) = 0.0;
        double run = 0.0;
        for (int j = 1; j <= i; ++j) {
            run += 0.5 * sol.h() * (sol.R_grid().at(i, j - 1) + sol.R_grid().at(i, j));
            chi.at(i, j) = run;
        }
    }
    return chi;
}

namespace {

template <typename F>
double trapz_grid(double h, int lo, int hi, F&& f) {
    if (hi <= lo) return 0.0;
    double s = 0.5 * (f(lo) + f(hi));
    for (int k = lo + 1; k < hi; ++k) s += f(k);
    return s * h;
}

} // namespace

Matrix reconstruct_D(const CKSolution& sol, const ModelSpec& model) {
    const int n = sol.n();
    const double h = sol.h();
    NuPolynomial nu(model);
    Matrix D(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int M = std::max(i, j);
            // integrals against R stop at the response's causal edge
            const double I1 = trapz_grid(h, 0, std::min(i, M), [&](int k) {
                return nu.nu1(sol.C(j, k)) * sol.R(i, k);
            });
            const double I2 = trapz_grid(h, 0, std::min(j, M), [&](int k) {
                return sol.C(i, k) * nu.nu2(sol.C(j, k)) * sol.R(j, k);
            });
            D(i, j) = -sol.fp(j, model.confinement) * sol.C(j, i) + I1 + I2;
        }
    return D;
}

Matrix reconstruct_E(const CKSolution& sol, const ModelSpec& model) {
    const int n = sol.n();
    const double h = sol.h();
    NuPolynomial nu(model);
    Matrix E(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double mem = trapz_grid(h, 0, i, [&](int k) {
                return sol.chi(k, j) * nu.nu2(sol.C(i, k)) * sol.R(i, k);
            });
            E(i, j) = -sol.fp(i, model.confinement) * sol.chi(i, j) + mem;
        }
        for (int j = i + 1; j < n; ++j) E(i, j) = E(i, i);
    }
    return E;
}

double ResidualReport::max_equation() const {
    return std::max(std::max(eq_c, eq_chi), std::max(eq_d, eq_e));
}

ResidualReport residual_integral_system(const CKSolution& sol, const ModelSpec& model) {
    const int n = sol.n();
    const double h = sol.h();
    NuPolynomial nu(model);
    const Matrix D = reconstruct_D(sol, model);
    const Matrix E = reconstruct_E(sol, model);

    ResidualReport rep;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double ti = sol.time(i), tj = sol.time(j);

            // C(s,t) = C(s,0) + chi(s,t) + int_0^t D(s,u) du
            const double rhs_c = sol.C(i, 0) + sol.chi(i, j) +
                                 trapz_grid(h, 0, j, [&](int k) { return D(i, k); });
            rep.eq_c = std::max(rep.eq_c, std::abs(sol.C(i, j) - rhs_c));

            // chi(s,t) = s ^ t + int_0^s E(u,t) du
            const double rhs_chi = std::min(ti, tj) +
                                   trapz_grid(h, 0, i, [&](int k) { return E(k, j); });
            rep.eq_chi = std::max(rep.eq_chi, std::abs(sol.chi(i, j) - rhs_chi));

            // D(s,t) = -f'(C(t,t)) C(t,s) - int_0^{svt} nu'(C(t,u)) D(s,u) du
            //          - int_0^{svt} C(s,u) nu''(C(t,u)) D(t,u) du
            //          + C(s,svt) nu'(C(svt,t)) - C(s,0) nu'(C(0,t))
            const int M = std::max(i, j);
            const double rhs_d =
                -sol.fp(j, model.confinement) * sol.C(j, i) -
                trapz_grid(h, 0, M, [&](int k) { return nu.nu1(sol.C(j, k)) * D(i, k); }) -
                trapz_grid(h, 0, M, [&](int k) { return sol.C(i, k) * nu.nu2(sol.C(j, k)) * D(j, k); }) +
                sol.C(i, M) * nu.nu1(sol.C(M, j)) - sol.C(i, 0) * nu.nu1(sol.C(0, j));
            rep.eq_d = std::max(rep.eq_d, std::abs(D(i, j) - rhs_d));

            // E(s,t) = -f'(C(s,s)) chi(s,t) - int_0^s nu'(C(s,u)) E(u,t) du
            //          - int_0^s chi(u,t) nu''(C(s,u)) D(s,u) du
            //          + chi(s,t) nu'(C(s,s)) - int_0^{s^t} nu'(C(s,u)) du
            const double rhs_e =
                -sol.fp(i, model.confinement) * sol.chi(i, j) -
                trapz_grid(h, 0, i, [&](int k) { return nu.nu1(sol.C(i, k)) * E(k, j); }) -
                trapz_grid(h, 0, i, [&](int k) { return sol.chi(k, j) * nu.nu2(sol.C(i, k)) * D(i, k); }) +
                sol.chi(i, j) * nu.nu1(sol.K(i)) -
                trapz_grid(h, 0, std::min(i, j), [&](int k) { return nu.nu1(sol.C(i, k)); });
            rep.eq_e = std::max(rep.eq_e, std::abs(E(i, j) - rhs_e));

            if (j == 0) rep.boundary_e0 = std::max(rep.boundary_e0, std::abs(E(i, 0)));
            if (j >= i) rep.boundary_ess = std::max(rep.boundary_ess, std::abs(E(i, j) - E(i, i)));
        }
    }
    return rep;
}

std::vector<RefineRow> grid_refine_compare(const ModelSpec& model, SolverConfig config,
                                           int levels) {
    std::vector<RefineRow> table;
    if (levels < 2) return table;

    std::vector<CKSolution> sols;
    sols.reserve(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        SolverConfig c = config;
        c.h = config.h / static_cast<double>(1 << l);
        sols.push_back(solve_ck(model, c));
    }

    const int n0 = sols[0].n();
    double prev_diff = 0.0;
    for (int l = 0; l + 1 < levels; ++l) {
        const int sa = 1 << l, sb = 1 << (l + 1);
        double d = 0.0;
        for (int i = 0; i < n0; ++i) {
            d = std::max(d, std::abs(sols[static_cast<std::size_t>(l)].K(i * sa) -
                                     sols[static_cast<std::size_t>(l) + 1].K(i * sb)));
            for (int j = 0; j <= i; ++j) {
                d = std::max(d, std::abs(sols[static_cast<std::size_t>(l)].R(i * sa, j * sa) -
                                         sols[static_cast<std::size_t>(l) + 1].R(i * sb, j * sb)));
                d = std::max(d, std::abs(sols[static_cast<std::size_t>(l)].C(i * sa, j * sa) -
                                         sols[static_cast<std::size_t>(l) + 1].C(i * sb, j * sb)));
                d = std::max(d, std::abs(sols[static_cast<std::size_t>(l)].chi(i * sa, j * sa) -
                                         sols[static_cast<std::size_t>(l) + 1].chi(i * sb, j * sb)));
            }
        }
        RefineRow row;
        row.h_fine = config.h / static_cast<double>(1 << (l + 1));
        row.sup_diff = d;
        row.observed_order = (l == 0) ? std::numeric_limits<double>::quiet_NaN()
                                      : std::log2(prev_diff / d);
        prev_diff = d;
        table.push_back(row);
    }
    return table;
}

} // namespace pspin
