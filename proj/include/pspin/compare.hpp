#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pspin/ck_solver.hpp"
#include "pspin/io.hpp"
#include "pspin/langevin.hpp"

namespace pspin {

// Empirical-vs-limit differences on the common triangular grid (s >= t).
// The limit grid is restricted to the empirical snapshot times by rounding
// each snapshot to the nearest solver node (the solver step must divide the
// snapshot spacing, so the restriction is exact, never interpolated).
struct ComparisonEntry {
    double s = 0.0, t = 0.0;
    double c_emp = 0.0, c_lim = 0.0, c_se = 0.0;
    double chi_emp = 0.0, chi_lim = 0.0, chi_se = 0.0;
};
struct ComparisonReport {
    int n_common = 0;            // common grid times
    double sup_C = 0.0, rms_C = 0.0;
    double sup_chi = 0.0, rms_chi = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::vector<ComparisonEntry> entries;

    std::string summary_text() const;
    std::string long_csv() const;  // s,t,value,source rows for plotting
};

ComparisonReport compare_grids(const EmpiricalObservables& emp, const CKSolution& limit,
                               double tol);
ComparisonReport compare_grids(const EmpiricalObservables& emp, const SolutionGrids& limit,
                               double tol);

// Sup-differences simulator-vs-solver over an (N, h) matrix, plus the
// realization spread per N.
struct ConvergenceCell {
    int N = 0;
    double h = 0.0;
    double sup_C = 0.0;
    double sup_chi = 0.0;
};
struct ConvergenceStudy {
    std::vector<int> N_values;
    std::vector<double> h_values;
    std::vector<ConvergenceCell> cells;        // row-major over (N, h)
    std::vector<double> mean_var_C;            // mean variance-of-mean per N
    std::string table_text() const;
};
ConvergenceStudy convergence_study(const ModelSpec& base_model, const SimConfig& base_sim,
                                   const SolverConfig& base_solver, DisorderMode mode,
                                   const std::vector<int>& N_values,
                                   const std::vector<double>& h_values);

// Shared by the CLI and the study: run n_realizations trajectories with
// fresh disorder per realization and average them.
EmpiricalObservables simulate_averaged(const ModelSpec& model, const SimConfig& sim,
                                       DisorderMode mode);

} // namespace pspin
