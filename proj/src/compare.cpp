#include "pspin/compare.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pspin/rng.hpp"

namespace pspin {

namespace {

std::string fmt(double v, const char* f = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

// map each empirical snapshot time onto the limit grid; requires exact node
// hits (the solver step divides the snapshot spacing)
std::vector<std::pair<int, int>> common_grid(const std::vector<double>& emp_times,
                                             const std::vector<double>& lim_times) {
    if (lim_times.size() < 2 && emp_times.size() > 1)
        throw std::invalid_argument("compare: limit grid too coarse");
    const double h = lim_times.size() > 1 ? lim_times[1] - lim_times[0] : 1.0;
    const double t_max = lim_times.back();
    std::vector<std::pair<int, int>> map;  // (empirical index, limit index)
    for (std::size_t a = 0; a < emp_times.size(); ++a) {
        const double t = emp_times[a];
        if (t > t_max + 1e-9 * std::max(1.0, t_max)) break;
        const int k = static_cast<int>(std::llround(t / h));
        if (k < 0 || k >= static_cast<int>(lim_times.size()) ||
            std::abs(lim_times[static_cast<std::size_t>(k)] - t) > 1e-9 * std::max(1.0, std::abs(t)))
            throw std::invalid_argument(
                "compare: snapshot time " + fmt(t) +
                " is not a limit-grid node (solver h must divide the snapshot spacing)");
        map.emplace_back(static_cast<int>(a), k);
    }
    if (map.empty()) throw std::invalid_argument("compare: grids share no times");
    return map;
}

template <typename LimC, typename LimChi>
ComparisonReport compare_impl(const EmpiricalObservables& emp,
                              const std::vector<double>& lim_times, LimC&& lim_C,
                              LimChi&& lim_chi, double tol) {
    const auto map = common_grid(emp.times, lim_times);
    ComparisonReport rep;
    rep.tol = tol;
    rep.n_common = static_cast<int>(map.size());
    double ss_c = 0.0, ss_chi = 0.0;
    long cnt = 0;
    for (std::size_t ai = 0; ai < map.size(); ++ai) {
        for (std::size_t bi = 0; bi <= ai; ++bi) {
            const auto [ea, la] = map[ai];
            const auto [eb, lb] = map[bi];
            ComparisonEntry e;
            e.s = emp.times[static_cast<std::size_t>(ea)];
            e.t = emp.times[static_cast<std::size_t>(eb)];
            e.c_emp = emp.C(ea, eb);
            e.chi_emp = emp.chi(ea, eb);
            e.c_lim = lim_C(la, lb);
            e.chi_lim = lim_chi(la, lb);
            e.c_se = std::sqrt(std::max(0.0, emp.var_C(ea, eb)));
            e.chi_se = std::sqrt(std::max(0.0, emp.var_chi(ea, eb)));
            rep.entries.push_back(e);
            const double dc = std::abs(e.c_emp - e.c_lim);
            const double dx = std::abs(e.chi_emp - e.chi_lim);
            rep.sup_C = std::max(rep.sup_C, dc);
            rep.sup_chi = std::max(rep.sup_chi, dx);
            ss_c += dc * dc;
            ss_chi += dx * dx;
            ++cnt;
        }
    }
    rep.rms_C = std::sqrt(ss_c / cnt);
    rep.rms_chi = std::sqrt(ss_chi / cnt);
    rep.pass = rep.sup_C <= tol && rep.sup_chi <= tol;
    return rep;
}

} // namespace

ComparisonReport compare_grids(const EmpiricalObservables& emp, const CKSolution& limit,
                               double tol) {
    std::vector<double> lim_times(static_cast<std::size_t>(limit.n()));
    for (int i = 0; i < limit.n(); ++i) lim_times[static_cast<std::size_t>(i)] = limit.time(i);
    return compare_impl(
        emp, lim_times, [&](int i, int j) { return limit.C(i, j); },
        [&](int i, int j) { return limit.chi(i, j); }, tol);
}

ComparisonReport compare_grids(const EmpiricalObservables& emp, const SolutionGrids& limit,
                               double tol) {
    return compare_impl(
        emp, limit.times, [&](int i, int j) { return limit.C(i, j); },
        [&](int i, int j) { return limit.chi(i, j); }, tol);
}

std::string ComparisonReport::summary_text() const {
    std::ostringstream os;
    os << "common grid times: " << n_common << "\n"
       << "sup |C_N - C|    = " << fmt(sup_C) << "   rms " << fmt(rms_C) << "\n"
       << "sup |chi_N - chi| = " << fmt(sup_chi) << "   rms " << fmt(rms_chi) << "\n"
       << "tolerance        = " << fmt(tol) << "\n"
       << "result           = " << (pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

std::string ComparisonReport::long_csv() const {
    std::string out = "s,t,value,source\n";
    auto row = [&out](double s, double t, double v, const char* src) {
        out += fmt(s, "%.17g");
        out += ',';
        out += fmt(t, "%.17g");
        out += ',';
        out += fmt(v, "%.17g");
        out += ',';
        out += src;
        out += '\n';
    };
    for (const auto& e : entries) {
        row(e.s, e.t, e.c_emp, "C_empirical");
        row(e.s, e.t, e.c_lim, "C_limit");
        row(e.s, e.t, e.c_emp - e.c_lim, "C_diff");
        row(e.s, e.t, e.c_se, "C_se");
        row(e.s, e.t, e.chi_emp, "chi_empirical");
        row(e.s, e.t, e.chi_lim, "chi_limit");
        row(e.s, e.t, e.chi_emp - e.chi_lim, "chi_diff");
        row(e.s, e.t, e.chi_se, "chi_se");
    }
    return out;
}

EmpiricalObservables simulate_averaged(const ModelSpec& model, const SimConfig& sim,
                                       DisorderMode mode) {
    std::vector<EmpiricalObservables> runs(static_cast<std::size_t>(sim.n_realizations));
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < sim.n_realizations; ++r) {
        try {
            const auto J = sample_disorder(
                model, derive_seed(sim.base_seed, SeedStream::Disorder, static_cast<std::uint64_t>(r)),
                mode);
            runs[static_cast<std::size_t>(r)] = run_trajectory(model, J, sim, r);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return average_realizations(runs);
}

std::string ConvergenceStudy::table_text() const {
    std::ostringstream os;
    os << "sup |C_N - C| over (N, h):\n";
    os << "      N \\ h";
    for (double h : h_values) os << "  " << fmt(h, "%10.5g");
    os << "   var(C)\n";
    std::size_t c = 0;
    for (std::size_t in = 0; in < N_values.size(); ++in) {
        os << fmt(static_cast<double>(N_values[in]), "%11.0f");
        for (std::size_t ih = 0; ih < h_values.size(); ++ih)
            os << "  " << fmt(cells[c++].sup_C, "%10.4g");
        os << "  " << fmt(mean_var_C[in], "%8.3g") << "\n";
    }
    return os.str();
}

ConvergenceStudy convergence_study(const ModelSpec& base_model, const SimConfig& base_sim,
                                   const SolverConfig& base_solver, DisorderMode mode,
                                   const std::vector<int>& N_values,
                                   const std::vector<double>& h_values) {
    if (N_values.empty() || h_values.empty())
        throw std::invalid_argument("convergence study: need at least one N and one h");
    ConvergenceStudy study;
    study.N_values = N_values;
    study.h_values = h_values;

    std::vector<CKSolution> sols;
    sols.reserve(h_values.size());
    for (double h : h_values) {
        SolverConfig sc = base_solver;
        sc.h = h;
        sols.push_back(solve_ck(base_model, sc));
    }

    for (int N : N_values) {
        ModelSpec model = base_model;
        model.N = N;
        model.validate();
        SimConfig sim = base_sim;
        sim.base_seed = derive_seed(base_sim.base_seed, SeedStream::Trajectory,
                                    static_cast<std::uint64_t>(N));
        const auto obs = simulate_averaged(model, sim, mode);
        double var_sum = 0.0;
        for (double v : obs.var_C.a) var_sum += v;
        study.mean_var_C.push_back(var_sum / static_cast<double>(obs.var_C.a.size()));
        for (const auto& sol : sols) {
            const auto rep = compare_grids(obs, sol, 1.0);
            ConvergenceCell cell;
            cell.N = N;
            cell.h = sol.h();
            cell.sup_C = rep.sup_C;
            cell.sup_chi = rep.sup_chi;
            study.cells.push_back(cell);
        }
    }
    return study;
}

} // namespace pspin
