#include "pspin/cli.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pspin/compare.hpp"
#include "pspin/io.hpp"
#include "pspin/oracles.hpp"
#include "pspin/rng.hpp"

namespace pspin {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        if (next > pos) out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
        if (next == s.size()) break;
    }
    return out;
}

struct CommonFlags {
    std::string config;
    std::string out_dir;
    std::optional<long long> seed;
    std::optional<int> realizations;
    std::optional<std::string> disorder;
    std::optional<std::string> mode;
};

KeyValueFile load_config(const CommonFlags& flags) {
    KeyValueFile cfg = flags.config.empty() ? KeyValueFile()
                                            : KeyValueFile::parse_file(flags.config);
    if (flags.seed) cfg.set("seed", static_cast<long long>(*flags.seed));
    if (flags.realizations) cfg.set("sim.realizations", static_cast<long long>(*flags.realizations));
    if (flags.disorder) cfg.set("disorder.mode", *flags.disorder);
    if (flags.mode) cfg.set("solver.mode", *flags.mode);
    return cfg;
}

int run_simulate(const CommonFlags& flags) {
    const auto cfg = load_config(flags);
    const ModelSpec model = model_from_config(cfg);
    const SimConfig sim = sim_from_config(cfg);
    const DisorderMode mode = disorder_mode_from_config(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const EmpiricalObservables obs = simulate_averaged(model, sim, mode);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    KeyValueFile manifest;
    echo_model(manifest, model);
    echo_sim(manifest, sim);
    manifest.set("disorder.mode", mode == DisorderMode::Decoupled ? "decoupled" : "exact");
    manifest.set("wall_seconds", wall);
    write_observables(flags.out_dir, obs, manifest);
    std::cout << "wrote " << obs.times.size() << "x" << obs.times.size()
              << " observables to " << flags.out_dir << " (" << sim.n_realizations
              << " realizations, " << wall << " s)\n";
    return 0;
}

int run_solve(const CommonFlags& flags) {
    const auto cfg = load_config(flags);
    const ModelSpec model = model_from_config(cfg);
    const SolverConfig sc = solver_from_config(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const CKSolution sol = solve_ck(model, sc);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    KeyValueFile manifest;
    echo_model(manifest, model);
    echo_solver(manifest, sc);
    manifest.set("wall_seconds", wall);
    write_solution(flags.out_dir, sol, manifest);
    std::cout << "wrote " << sol.n() << "-point solution to " << flags.out_dir << " ("
              << sol.diagnostics.max_sweeps << " corrector sweeps worst case, " << wall << " s)\n";
    return 0;
}

int run_compare(const std::string& emp_dir, const std::string& lim_dir, double tol,
                const std::string& out_dir) {
    const EmpiricalObservables emp = read_observables(emp_dir);
    const SolutionGrids lim = read_solution_grids(lim_dir);
    const ComparisonReport rep = compare_grids(emp, lim, tol);
    std::cout << rep.summary_text();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_atomic(fs::path(out_dir) / "report.txt", rep.summary_text());
        write_text_atomic(fs::path(out_dir) / "report.csv", rep.long_csv());
    }
    return rep.pass ? 0 : 1;
}

int run_kernel_check(int N, long samples, long long seed, const std::string& config) {
    ModelSpec model;
    if (!config.empty()) {
        auto cfg = KeyValueFile::parse_file(config);
        cfg.set("N", static_cast<long long>(N));
        model = model_from_config(cfg);
    } else {
        model = ModelSpec::pure(3, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), N);
    }
    auto eng = make_engine(derive_seed(static_cast<std::uint64_t>(seed), SeedStream::McSample, 0xABC));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(N)), y(static_cast<std::size_t>(N));
    for (auto& v : x) v = gauss(eng);
    for (auto& v : y) v = gauss(eng);

    const auto rep = kernel_mc_check(model, samples, static_cast<std::uint64_t>(seed), {{x, y}});
    std::printf("  i  j   empirical      analytic        se      |dev|/se\n");
    for (const auto& e : rep.entries)
        std::printf("%3d %2d  %12.6g  %12.6g  %9.3g  %8.3f\n", e.i, e.j, e.empirical, e.analytic,
                    e.std_error, e.std_dev);
    std::printf("max standardized deviation: %.3f (%ld samples)\n", rep.max_std_dev, rep.n_samples);
    return rep.max_std_dev <= 5.0 ? 0 : 1;
}

int run_oracle_bessel(double tau) {
    std::printf("%.9g\n", bessel_h(tau));
    return 0;
}

int run_oracle_catalan(int n) {
    std::printf("%lld\n", catalan(n));
    return 0;
}

int run_oracle_nc(int n, bool list) {
    const auto pairings = nc_pairings_enumerate(n);
    if (list) {
        for (const auto& p : pairings) {
            std::string s;
            for (int i : p.left_points) {
                s += "(" + std::to_string(i + 1) + "," +
                     std::to_string(p.pairing[static_cast<std::size_t>(i)] + 1) + ")";
            }
            std::printf("%s\n", s.c_str());
        }
    }
    std::printf("%zu\n", pairings.size());
    return 0;
}

int run_oracle_h_series(double c, double tau, int n_max) {
    const auto r = h_series_nc_const(c, tau, n_max);
    std::printf("%.9g (truncation bound %.3g)\n", r.value, r.truncation_bound);
    return 0;
}

int run_oracle_beta_zero(double z, double K0, double s, double t) {
    const auto v = beta_zero_solution(z, K0, s, t);
    std::printf("R = %.9g\nC = %.9g\nK = %.9g\n", v.R, v.C, v.K);
    return 0;
}

int run_convergence_study(const CommonFlags& flags, const std::string& N_list,
                          const std::string& h_list) {
    const auto cfg = load_config(flags);
    const ModelSpec model = model_from_config(cfg);
    const SimConfig sim = sim_from_config(cfg);
    const SolverConfig sc = solver_from_config(cfg);
    const DisorderMode mode = disorder_mode_from_config(cfg);

    std::vector<int> Ns;
    for (const auto& s : split_list(N_list)) Ns.push_back(std::stoi(s));
    std::vector<double> hs;
    for (const auto& s : split_list(h_list)) hs.push_back(std::stod(s));

    const auto study = convergence_study(model, sim, sc, mode, Ns, hs);
    std::cout << study.table_text();
    if (!flags.out_dir.empty()) {
        std::string csv = "N,h,sup_C,sup_chi,mean_var_C\n";
        std::size_t c = 0;
        for (std::size_t in = 0; in < study.N_values.size(); ++in)
            for (std::size_t ih = 0; ih < study.h_values.size(); ++ih) {
                const auto& cell = study.cells[c++];
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", cell.N, cell.h,
                              cell.sup_C, cell.sup_chi, study.mean_var_C[in]);
                csv += buf;
            }
        fs::create_directories(flags.out_dir);
        write_text_atomic(fs::path(flags.out_dir) / "study.csv", csv);
    }
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Langevin dynamics of soft spherical p-spin models and their "
                 "two-time limit equations"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* sim = app.add_subcommand("simulate", "integrate the Langevin system and record "
                                               "two-time observables");
    sim->add_option("--config", flags.config, "key = value config file")->required();
    sim->add_option("--out", flags.out_dir, "output directory")->required();
    sim->add_option("--seed", flags.seed, "override the base seed");
    sim->add_option("--realizations", flags.realizations, "override the realization count");
    sim->add_option("--disorder", flags.disorder, "exact|decoupled")
        ->check(CLI::IsMember({"exact", "decoupled"}));

    auto* slv = app.add_subcommand("solve", "integrate the limiting two-time equations");
    slv->add_option("--config", flags.config, "key = value config file")->required();
    slv->add_option("--out", flags.out_dir, "output directory")->required();
    slv->add_option("--mode", flags.mode, "soft|hard")->check(CLI::IsMember({"soft", "hard"}));

    std::string cmp_emp, cmp_lim, cmp_out;
    double cmp_tol = 0.05;
    auto* cmp = app.add_subcommand("compare", "empirical vs limit grids on the common "
                                              "triangular grid");
    cmp->add_option("--empirical", cmp_emp, "simulate output directory")->required();
    cmp->add_option("--limit", cmp_lim, "solve output directory")->required();
    cmp->add_option("--tol", cmp_tol, "sup-norm tolerance");
    cmp->add_option("--out", cmp_out, "report output directory");

    int kc_N = 4;
    long kc_samples = 1000000;
    long long kc_seed = 0;
    std::string kc_config;
    auto* kc = app.add_subcommand("kernel-check", "Monte-Carlo check of the drift covariance "
                                                  "kernel");
    kc->add_option("--N", kc_N, "system size (<= 16)");
    kc->add_option("--samples", kc_samples, "disorder samples");
    kc->add_option("--seed", kc_seed, "seed");
    kc->add_option("--config", kc_config, "model config (defaults to pure p=3)");

    auto* orc = app.add_subcommand("oracle", "closed-form and combinatorial reference values");
    orc->require_subcommand(1);
    double tau = 1.0, oc_c = 1.0, oz = 1.0, oK0 = 1.0, os_ = 1.0, ot = 0.0;
    int on = 1, on_max = 4;
    auto* bes = orc->add_subcommand("bessel", "Catalan/semicircle series h(tau)");
    bes->add_option("--tau", tau, "argument")->required();
    auto* cat = orc->add_subcommand("catalan", "Catalan number C_n");
    cat->add_option("--n", on, "index")->required();
    auto* ncc = orc->add_subcommand("nc-count", "number of non-crossing pairings of 2n points");
    ncc->add_option("--n", on, "pair count")->required();
    auto* ncl = orc->add_subcommand("nc-list", "list the non-crossing pairings");
    ncl->add_option("--n", on, "pair count")->required();
    auto* hs = orc->add_subcommand("h-series", "truncated pairing series, constant kernel");
    hs->add_option("--c", oc_c, "kernel value");
    hs->add_option("--tau", tau, "time difference")->required();
    hs->add_option("--n-max", on_max, "truncation order (<= 4)");
    auto* bz = orc->add_subcommand("beta-zero", "closed form at vanishing interaction");
    bz->add_option("--z", oz, "constant f'")->required();
    bz->add_option("--K0", oK0, "initial C(0,0)");
    bz->add_option("--s", os_, "later time")->required();
    bz->add_option("--t", ot, "earlier time");

    std::string cs_N = "100,200", cs_h = "0.01,0.005";
    auto* cs = app.add_subcommand("convergence-study", "sup-difference matrix over (N, h)");
    cs->add_option("--config", flags.config, "key = value config file")->required();
    cs->add_option("--N", cs_N, "comma-separated system sizes");
    cs->add_option("--h", cs_h, "comma-separated solver steps");
    cs->add_option("--out", flags.out_dir, "output directory");
    cs->add_option("--seed", flags.seed, "override the base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_simulate(flags);
        if (slv->parsed()) return run_solve(flags);
        if (cmp->parsed()) return run_compare(cmp_emp, cmp_lim, cmp_tol, cmp_out);
        if (kc->parsed()) return run_kernel_check(kc_N, kc_samples, kc_seed, kc_config);
        if (cs->parsed()) return run_convergence_study(flags, cs_N, cs_h);
        if (orc->parsed()) {
            if (bes->parsed()) return run_oracle_bessel(tau);
            if (cat->parsed()) return run_oracle_catalan(on);
            if (ncc->parsed()) return run_oracle_nc(on, false);
            if (ncl->parsed()) return run_oracle_nc(on, true);
            if (hs->parsed()) return run_oracle_h_series(oc_c, tau, on_max);
            if (bz->parsed()) return run_oracle_beta_zero(oz, oK0, os_, ot);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace pspin
