#include "pspin/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pspin {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for " + what + ": '" + s + "'");
    }
}

} // namespace

KeyValueFile KeyValueFile::parse_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        kv.entries_.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

bool KeyValueFile::has(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return true;
    return false;
}

std::string KeyValueFile::get(const std::string& key) const {
    const std::string* found = nullptr;
    for (const auto& [k, v] : entries_)
        if (k == key) found = &v;
    if (!found) throw std::invalid_argument("config: missing key '" + key + "'");
    return *found;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double KeyValueFile::get_double(const std::string& key) const {
    return parse_double(get(key), key);
}

double KeyValueFile::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long KeyValueFile::get_int(const std::string& key) const {
    const double v = get_double(key);
    const long long i = static_cast<long long>(std::llround(v));
    if (static_cast<double>(i) != v)
        throw std::invalid_argument("config: key '" + key + "' must be an integer");
    return i;
}

long long KeyValueFile::get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::vector<std::string> KeyValueFile::values_of(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k == key) out.push_back(v);
    return out;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
}

void KeyValueFile::set(const std::string& key, double value) { set(key, format17(value)); }
void KeyValueFile::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

void KeyValueFile::append(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

std::string KeyValueFile::to_text() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

ModelSpec model_from_config(const KeyValueFile& cfg) {
    ModelSpec spec;
    spec.m = static_cast<int>(cfg.get_int("m"));
    spec.a.resize(static_cast<std::size_t>(std::max(spec.m, 0)), 0.0);
    for (int p = 1; p <= spec.m; ++p)
        spec.a[static_cast<std::size_t>(p - 1)] = cfg.get_double_or("a_" + std::to_string(p), 0.0);
    spec.beta = cfg.get_double_or("beta", 1.0);
    spec.N = static_cast<int>(cfg.get_int("N"));
    const std::string kind = cfg.get_or("confinement.kind", "polynomial");
    if (kind == "polynomial") {
        spec.confinement = ConfinementSpec::polynomial(cfg.get_double_or("kappa", 5.0),
                                                       static_cast<int>(cfg.get_int_or("r", 2)));
    } else if (kind == "constant-fprime") {
        spec.confinement = ConfinementSpec::constant_fprime(cfg.get_double("z"));
    } else {
        throw std::invalid_argument("config: confinement.kind must be polynomial or constant-fprime");
    }
    spec.validate();
    return spec;
}

DisorderMode disorder_mode_from_config(const KeyValueFile& cfg) {
    const std::string mode = cfg.get_or("disorder.mode", "exact");
    if (mode == "exact") return DisorderMode::Exact;
    if (mode == "decoupled") return DisorderMode::Decoupled;
    throw std::invalid_argument("config: disorder.mode must be exact or decoupled");
}

SimConfig sim_from_config(const KeyValueFile& cfg) {
    SimConfig sim;
    sim.dt = cfg.get_double_or("sim.dt", sim.dt);
    sim.T = cfg.get_double_or("sim.T", sim.T);
    sim.snapshot_stride = static_cast<int>(cfg.get_int_or("sim.snapshot_stride", sim.snapshot_stride));
    sim.n_realizations = static_cast<int>(cfg.get_int_or("sim.realizations", sim.n_realizations));
    sim.base_seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
    const std::string init = cfg.get_or("sim.init", "uniform-sphere");
    if (init == "uniform-sphere") sim.init = InitKind::UniformSphere;
    else if (init == "iid-gaussian") sim.init = InitKind::IidGaussian;
    else throw std::invalid_argument("config: sim.init must be uniform-sphere or iid-gaussian");
    sim.init_variance = cfg.get_double_or("sim.init_variance", sim.init_variance);
    sim.blowup_threshold = cfg.get_double_or("sim.blowup_threshold", sim.blowup_threshold);
    sim.accumulate_af = cfg.get_int_or("sim.accumulate_af", 0) != 0;
    sim.validate();
    return sim;
}

SolverConfig solver_from_config(const KeyValueFile& cfg) {
    SolverConfig sc;
    sc.h = cfg.get_double_or("solver.h", sc.h);
    sc.T = cfg.get_double_or("solver.T", sc.T);
    sc.K0 = cfg.get_double_or("solver.K0", sc.K0);
    sc.corrector_tol = cfg.get_double_or("solver.tol", sc.corrector_tol);
    sc.corrector_max_iter = static_cast<int>(cfg.get_int_or("solver.max_iter", sc.corrector_max_iter));
    const std::string mode = cfg.get_or("solver.mode", "soft");
    if (mode == "soft") sc.mode = ConstraintMode::Soft;
    else if (mode == "hard") sc.mode = ConstraintMode::Hard;
    else throw std::invalid_argument("config: solver.mode must be soft or hard");
    sc.validate();
    return sc;
}

void echo_model(KeyValueFile& out, const ModelSpec& spec) {
    out.set("m", static_cast<long long>(spec.m));
    for (int p = 1; p <= spec.m; ++p)
        out.set("a_" + std::to_string(p), spec.a[static_cast<std::size_t>(p - 1)]);
    out.set("beta", spec.beta);
    out.set("N", static_cast<long long>(spec.N));
    if (spec.confinement.kind == ConfinementSpec::Kind::Polynomial) {
        out.set("confinement.kind", "polynomial");
        out.set("kappa", spec.confinement.kappa);
        out.set("r", static_cast<long long>(spec.confinement.r));
    } else {
        out.set("confinement.kind", "constant-fprime");
        out.set("z", spec.confinement.z);
    }
}

void echo_sim(KeyValueFile& out, const SimConfig& cfg) {
    out.set("sim.dt", cfg.dt);
    out.set("sim.T", cfg.T);
    out.set("sim.snapshot_stride", static_cast<long long>(cfg.snapshot_stride));
    out.set("sim.realizations", static_cast<long long>(cfg.n_realizations));
    out.set("seed", static_cast<long long>(cfg.base_seed));
    out.set("sim.init", cfg.init == InitKind::UniformSphere ? "uniform-sphere" : "iid-gaussian");
    out.set("sim.init_variance", cfg.init_variance);
    out.set("sim.blowup_threshold", cfg.blowup_threshold);
    out.set("sim.accumulate_af", static_cast<long long>(cfg.accumulate_af ? 1 : 0));
}

void echo_solver(KeyValueFile& out, const SolverConfig& cfg) {
    out.set("solver.h", cfg.h);
    out.set("solver.T", cfg.T);
    out.set("solver.K0", cfg.K0);
    out.set("solver.tol", cfg.corrector_tol);
    out.set("solver.max_iter", static_cast<long long>(cfg.corrector_max_iter));
    out.set("solver.mode", cfg.mode == ConstraintMode::Hard ? "hard" : "soft");
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
    }
    fs::rename(tmp, path);
}

void write_square_csv(const fs::path& path, const std::vector<double>& times, const Matrix& m) {
    std::string out;
    out.reserve(static_cast<std::size_t>(m.n) * m.n * 20 + times.size() * 20);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i) out += ',';
        out += format17(times[i]);
    }
    out += '\n';
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (j) out += ',';
            out += format17(m(i, j));
        }
        out += '\n';
    }
    write_text_atomic(path, out);
}

void write_vector_csv(const fs::path& path, const std::vector<double>& times,
                      const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i) out += ',';
        out += format17(times[i]);
    }
    out += '\n';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format17(v[i]);
    }
    out += '\n';
    write_text_atomic(path, out);
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, const fs::path& path) {
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        auto next = line.find(',', pos);
        if (next == std::string::npos) next = line.size();
        const std::string cell = trim(line.substr(pos, next - pos));
        if (!cell.empty()) row.push_back(parse_double(cell, path.string()));
        pos = next + 1;
        if (next == line.size()) break;
    }
    return row;
}

} // namespace

CsvGrid read_grid_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty grid file " + path.string());
    CsvGrid grid;
    grid.times = parse_csv_row(line, path);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(parse_csv_row(line, path));
    }
    if (rows.size() == 1 && rows[0].size() == grid.times.size()) {
        grid.v = rows[0];
        if (grid.times.size() != 1) return grid;  // single-row vector file
    }
    if (rows.size() != grid.times.size())
        throw std::runtime_error("grid file " + path.string() + ": row count does not match header");
    grid.m = Matrix(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != grid.times.size())
            throw std::runtime_error("grid file " + path.string() + ": ragged row");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            grid.m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return grid;
}

void write_observables(const fs::path& dir, const EmpiricalObservables& obs,
                       KeyValueFile manifest) {
    fs::create_directories(dir);
    write_square_csv(dir / "C.csv", obs.times, obs.C);
    write_square_csv(dir / "chi.csv", obs.times, obs.chi);
    write_vector_csv(dir / "K.csv", obs.times, obs.K);
    write_square_csv(dir / "var_C.csv", obs.times, obs.var_C);
    write_square_csv(dir / "var_chi.csv", obs.times, obs.var_chi);
    manifest.set("kind", "simulate");
    manifest.set("version", kVersion);
    manifest.set("n_realizations", static_cast<long long>(obs.n_realizations));
    manifest.set("disorder.mode", obs.decoupled ? "decoupled" : "exact");
    for (const char* f : {"C.csv", "chi.csv", "K.csv", "var_C.csv", "var_chi.csv"})
        manifest.append("output", f);
    if (obs.has_af) {
        write_square_csv(dir / "A.csv", obs.times, obs.A);
        write_square_csv(dir / "F.csv", obs.times, obs.F);
        manifest.append("output", "A.csv");
        manifest.append("output", "F.csv");
    }
    write_text_atomic(dir / "manifest.txt", manifest.to_text());
}

EmpiricalObservables read_observables(const fs::path& dir) {
    EmpiricalObservables obs;
    auto C = read_grid_csv(dir / "C.csv");
    obs.times = C.times;
    obs.C = std::move(C.m);
    obs.chi = read_grid_csv(dir / "chi.csv").m;
    obs.K = read_grid_csv(dir / "K.csv").v;
    if (fs::exists(dir / "var_C.csv")) obs.var_C = read_grid_csv(dir / "var_C.csv").m;
    else obs.var_C = Matrix(static_cast<int>(obs.times.size()));
    if (fs::exists(dir / "var_chi.csv")) obs.var_chi = read_grid_csv(dir / "var_chi.csv").m;
    else obs.var_chi = Matrix(static_cast<int>(obs.times.size()));
    if (fs::exists(dir / "A.csv")) {
        obs.A = read_grid_csv(dir / "A.csv").m;
        obs.F = read_grid_csv(dir / "F.csv").m;
        obs.has_af = true;
    }
    if (fs::exists(dir / "manifest.txt")) {
        const auto man = KeyValueFile::parse_file(dir / "manifest.txt");
        obs.n_realizations = static_cast<int>(man.get_int_or("n_realizations", 1));
        obs.decoupled = man.get_or("disorder.mode", "exact") == "decoupled";
        obs.N = static_cast<int>(man.get_int_or("N", 0));
    }
    return obs;
}

SolutionGrids solution_to_grids(const CKSolution& sol) {
    SolutionGrids g;
    const int n = sol.n();
    g.times.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g.times[static_cast<std::size_t>(i)] = sol.time(i);
    g.R = Matrix(n);
    g.C = Matrix(n);
    g.chi = Matrix(n);
    g.K = sol.K_values();
    g.zlag = sol.z_values();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            g.R(i, j) = sol.R(i, j);
            g.C(i, j) = sol.C(i, j);
            g.chi(i, j) = sol.chi(i, j);
        }
    return g;
}

void write_solution(const fs::path& dir, const CKSolution& sol, KeyValueFile manifest) {
    fs::create_directories(dir);
    const SolutionGrids g = solution_to_grids(sol);
    write_square_csv(dir / "R.csv", g.times, g.R);
    write_square_csv(dir / "C.csv", g.times, g.C);
    write_square_csv(dir / "chi.csv", g.times, g.chi);
    write_vector_csv(dir / "K.csv", g.times, g.K);
    manifest.set("kind", "solve");
    manifest.set("version", kVersion);
    manifest.set("corrector.max_sweeps", static_cast<long long>(sol.diagnostics.max_sweeps));
    manifest.set("corrector.total_sweeps", static_cast<long long>(sol.diagnostics.total_sweeps));
    manifest.set("corrector.worst_correction", sol.diagnostics.worst_correction);
    for (const char* f : {"R.csv", "C.csv", "chi.csv", "K.csv"})
        manifest.append("output", f);
    if (sol.mode() == ConstraintMode::Hard) {
        write_vector_csv(dir / "zlag.csv", g.times, g.zlag);
        manifest.append("output", "zlag.csv");
    }
    write_text_atomic(dir / "manifest.txt", manifest.to_text());
}

SolutionGrids read_solution_grids(const fs::path& dir) {
    SolutionGrids g;
    auto R = read_grid_csv(dir / "R.csv");
    g.times = R.times;
    g.R = std::move(R.m);
    g.C = read_grid_csv(dir / "C.csv").m;
    g.chi = read_grid_csv(dir / "chi.csv").m;
    g.K = read_grid_csv(dir / "K.csv").v;
    if (fs::exists(dir / "zlag.csv")) g.zlag = read_grid_csv(dir / "zlag.csv").v;
    return g;
}

} // namespace pspin
