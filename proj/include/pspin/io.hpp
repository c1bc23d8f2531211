#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pspin/ck_solver.hpp"
#include "pspin/disorder.hpp"
#include "pspin/langevin.hpp"
#include "pspin/model.hpp"
#include "pspin/trigrid.hpp"

namespace pspin {

inline constexpr const char* kVersion = "pspin 0.1.0";

// "key = value" lines, '#' starts a comment. Later duplicates win except for
// repeatable keys, which callers read through values_of().
class KeyValueFile {
public:
    KeyValueFile() = default;
    static KeyValueFile parse_file(const std::filesystem::path& path);
    static KeyValueFile parse_text(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;                      // throws if missing
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int_or(const std::string& key, long long fallback) const;
    std::vector<std::string> values_of(const std::string& key) const;   // all occurrences

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    void append(const std::string& key, const std::string& value);
    std::string to_text() const;  // preserves insertion order

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Config sections. Model keys: m, a_1..a_m, beta, N, confinement.kind,
// kappa, r, z, disorder.mode, seed. Simulation keys use the sim. prefix,
// solver keys the solver. prefix.
ModelSpec model_from_config(const KeyValueFile& cfg);
SimConfig sim_from_config(const KeyValueFile& cfg);
SolverConfig solver_from_config(const KeyValueFile& cfg);
DisorderMode disorder_mode_from_config(const KeyValueFile& cfg);

void echo_model(KeyValueFile& out, const ModelSpec& spec);
void echo_sim(KeyValueFile& out, const SimConfig& cfg);
void echo_solver(KeyValueFile& out, const SolverConfig& cfg);

// Square grid CSV: header row of grid times, then the row-major matrix, all
// at 17 significant digits (lossless double round-trip). Writes are atomic
// (temp file + rename).
void write_square_csv(const std::filesystem::path& path, const std::vector<double>& times,
                      const Matrix& m);
void write_vector_csv(const std::filesystem::path& path, const std::vector<double>& times,
                      const std::vector<double>& v);
struct CsvGrid {
    std::vector<double> times;
    Matrix m;        // empty (n == 0) when the file held a single row
    std::vector<double> v;
};
CsvGrid read_grid_csv(const std::filesystem::path& path);

void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// Observable and solution bundles on disk: one directory with C.csv,
// chi.csv, K.csv (+A/F, var_C, var_chi) or R.csv, C.csv, K.csv, chi.csv
// (+zlag.csv), each referenced by exactly one manifest.txt.
void write_observables(const std::filesystem::path& dir, const EmpiricalObservables& obs,
                       KeyValueFile manifest);
EmpiricalObservables read_observables(const std::filesystem::path& dir);

void write_solution(const std::filesystem::path& dir, const CKSolution& sol,
                    KeyValueFile manifest);

// Limit solution as plain grids (for compare): full-square matrices with the
// off-triangle conventions applied.
struct SolutionGrids {
    std::vector<double> times;
    Matrix R, C, chi;
    std::vector<double> K;
    std::vector<double> zlag;  // empty in soft mode
};
SolutionGrids solution_to_grids(const CKSolution& sol);
SolutionGrids read_solution_grids(const std::filesystem::path& dir);

} // namespace pspin
