#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspin/disorder.hpp"
#include "pspin/model.hpp"
#include "pspin/trigrid.hpp"

namespace pspin {

enum class InitKind { IidGaussian, UniformSphere };

struct SimConfig {
    double dt = 1e-3;
    double T = 1.0;
    int snapshot_stride = 50;      // snapshot spacing Delta = stride*dt
    int n_realizations = 1;
    std::uint64_t base_seed = 0;
    InitKind init = InitKind::UniformSphere;
    double init_variance = 1.0;    // iid-gaussian kind
    double blowup_threshold = 0.0; // <= 0: use 50*max(1, K_N(0))
    bool accumulate_af = false;    // also measure A_N, F_N (extra gradient per snapshot)

    int n_steps() const;
    int n_snapshots() const;       // floor(T/Delta)+1 including t=0
    void validate() const;
};

// Thrown when K_N(t) = |x|^2/N exceeds the blow-up guard.
struct BlowupError : std::runtime_error {
    double t;
    explicit BlowupError(double t_)
        : std::runtime_error("trajectory blow-up at t = " + std::to_string(t_)), t(t_) {}
};

struct TrajectoryState {
    std::vector<double> x;  // state
    std::vector<double> B;  // accumulated Brownian path (starts at 0)
    double t = 0.0;
    std::mt19937_64 rng;
    std::normal_distribution<double> gauss{0.0, 1.0};

    double K_N() const;     // |x|^2 / N
};

// Two-time measurements on the snapshot grid. C is symmetric with
// K = diag(C); chi(.,0) = 0 since B_0 = 0. A and F are present only when
// accumulate_af was set. var_* hold the variance of the mean across
// realizations (zero for a single run).
struct EmpiricalObservables {
    std::vector<double> times;
    int N = 0;
    int n_realizations = 1;
    bool has_af = false;
    bool decoupled = false;   // disorder mode flag carried into outputs
    Matrix C, chi, A, F;
    std::vector<double> K;
    Matrix var_C, var_chi;
};

// Fresh state at t = 0. iid-gaussian: x_i ~ N(0, v); uniform-sphere:
// |x|^2 = N exactly. The engine seeded here also drives the noise of the
// subsequent steps, so (seed -> trajectory) is fully deterministic.
TrajectoryState init_state(const SimConfig& config, int N, std::uint64_t seed);

// One Euler-Maruyama step:
//   x += [G(x) - f'(K_N) x] dt + xi sqrt(dt),  B += xi sqrt(dt)
// with the same standard-normal increments xi added to x and B.
// noise_scale is a test hook (0 turns the noise off).
void euler_maruyama_step(TrajectoryState& state, const ModelSpec& model,
                         const DisorderTensor& J, double dt,
                         double noise_scale = 1.0);

// Integrate to T and fill the snapshot-grid observables.
EmpiricalObservables run_trajectory(const ModelSpec& model, const DisorderTensor& J,
                                    const SimConfig& config, int realization_index);

// Entrywise mean and variance-of-mean over identically gridded runs.
EmpiricalObservables average_realizations(std::span<const EmpiricalObservables> runs);

// D_N(s,t) = -f'(K(t)) C(s,t) + A(t,s);  E_N(s,t) = -f'(K(s)) chi(s,t) + F(s,t).
// Requires A and F.
std::pair<Matrix, Matrix> derived_DE(const EmpiricalObservables& obs, const ModelSpec& model);

} // namespace pspin
