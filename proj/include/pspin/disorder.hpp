#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

enum class DisorderMode { Exact, Decoupled };

// Gaussian couplings of the random Hamiltonian.
//
// Exact mode (p <= 3): one centered Gaussian per sorted index multiset
// {i_1<=...<=i_p}, variance c*N^(-p+1) with c the product of the
// multiplicities' factorials. Stored both packed (canonical values, one per
// multiset) and as a dense symmetric expansion used by the gradient
// contraction.
//
// Decoupled mode (any p): an independent non-symmetric Gaussian tensor per
// row index, variance N^(-p+1) per entry. Reproduces the diagonal covariance
// nu'(m) delta_ij of the field but drops the O(1/N) off-diagonal term; same
// N -> infinity limit, flagged in output metadata.
class DisorderTensor {
public:
    DisorderTensor() = default;

    DisorderMode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }
    int N() const { return N_; }
    int max_order() const { return m_; }

    // canonical coupling J_{i1..ip}; indices in any order (exact mode only)
    double coupling(std::span<const int> indices) const;

    // packed canonical storage for order p (exact mode; empty if a_p == 0)
    const std::vector<double>& packed(int p) const;

    // dense expansion for order p: entry (i, i1, .., i_{p-1}) flattened
    // row-major. Exact mode: symmetric, value J_{{i,i1,..}}. Decoupled mode:
    // independent entries.
    const std::vector<double>& dense(int p) const;

    friend DisorderTensor sample_disorder(const ModelSpec&, std::uint64_t, DisorderMode);

private:
    DisorderMode mode_ = DisorderMode::Exact;
    std::uint64_t seed_ = 0;
    int N_ = 0;
    int m_ = 0;
    // indexed by order p-1; empty vector when a_p == 0
    std::vector<std::vector<double>> packed_;
    std::vector<std::vector<double>> dense_;
};

// Draw the couplings for every active order of the model. Deterministic in
// (spec, seed, mode). Exact mode rejects orders p >= 4.
DisorderTensor sample_disorder(const ModelSpec& spec, std::uint64_t seed,
                               DisorderMode mode = DisorderMode::Exact);

// Variance multiplicity factor c({i_1..i_p}) = prod_k l_k! over the
// multiplicities l_k of the distinct values.
double multiplicity_factor(std::span<const int> indices);

// Drift field of the Langevin system, with beta folded in:
//   out_i = beta * sum_p a_p/(p-1)! sum_{tuples} J_{i,i1..i_{p-1}} x_{i1}..x_{i_{p-1}}
void grad_field(const ModelSpec& spec, const DisorderTensor& J,
                std::span<const double> x, std::span<double> out);
std::vector<double> grad_field(const ModelSpec& spec, const DisorderTensor& J,
                               std::span<const double> x);

// Disorder covariance of the drift field at two states,
//   E[G_i(x) G_j(y)] = (x_j y_i / N) nu''(m) + 1{i=j} nu'(m),  m = x.y/N,
// where nu carries the beta^2 factor (matching the beta-scaled grad_field).
double covariance_kernel(const ModelSpec& spec, std::span<const double> x,
                         std::span<const double> y, int i, int j);

// Random Hamiltonian H_J(x) = -2 sum_p a_p/p! sum_{ordered tuples} J x..x
// (beta-free; the drift is -beta/2 * grad H). Exact mode only.
double hamiltonian_eval(const ModelSpec& spec, const DisorderTensor& J,
                        std::span<const double> x);

// Lower bound on the disorder sup-norm max_p sup_{|u^k|<=1} of the scaled
// p-linear form, by alternating maximization over the arguments. Monotone
// non-decreasing in the iteration count; diagnostic only. Exact mode.
double disorder_norm_estimate(const ModelSpec& spec, const DisorderTensor& J,
                              int iterations);

} // namespace pspin
