#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pspin/disorder.hpp"
#include "pspin/model.hpp"

namespace pspin {

// C_n = (2n)!/(n!(n+1)!), exact in 64-bit for n <= 30.
long long catalan(int n);

// Fixed-point-free, crossing-free involution of {0,..,2n-1}.
struct NCInvolution {
    int n = 0;
    std::vector<int> pairing;       // pairing[pairing[i]] == i, pairing[i] != i
    std::vector<int> left_points;   // cr(sigma) = { i : i < pairing[i] }, size n

    bool is_involution() const;
    bool is_noncrossing() const;    // no a<b<c<d with (a,c) and (b,d) paired
};

// All non-crossing perfect matchings of 2n points (n <= 6, count C_6 = 132).
std::vector<NCInvolution> nc_pairings_enumerate(int n);

// Truncated non-crossing-pairing series for the confinement-free response
// kernel H:
//   H(s,t) = 1 + sum_n int_{t<=t1<=..<=t_2n<=s} sum_{sigma in NC_n}
//                prod_{i in cr(sigma)} g(t_{sigma(i)}, t_i) dt
// where g(u,v) is the memory kernel nu''(C(u,v)). General kernels use nested
// trapezoid quadrature with 64 intervals per level and are limited to
// n_max <= 2; a constant kernel has the closed form
//   sum_n C_n c^n (s-t)^{2n}/(2n)!
// and supports n_max <= 4. The reported truncation bound comes from
// |NC_n| <= 2^n.
struct HSeriesResult {
    double value = 0.0;
    double truncation_bound = 0.0;
};
HSeriesResult h_series_nc(const std::function<double(double, double)>& kernel,
                          double s, double t, int n_max);
HSeriesResult h_series_nc_const(double c, double tau, int n_max);

// h(tau) = sum_n C_n tau^(2n)/(2n)!, the exponential moment of the
// semicircle law on [-2,2] (equivalently I_1(2 tau)/tau), summed to machine
// precision. Solves h'(tau) = int_0^tau h(u) h(tau-u) du with h(0) = 1.
double bessel_h(double tau);

// Closed-form limit solution when the memory terms vanish (beta = 0) and
// f' = z is constant:
//   R(s,t) = exp(-z(s-t))
//   K(s)   = 1/(2z) + (K0 - 1/(2z)) exp(-2 z s)
//   C(s,t) = exp(-z(s-t)) K(t)        for s >= t
struct BetaZeroValues {
    double R = 0.0, C = 0.0, K = 0.0;
};
BetaZeroValues beta_zero_solution(double z, double K0, double s, double t);

// Brute-force Monte-Carlo check of the drift-field covariance against the
// analytic kernel: draws fresh exact-mode disorder per sample and averages
// G_i(x) G_j(y). Requires p <= 3 and N <= 16.
struct KernelCheckEntry {
    int point = 0;     // index into the (x,y) point list
    int i = 0, j = 0;
    double empirical = 0.0;
    double analytic = 0.0;
    double std_error = 0.0;
    double std_dev = 0.0;  // |empirical - analytic| / std_error
};
struct KernelCheckReport {
    int N = 0;
    long n_samples = 0;
    double max_std_dev = 0.0;
    std::vector<KernelCheckEntry> entries;
};
KernelCheckReport kernel_mc_check(
    const ModelSpec& spec, long n_samples, std::uint64_t seed,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& points);

} // namespace pspin
