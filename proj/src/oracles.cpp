#include "pspin/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "pspin/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pspin {

long long catalan(int n) {
    if (n < 0) throw std::domain_error("catalan: n must be >= 0");
    if (n > 30) throw std::domain_error("catalan: n > 30 overflows the exact recurrence");
    unsigned long long c = 1;  // C_0
    for (int k = 0; k < n; ++k) c = c * (4ULL * k + 2ULL) / (k + 2ULL);
    return static_cast<long long>(c);
}

bool NCInvolution::is_involution() const {
    const int sz = static_cast<int>(pairing.size());
    if (sz != 2 * n) return false;
    for (int i = 0; i < sz; ++i) {
        if (pairing[static_cast<std::size_t>(i)] < 0 || pairing[static_cast<std::size_t>(i)] >= sz) return false;
        if (pairing[static_cast<std::size_t>(i)] == i) return false;
        if (pairing[static_cast<std::size_t>(pairing[static_cast<std::size_t>(i)])] != i) return false;
    }
    return true;
}

bool NCInvolution::is_noncrossing() const {
    const int sz = static_cast<int>(pairing.size());
    for (int a = 0; a < sz; ++a) {
        const int c = pairing[static_cast<std::size_t>(a)];
        if (c <= a) continue;
        for (int b = a + 1; b < c; ++b) {
            const int d = pairing[static_cast<std::size_t>(b)];
            if (d > c) return false;  // a < b < c < d with (a,c), (b,d) paired
        }
    }
    return true;
}

std::vector<NCInvolution> nc_pairings_enumerate(int n) {
    if (n < 1) throw std::invalid_argument("nc pairings: n must be >= 1");
    if (n > 6) throw std::invalid_argument("nc pairings: enumeration limited to n <= 6");
    std::vector<NCInvolution> out;
    std::vector<int> pairing(static_cast<std::size_t>(2 * n), -1);

    // pairing point lo with j splits the rest into two independent blocks;
    // only odd gaps keep both blocks matchable
    std::function<void(int, int, const std::function<void()>&)> rec =
        [&](int lo, int hi, const std::function<void()>& cont) {
            if (lo >= hi) {
                cont();
                return;
            }
            for (int j = lo + 1; j < hi; j += 2) {
                pairing[static_cast<std::size_t>(lo)] = j;
                pairing[static_cast<std::size_t>(j)] = lo;
                rec(lo + 1, j, [&, j]() { rec(j + 1, hi, cont); });
            }
        };
    rec(0, 2 * n, [&]() {
        NCInvolution inv;
        inv.n = n;
        inv.pairing = pairing;
        for (int i = 0; i < 2 * n; ++i)
            if (i < pairing[static_cast<std::size_t>(i)]) inv.left_points.push_back(i);
        out.push_back(std::move(inv));
    });
    return out;
}

namespace {

double factorial_d(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double truncation_bound(double tau, double kernel_sup, int n_max) {
    // first omitted order, with |NC_n| <= 2^n absorbed into (2 tau)^(2n)
    const int n = n_max + 1;
    return std::pow(2.0 * tau, 2 * n) * std::pow(kernel_sup, n) / factorial_d(2 * n);
}

} // namespace

HSeriesResult h_series_nc(const std::function<double(double, double)>& kernel,
                          double s, double t, int n_max) {
    if (n_max < 0 || n_max > 2)
        throw std::invalid_argument("h series: nested quadrature supports n_max <= 2");
    if (s < t) throw std::invalid_argument("h series: need s >= t");

    constexpr int L = 64;  // trapezoid intervals per simplex level
    const double step = (s - t) / L;
    double grid[L + 1];
    for (int i = 0; i <= L; ++i) grid[i] = t + step * i;

    // kernel values cached on the level grid; g[b][a] = kernel(t_b, t_a)
    std::vector<double> g(static_cast<std::size_t>(L + 1) * (L + 1));
    double sup = 0.0;
    for (int b = 0; b <= L; ++b)
        for (int a = 0; a <= L; ++a) {
            const double v = kernel(grid[b], grid[a]);
            g[static_cast<std::size_t>(b) * (L + 1) + a] = v;
            sup = std::max(sup, std::abs(v));
        }

    double value = 1.0;
    for (int order = 1; order <= n_max; ++order) {
        const auto pairings = nc_pairings_enumerate(order);
        const int dims = 2 * order;
        std::vector<int> idx(static_cast<std::size_t>(dims));

        std::function<double(int, int)> nested = [&](int level, int lo) -> double {
            double acc = 0.0;
            for (int i = lo; i <= L; ++i) {
                idx[static_cast<std::size_t>(level)] = i;
                const double w = (i == lo || i == L) ? 0.5 : 1.0;
                double inner;
                if (level + 1 == dims) {
                    inner = 0.0;
                    for (const auto& sigma : pairings) {
                        double prod = 1.0;
                        for (int a : sigma.left_points) {
                            const int b = sigma.pairing[static_cast<std::size_t>(a)];
                            prod *= g[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)]) * (L + 1) +
                                      idx[static_cast<std::size_t>(a)]];
                        }
                        inner += prod;
                    }
                } else {
                    inner = nested(level + 1, i);
                }
                acc += w * inner;
            }
            return acc * step;
        };
        value += nested(0, 0);
    }
    return {value, truncation_bound(s - t, sup, n_max)};
}

HSeriesResult h_series_nc_const(double c, double tau, int n_max) {
    if (n_max < 0 || n_max > 4)
        throw std::invalid_argument("h series: constant-kernel mode supports n_max <= 4");
    if (tau < 0.0) throw std::invalid_argument("h series: need tau >= 0");
    double value = 1.0;
    for (int n = 1; n <= n_max; ++n)
        value += static_cast<double>(catalan(n)) * std::pow(c, n) * std::pow(tau, 2 * n) /
                 factorial_d(2 * n);
    return {value, truncation_bound(tau, std::abs(c), n_max)};
}

double bessel_h(double tau) {
    if (tau < 0.0) throw std::invalid_argument("bessel h: need tau >= 0");
    const double tau2 = tau * tau;
    double term = 1.0;  // tau^(2n) / (n! (n+1)!) at n = 0
    double sum = 1.0;
    for (int n = 0; n < 2000; ++n) {
        term *= tau2 / ((n + 1.0) * (n + 2.0));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

BetaZeroValues beta_zero_solution(double z, double K0, double s, double t) {
    if (z <= 0.0) throw std::invalid_argument("beta-zero solution: need z > 0");
    if (t < 0.0 || s < t) throw std::invalid_argument("beta-zero solution: need s >= t >= 0");
    BetaZeroValues v;
    const double half = 0.5 / z;
    v.R = std::exp(-z * (s - t));
    v.K = half + (K0 - half) * std::exp(-2.0 * z * s);
    const double Kt = half + (K0 - half) * std::exp(-2.0 * z * t);
    v.C = std::exp(-z * (s - t)) * Kt;
    return v;
}

KernelCheckReport kernel_mc_check(
    const ModelSpec& spec, long n_samples, std::uint64_t seed,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& points) {
    spec.validate();
    if (spec.max_active_order() > 3)
        throw std::invalid_argument("kernel check: exact disorder requires p <= 3");
    if (spec.N > 16) throw std::invalid_argument("kernel check: N <= 16 (brute force)");
    if (n_samples < 2) throw std::invalid_argument("kernel check: need at least 2 samples");
    if (points.empty()) throw std::invalid_argument("kernel check: no evaluation points");

    const int N = spec.N;
    const std::size_t npts = points.size();
    const std::size_t ncell = npts * static_cast<std::size_t>(N) * static_cast<std::size_t>(N);

    // fixed-size sample blocks with per-block partial sums: the combined
    // result does not depend on the thread count
    const long block_size = 8192;
    const long n_blocks = (n_samples + block_size - 1) / block_size;
    std::vector<std::vector<double>> block_sum(static_cast<std::size_t>(n_blocks)),
        block_sq(static_cast<std::size_t>(n_blocks));

#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < n_blocks; ++b) {
        auto& sums = block_sum[static_cast<std::size_t>(b)];
        auto& sqs = block_sq[static_cast<std::size_t>(b)];
        sums.assign(ncell, 0.0);
        sqs.assign(ncell, 0.0);
        std::vector<double> gx(static_cast<std::size_t>(N)), gy(static_cast<std::size_t>(N));
        const long lo = b * block_size, hi = std::min(n_samples, lo + block_size);
        for (long samp = lo; samp < hi; ++samp) {
            const auto J = sample_disorder(
                spec, derive_seed(seed, SeedStream::McSample, static_cast<std::uint64_t>(samp)),
                DisorderMode::Exact);
            for (std::size_t pt = 0; pt < npts; ++pt) {
                grad_field(spec, J, points[pt].first, gx);
                grad_field(spec, J, points[pt].second, gy);
                double* s_base = sums.data() + pt * static_cast<std::size_t>(N) * N;
                double* q_base = sqs.data() + pt * static_cast<std::size_t>(N) * N;
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) {
                        const double v = gx[static_cast<std::size_t>(i)] * gy[static_cast<std::size_t>(j)];
                        s_base[static_cast<std::size_t>(i) * N + j] += v;
                        q_base[static_cast<std::size_t>(i) * N + j] += v * v;
                    }
            }
        }
    }

    std::vector<double> sum(ncell, 0.0), sq(ncell, 0.0);
    for (long b = 0; b < n_blocks; ++b)
        for (std::size_t c = 0; c < ncell; ++c) {
            sum[c] += block_sum[static_cast<std::size_t>(b)][c];
            sq[c] += block_sq[static_cast<std::size_t>(b)][c];
        }

    KernelCheckReport rep;
    rep.N = N;
    rep.n_samples = n_samples;
    const double n = static_cast<double>(n_samples);
    for (std::size_t pt = 0; pt < npts; ++pt)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const std::size_t c = pt * static_cast<std::size_t>(N) * N +
                                      static_cast<std::size_t>(i) * N + j;
                KernelCheckEntry e;
                e.point = static_cast<int>(pt);
                e.i = i;
                e.j = j;
                e.empirical = sum[c] / n;
                const double var = std::max(0.0, (sq[c] / n - e.empirical * e.empirical) * n / (n - 1.0));
                e.std_error = std::sqrt(var / n);
                e.analytic = covariance_kernel(spec, points[pt].first, points[pt].second, i, j);
                e.std_dev = e.std_error > 0.0 ? std::abs(e.empirical - e.analytic) / e.std_error
                                              : std::abs(e.empirical - e.analytic);
                rep.max_std_dev = std::max(rep.max_std_dev, e.std_dev);
                rep.entries.push_back(e);
            }
    return rep;
}

} // namespace pspin
