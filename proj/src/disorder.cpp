#include "pspin/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pspin/rng.hpp"

namespace pspin {

namespace {

constexpr std::size_t kDenseEntryCap = (std::size_t{1} << 31) / sizeof(double); // 2 GiB

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

std::size_t ipow(std::size_t base, int exp) {
    std::size_t v = 1;
    for (int k = 0; k < exp; ++k) v *= base;
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// out_i = sum_{j,k} T[i*N^2 + j*N + k] v_j w_k
void p3_bilinear(const std::vector<double>& T, std::span<const double> v,
                 std::span<const double> w, std::span<double> out, int N) {
    const std::size_t NN = static_cast<std::size_t>(N) * N;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
        const double* Ti = T.data() + static_cast<std::size_t>(i) * NN;
        double acc = 0.0;
        for (int j = 0; j < N; ++j) {
            const double* row = Ti + static_cast<std::size_t>(j) * N;
            double s = 0.0;
            for (int k = 0; k < N; ++k) s += row[k] * w[static_cast<std::size_t>(k)];
            acc += v[static_cast<std::size_t>(j)] * s;
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

// out_i = sum_j M[i*N + j] v_j
void p2_matvec(const std::vector<double>& M, std::span<const double> v,
               std::span<double> out, int N) {
    for (int i = 0; i < N; ++i) {
        const double* row = M.data() + static_cast<std::size_t>(i) * N;
        double s = 0.0;
        for (int j = 0; j < N; ++j) s += row[j] * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
}

// sum over (d)-fold tuples of T[tuple] * prod x, T of extent N^d
double contract_all(const double* T, std::span<const double> x, int d, int N) {
    if (d == 1) {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += T[k] * x[static_cast<std::size_t>(k)];
        return s;
    }
    const std::size_t stride = ipow(static_cast<std::size_t>(N), d - 1);
    double s = 0.0;
    for (int j = 0; j < N; ++j)
        s += x[static_cast<std::size_t>(j)] * contract_all(T + j * stride, x, d - 1, N);
    return s;
}

} // namespace

double multiplicity_factor(std::span<const int> indices) {
    std::vector<int> s(indices.begin(), indices.end());
    std::sort(s.begin(), s.end());
    double c = 1.0;
    std::size_t run = 1;
    for (std::size_t k = 1; k <= s.size(); ++k) {
        if (k < s.size() && s[k] == s[k - 1]) {
            ++run;
        } else {
            c *= factorial(static_cast<int>(run));
            run = 1;
        }
    }
    return c;
}

double DisorderTensor::coupling(std::span<const int> indices) const {
    if (mode_ != DisorderMode::Exact)
        throw std::logic_error("disorder: canonical couplings exist only in exact mode");
    const int p = static_cast<int>(indices.size());
    const auto& D = dense(p);
    std::size_t flat = 0;
    for (int idx : indices) {
        if (idx < 0 || idx >= N_) throw std::out_of_range("disorder: index out of range");
        flat = flat * static_cast<std::size_t>(N_) + static_cast<std::size_t>(idx);
    }
    return D[flat];
}

const std::vector<double>& DisorderTensor::packed(int p) const {
    if (p < 1 || p > m_) throw std::out_of_range("disorder: order out of range");
    return packed_[static_cast<std::size_t>(p - 1)];
}

const std::vector<double>& DisorderTensor::dense(int p) const {
    if (p < 1 || p > m_) throw std::out_of_range("disorder: order out of range");
    return dense_[static_cast<std::size_t>(p - 1)];
}

DisorderTensor sample_disorder(const ModelSpec& spec, std::uint64_t seed, DisorderMode mode) {
    spec.validate();
    DisorderTensor J;
    J.mode_ = mode;
    J.seed_ = seed;
    J.N_ = spec.N;
    J.m_ = spec.m;
    J.packed_.resize(static_cast<std::size_t>(spec.m));
    J.dense_.resize(static_cast<std::size_t>(spec.m));

    const std::size_t N = static_cast<std::size_t>(spec.N);
    for (int p = 1; p <= spec.m; ++p) {
        if (spec.a[static_cast<std::size_t>(p - 1)] == 0.0) continue;
        if (mode == DisorderMode::Exact && p >= 4)
            throw std::invalid_argument(
                "disorder: exact symmetric storage supports p <= 3; "
                "use decoupled mode for higher orders");
        if (ipow(N, p) > kDenseEntryCap)
            throw std::invalid_argument("disorder: N^p tensor exceeds the memory cap");

        // one engine per order: draws for one order do not shift another's
        auto eng = make_engine(derive_seed(seed, SeedStream::Disorder, static_cast<std::uint64_t>(p)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double base_sd = std::pow(static_cast<double>(spec.N), -0.5 * (p - 1));

        auto& dense = J.dense_[static_cast<std::size_t>(p - 1)];
        dense.assign(ipow(N, p), 0.0);

        if (mode == DisorderMode::Decoupled) {
            for (auto& v : dense) v = base_sd * gauss(eng);
            continue;
        }

        auto& packed = J.packed_[static_cast<std::size_t>(p - 1)];
        if (p == 1) {
            packed.resize(N);
            for (std::size_t i = 0; i < N; ++i) packed[i] = gauss(eng);
            dense = packed;
        } else if (p == 2) {
            packed.reserve(N * (N + 1) / 2);
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = i; j < N; ++j) {
                    const double c = (i == j) ? 2.0 : 1.0;
                    const double v = std::sqrt(c) * base_sd * gauss(eng);
                    packed.push_back(v);
                    dense[i * N + j] = v;
                    dense[j * N + i] = v;
                }
        } else { // p == 3
            packed.reserve(N * (N + 1) * (N + 2) / 6);
            const std::size_t NN = N * N;
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = i; j < N; ++j)
                    for (std::size_t k = j; k < N; ++k) {
                        double c = 1.0;
                        if (i == j && j == k) c = 6.0;
                        else if (i == j || j == k) c = 2.0;
                        const double v = std::sqrt(c) * base_sd * gauss(eng);
                        packed.push_back(v);
                        dense[i * NN + j * N + k] = v;
                        dense[i * NN + k * N + j] = v;
                        dense[j * NN + i * N + k] = v;
                        dense[j * NN + k * N + i] = v;
                        dense[k * NN + i * N + j] = v;
                        dense[k * NN + j * N + i] = v;
                    }
        }
    }
    return J;
}

void grad_field(const ModelSpec& spec, const DisorderTensor& J,
                std::span<const double> x, std::span<double> out) {
    const int N = spec.N;
    if (static_cast<int>(x.size()) != N || static_cast<int>(out.size()) != N)
        throw std::invalid_argument("grad_field: state length must equal N");
    for (double xi : x)
        if (!std::isfinite(xi)) throw std::invalid_argument("grad_field: non-finite state");

    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> tmp(static_cast<std::size_t>(N));
    for (int p = 1; p <= spec.m; ++p) {
        if (spec.a[static_cast<std::size_t>(p - 1)] == 0.0) continue;
        const auto& D = J.dense(p);
        if (J.mode() == DisorderMode::Exact) {
            const double coef = spec.scaled_a(p) / factorial(p - 1);
            if (p == 1) {
                for (int i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] += coef * D[static_cast<std::size_t>(i)];
            } else if (p == 2) {
                p2_matvec(D, x, tmp, N);
                for (int i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] += coef * tmp[static_cast<std::size_t>(i)];
            } else {
                p3_bilinear(D, x, x, tmp, N);
                for (int i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] += coef * tmp[static_cast<std::size_t>(i)];
            }
        } else {
            // decoupled: variance N^-(p-1) entries, coefficient a_p/sqrt((p-1)!)
            const double coef = spec.beta * spec.a[static_cast<std::size_t>(p - 1)] /
                                std::sqrt(factorial(p - 1));
            if (p == 1) {
                for (int i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] += coef * D[static_cast<std::size_t>(i)];
            } else if (p == 3) {
                p3_bilinear(D, x, x, tmp, N);
                for (int i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] += coef * tmp[static_cast<std::size_t>(i)];
            } else {
                const std::size_t stride = ipow(static_cast<std::size_t>(N), p - 1);
                for (int i = 0; i < N; ++i)
                    out[static_cast<std::size_t>(i)] +=
                        coef * contract_all(D.data() + static_cast<std::size_t>(i) * stride, x, p - 1, N);
            }
        }
    }
}

std::vector<double> grad_field(const ModelSpec& spec, const DisorderTensor& J,
                               std::span<const double> x) {
    std::vector<double> g(static_cast<std::size_t>(spec.N));
    grad_field(spec, J, x, g);
    return g;
}

double covariance_kernel(const ModelSpec& spec, std::span<const double> x,
                         std::span<const double> y, int i, int j) {
    const int N = spec.N;
    if (static_cast<int>(x.size()) != N || static_cast<int>(y.size()) != N)
        throw std::invalid_argument("covariance_kernel: vectors must have length N");
    if (i < 0 || i >= N || j < 0 || j >= N)
        throw std::out_of_range("covariance_kernel: index out of range");
    NuPolynomial nu(spec);
    const double m = dot(x, y) / N;
    double k = x[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(i)] / N * nu.nu2(m);
    if (i == j) k += nu.nu1(m);
    return k;
}

double hamiltonian_eval(const ModelSpec& spec, const DisorderTensor& J,
                        std::span<const double> x) {
    if (J.mode() != DisorderMode::Exact)
        throw std::logic_error("hamiltonian: defined for exact-mode disorder only");
    const int N = spec.N;
    std::vector<double> tmp(static_cast<std::size_t>(N));
    double H = 0.0;
    for (int p = 1; p <= spec.m; ++p) {
        const double ap = spec.a[static_cast<std::size_t>(p - 1)];
        if (ap == 0.0) continue;
        const auto& D = J.dense(p);
        double Sp = 0.0;  // sum over ordered p-tuples of J * x...x
        if (p == 1) {
            Sp = dot(D, x);
        } else if (p == 2) {
            p2_matvec(D, x, tmp, N);
            Sp = dot(tmp, x);
        } else {
            p3_bilinear(D, x, x, tmp, N);
            Sp = dot(tmp, x);
        }
        H += -2.0 * ap / factorial(p) * Sp;
    }
    return H;
}

double disorder_norm_estimate(const ModelSpec& spec, const DisorderTensor& J,
                              int iterations) {
    if (J.mode() != DisorderMode::Exact)
        throw std::logic_error("disorder norm estimate: exact mode only");
    const int N = spec.N;
    double best = 0.0;
    for (int p = 1; p <= spec.m; ++p) {
        if (spec.a[static_cast<std::size_t>(p - 1)] == 0.0) continue;
        const auto& D = J.dense(p);
        const double scale = std::pow(static_cast<double>(N), 0.5 * p - 1.0);

        // deterministic random start per order
        auto eng = make_engine(derive_seed(J.seed(), SeedStream::Disorder,
                                           0x9000 + static_cast<std::uint64_t>(p)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<std::vector<double>> u(static_cast<std::size_t>(p),
                                           std::vector<double>(static_cast<std::size_t>(N)));
        for (auto& v : u) {
            double nrm = 0.0;
            for (auto& e : v) { e = gauss(eng); nrm += e * e; }
            nrm = std::sqrt(nrm);
            for (auto& e : v) e /= nrm;
        }

        std::vector<double> g(static_cast<std::size_t>(N));
        double value = 0.0;
        for (int it = 0; it < iterations; ++it) {
            for (int slot = 0; slot < p; ++slot) {
                if (p == 1) {
                    g.assign(D.begin(), D.end());
                } else if (p == 2) {
                    p2_matvec(D, u[static_cast<std::size_t>(1 - slot)], g, N);
                } else {
                    // symmetric tensor: gradient in any slot is the bilinear
                    // contraction with the two other arguments
                    int o1 = (slot + 1) % 3, o2 = (slot + 2) % 3;
                    p3_bilinear(D, u[static_cast<std::size_t>(o1)], u[static_cast<std::size_t>(o2)], g, N);
                }
                double nrm = std::sqrt(dot(g, g));
                if (nrm == 0.0) continue;
                for (int i = 0; i < N; ++i) u[static_cast<std::size_t>(slot)][static_cast<std::size_t>(i)] =
                    g[static_cast<std::size_t>(i)] / nrm;
                value = nrm;  // |form| at the freshly maximized slot
            }
        }
        best = std::max(best, scale * value);
    }
    return best;
}

} // namespace pspin
