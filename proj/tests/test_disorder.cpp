#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#ifdef PSPIN_HAVE_EIGEN
#include <Eigen/Dense>
#endif

#include "pspin/disorder.hpp"
#include "pspin/rng.hpp"

using namespace pspin;

namespace {

ModelSpec p3_model(int N, double beta = 1.0) {
    return ModelSpec::pure(3, 1.0, beta, ConfinementSpec::polynomial(5.0, 2), N);
}

// ordered-tuple reference gradient straight from the canonical couplings,
// with the tuple order shuffled to exercise permutation symmetry
std::vector<double> reference_grad(const ModelSpec& spec, const DisorderTensor& J,
                                   const std::vector<double>& x, std::uint64_t shuffle_seed) {
    const int N = spec.N;
    std::vector<double> g(static_cast<std::size_t>(N), 0.0);
    std::mt19937_64 eng(shuffle_seed);
    for (int p = 1; p <= spec.m; ++p) {
        if (spec.a[static_cast<std::size_t>(p - 1)] == 0.0) continue;
        double fact = 1.0;
        for (int q = 2; q < p; ++q) fact *= q;
        const double coef = spec.scaled_a(p) / fact;
        const int tuples = static_cast<int>(std::pow(N, p - 1));
        std::vector<int> order(static_cast<std::size_t>(tuples));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), eng);
        for (int i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int flat : order) {
                std::vector<int> idx = {i};
                double prod = 1.0;
                int rest = flat;
                for (int q = 0; q < p - 1; ++q) {
                    const int comp = rest % N;
                    rest /= N;
                    idx.push_back(comp);
                    prod *= x[static_cast<std::size_t>(comp)];
                }
                acc += J.coupling(idx) * prod;
            }
            g[static_cast<std::size_t>(i)] += coef * acc;
        }
    }
    return g;
}

} // namespace

TEST_CASE("disorder sampling: variance classes at p=3") {
    const int N = 6, n_seeds = 10000;
    const auto spec = p3_model(N);
    // representative multisets: all distinct (c=1), one pair (c=2), triple (c=6)
    const std::array<std::array<int, 3>, 3> sets = {{{0, 1, 2}, {0, 0, 1}, {2, 2, 2}}};
    const std::array<double, 3> cs = {1.0, 2.0, 6.0};
    std::array<double, 3> sum{}, sumsq{};
    for (int s = 0; s < n_seeds; ++s) {
        const auto J = sample_disorder(spec, 1000 + static_cast<std::uint64_t>(s));
        for (std::size_t k = 0; k < sets.size(); ++k) {
            const double v = J.coupling(sets[k]);
            sum[k] += v;
            sumsq[k] += v * v;
        }
    }
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const double mean = sum[k] / n_seeds;
        const double var = (sumsq[k] / n_seeds - mean * mean) * n_seeds / (n_seeds - 1.0);
        const double target = cs[k] / (N * N);  // c * N^(-2)
        const double se = target * std::sqrt(2.0 / (n_seeds - 1.0));
        CHECK(std::abs(var - target) <= 4.0 * se);
        CHECK(std::abs(mean) <= 4.0 * std::sqrt(target / n_seeds));
    }
}

TEST_CASE("disorder sampling: multiplicity factor and symmetry") {
    CHECK(multiplicity_factor(std::array{1, 2, 3}) == 1.0);
    CHECK(multiplicity_factor(std::array{1, 1, 2}) == 2.0);
    CHECK(multiplicity_factor(std::array{1, 1, 1}) == 6.0);
    CHECK(multiplicity_factor(std::array{4, 4, 4, 4}) == 24.0);

    const auto J = sample_disorder(p3_model(5), 42);
    CHECK(J.coupling(std::array{0, 1, 2}) == J.coupling(std::array{2, 0, 1}));
    CHECK(J.coupling(std::array{3, 1, 3}) == J.coupling(std::array{1, 3, 3}));
}

TEST_CASE("disorder sampling: deterministic in the seed") {
    const auto spec = p3_model(6);
    const auto J1 = sample_disorder(spec, 7);
    const auto J2 = sample_disorder(spec, 7);
    const auto J3 = sample_disorder(spec, 8);
    CHECK(J1.packed(3) == J2.packed(3));
    CHECK(J1.packed(3) != J3.packed(3));
}

TEST_CASE("disorder sampling: exact mode rejects p >= 4, decoupled accepts") {
    ModelSpec spec;
    spec.m = 4;
    spec.a = {0.0, 0.0, 0.0, 1.0};
    spec.N = 4;
    spec.confinement = ConfinementSpec::polynomial(5.0, 4);
    spec.validate();
    CHECK_THROWS_AS(sample_disorder(spec, 1, DisorderMode::Exact), std::invalid_argument);
    const auto J = sample_disorder(spec, 1, DisorderMode::Decoupled);
    CHECK(J.mode() == DisorderMode::Decoupled);
    std::vector<double> x = {0.5, -0.25, 1.0, 0.125};
    const auto g = grad_field(spec, J, x);
    for (double v : g) CHECK(std::isfinite(v));
}

TEST_CASE("grad field: single-site examples") {
    // N=1, p=2 only: G = a_2 J_{11} x
    ModelSpec spec;
    spec.m = 2;
    spec.a = {0.0, 1.0};
    spec.N = 1;
    spec.validate();
    const auto J = sample_disorder(spec, 3);
    const double j11 = J.coupling(std::array{0, 0});
    std::vector<double> x = {2.0};
    CHECK(grad_field(spec, J, x)[0] == doctest::Approx(2.0 * j11).epsilon(1e-14));

    // p=1 only: G_i = J_i independent of the state
    const auto spec1 = ModelSpec::pure(1, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), 4);
    const auto J1 = sample_disorder(spec1, 4);
    std::vector<double> xa = {1.0, 2.0, 3.0, 4.0}, xb = {-1.0, 0.0, 5.0, 0.5};
    CHECK(grad_field(spec1, J1, xa) == grad_field(spec1, J1, xb));

    std::vector<double> bad = {std::nan(""), 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(grad_field(spec1, J1, bad), std::invalid_argument);
}

TEST_CASE("grad field: matches the ordered-tuple reference in shuffled order") {
    ModelSpec spec;
    spec.m = 3;
    spec.a = {0.5, -1.0, 0.8};
    spec.beta = 1.3;
    spec.N = 5;
    spec.validate();
    const auto J = sample_disorder(spec, 21);
    auto eng = make_engine(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(5);
    for (auto& v : x) v = gauss(eng);
    const auto g = grad_field(spec, J, x);
    for (std::uint64_t shuffle : {1ULL, 2ULL, 3ULL}) {
        const auto ref = reference_grad(spec, J, x, shuffle);
        for (int i = 0; i < 5; ++i)
            CHECK(g[static_cast<std::size_t>(i)] ==
                  doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("hamiltonian: gradient identity and small cases") {
    // x = 0 with a_1 = 0 makes every interaction term vanish
    ModelSpec spec2;
    spec2.m = 2;
    spec2.a = {0.0, 1.0};
    spec2.N = 3;
    spec2.validate();
    const auto J2 = sample_disorder(spec2, 5);
    std::vector<double> zero(3, 0.0);
    CHECK(hamiltonian_eval(spec2, J2, zero) == doctest::Approx(0.0));

    // N=1, p=2: H = -j t^2
    ModelSpec spec1site;
    spec1site.m = 2;
    spec1site.a = {0.0, 1.0};
    spec1site.N = 1;
    spec1site.validate();
    const auto J1 = sample_disorder(spec1site, 6);
    const double j11 = J1.coupling(std::array{0, 0});
    std::vector<double> xt = {1.7};
    CHECK(hamiltonian_eval(spec1site, J1, xt) ==
          doctest::Approx(-j11 * 1.7 * 1.7).epsilon(1e-14));

    // centered differences: G = -1/2 grad H at beta = 1
    ModelSpec spec;
    spec.m = 3;
    spec.a = {0.4, 0.9, 1.1};
    spec.N = 5;
    spec.validate();
    const auto J = sample_disorder(spec, 31);
    auto eng = make_engine(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(5);
    for (auto& v : x) v = gauss(eng);
    const auto g = grad_field(spec, J, x);
    const double h = 1e-5;
    for (int i = 0; i < 5; ++i) {
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        const double fd = -(hamiltonian_eval(spec, J, xp) - hamiltonian_eval(spec, J, xm)) / (4.0 * h);
        CHECK(g[static_cast<std::size_t>(i)] == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("covariance kernel: closed forms and symmetry") {
    const auto spec1 = ModelSpec::pure(1, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), 4);
    std::vector<double> x = {1.0, -0.5, 2.0, 0.25}, y = {0.5, 0.5, -1.0, 3.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(covariance_kernel(spec1, x, y, i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    const auto spec = p3_model(4, 1.1);
    NuPolynomial nu(spec);
    const double m = (x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]) / 4.0;
    CHECK(covariance_kernel(spec, x, y, 1, 2) ==
          doctest::Approx(x[2] * y[1] / 4.0 * nu.nu2(m)).epsilon(1e-13));
    CHECK(covariance_kernel(spec, x, x, 1, 1) ==
          doctest::Approx(nu.nu1(x[0]*x[0]/4 + x[1]*x[1]/4 + x[2]*x[2]/4 + x[3]*x[3]/4) +
                          x[1] * x[1] / 4.0 *
                              nu.nu2(x[0]*x[0]/4 + x[1]*x[1]/4 + x[2]*x[2]/4 + x[3]*x[3]/4))
              .epsilon(1e-13));
    // swap (x,i) <-> (y,j) leaves the covariance unchanged
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(covariance_kernel(spec, x, y, i, j) ==
                  doctest::Approx(covariance_kernel(spec, y, x, j, i)).epsilon(1e-13));
    CHECK_THROWS_AS(covariance_kernel(spec, x, y, 4, 0), std::out_of_range);
}

#ifdef PSPIN_HAVE_EIGEN
TEST_CASE("covariance kernel: positive semidefinite over a point set") {
    const auto spec = p3_model(3, 0.8);
    auto eng = make_engine(55);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> pts;
    for (int a = 0; a < 4; ++a) {
        std::vector<double> x(3);
        for (auto& v : x) v = gauss(eng);
        pts.push_back(x);
    }
    const int dim = static_cast<int>(pts.size()) * spec.N;
    Eigen::MatrixXd M(dim, dim);
    for (int a = 0; a < static_cast<int>(pts.size()); ++a)
        for (int i = 0; i < spec.N; ++i)
            for (int b = 0; b < static_cast<int>(pts.size()); ++b)
                for (int j = 0; j < spec.N; ++j)
                    M(a * spec.N + i, b * spec.N + j) =
                        covariance_kernel(spec, pts[static_cast<std::size_t>(a)],
                                          pts[static_cast<std::size_t>(b)], i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * M.trace());
}
#endif

TEST_CASE("decoupled mode: diagonal kernel, vanishing off-diagonal mean") {
    const auto spec = p3_model(4);
    std::vector<double> x = {0.9, -0.3, 0.5, 1.1}, y = {0.2, 0.8, -0.6, 0.4};
    NuPolynomial nu(spec);
    const double m = (x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]) / 4.0;

    const long n_samples = 40000;
    std::vector<double> sum(16, 0.0), sumsq(16, 0.0);
    for (long s = 0; s < n_samples; ++s) {
        const auto J = sample_disorder(spec, 5000 + static_cast<std::uint64_t>(s),
                                       DisorderMode::Decoupled);
        const auto gx = grad_field(spec, J, x);
        const auto gy = grad_field(spec, J, y);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double v = gx[static_cast<std::size_t>(i)] * gy[static_cast<std::size_t>(j)];
                sum[static_cast<std::size_t>(i * 4 + j)] += v;
                sumsq[static_cast<std::size_t>(i * 4 + j)] += v * v;
            }
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double mean = sum[static_cast<std::size_t>(i * 4 + j)] / n_samples;
            const double var = sumsq[static_cast<std::size_t>(i * 4 + j)] / n_samples - mean * mean;
            const double se = std::sqrt(var / n_samples);
            const double target = i == j ? nu.nu1(m) : 0.0;
            CHECK(std::abs(mean - target) <= 5.0 * se);
        }
}

TEST_CASE("disorder norm estimate: p=1 exact, monotone iterations") {
    const auto spec = ModelSpec::pure(1, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), 16);
    const auto J = sample_disorder(spec, 17);
    double nrm2 = 0.0;
    for (double v : J.packed(1)) nrm2 += v * v;
    CHECK(disorder_norm_estimate(spec, J, 1) ==
          doctest::Approx(std::sqrt(nrm2 / 16.0)).epsilon(1e-12));

    const auto spec3 = p3_model(10);
    const auto J3 = sample_disorder(spec3, 18);
    double prev = 0.0;
    for (int it = 1; it <= 8; ++it) {
        const double est = disorder_norm_estimate(spec3, J3, it);
        CHECK(est >= prev - 1e-12);
        prev = est;
    }
}

#ifdef PSPIN_HAVE_EIGEN
TEST_CASE("disorder norm estimate: p=2 converges to the top singular value") {
    const auto spec = ModelSpec::pure(2, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), 50);
    const auto J = sample_disorder(spec, 19);
    Eigen::MatrixXd M(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j)
            M(i, j) = J.coupling(std::array{i, j});
    const double sigma_max = M.jacobiSvd().singularValues()(0);
    // lower bound by construction; near-degenerate +/- spectral edges make the
    // approach slow, so only demand 0.1%
    const double est = disorder_norm_estimate(spec, J, 400);
    CHECK(est <= sigma_max * (1.0 + 1e-12));
    CHECK(est >= sigma_max * 0.999);
}
#endif
