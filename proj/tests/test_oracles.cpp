#include <doctest.h>

#include <cmath>
#include <set>

#include "pspin/oracles.hpp"
#include "pspin/rng.hpp"

using namespace pspin;

TEST_CASE("catalan numbers") {
    CHECK(catalan(0) == 1);
    CHECK(catalan(1) == 1);
    CHECK(catalan(2) == 2);
    CHECK(catalan(3) == 5);
    CHECK(catalan(4) == 14);
    CHECK(catalan(10) == 16796);
    CHECK(catalan(30) == 3814986502092304LL);
    CHECK_THROWS_AS(catalan(31), std::domain_error);
    CHECK_THROWS_AS(catalan(-1), std::domain_error);
}

TEST_CASE("non-crossing pairings: structure and counts") {
    for (int n = 1; n <= 6; ++n) {
        const auto pairings = nc_pairings_enumerate(n);
        CHECK(static_cast<long long>(pairings.size()) == catalan(n));
        std::set<std::vector<int>> seen;
        for (const auto& p : pairings) {
            CHECK(p.is_involution());
            CHECK(p.is_noncrossing());
            CHECK(static_cast<int>(p.left_points.size()) == n);
            for (int i : p.left_points) CHECK(i < p.pairing[static_cast<std::size_t>(i)]);
            seen.insert(p.pairing);
        }
        CHECK(seen.size() == pairings.size());  // all distinct
    }
    CHECK_THROWS_AS(nc_pairings_enumerate(7), std::invalid_argument);
}

TEST_CASE("non-crossing pairings: n=1 and n=2 explicitly") {
    const auto one = nc_pairings_enumerate(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].pairing == std::vector<int>{1, 0});
    CHECK(one[0].left_points == std::vector<int>{0});

    // exhaustive check over all 3 perfect matchings of 4 points: only
    // {(1,2),(3,4)} and {(1,4),(2,3)} avoid a crossing
    const auto two = nc_pairings_enumerate(2);
    REQUIRE(two.size() == 2);
    std::set<std::vector<int>> expected = {{1, 0, 3, 2}, {3, 2, 1, 0}};
    std::set<std::vector<int>> got;
    for (const auto& p : two) got.insert(p.pairing);
    CHECK(got == expected);
    NCInvolution crossing;
    crossing.n = 2;
    crossing.pairing = {2, 3, 0, 1};  // (1,3)(2,4)
    CHECK(crossing.is_involution());
    CHECK_FALSE(crossing.is_noncrossing());
}

TEST_CASE("bessel h: frozen values and series identity") {
    CHECK(bessel_h(0.0) == doctest::Approx(1.0));
    // partial sums of sum_n C_n / (2n)! to 1e-10
    CHECK(bessel_h(1.0) == doctest::Approx(1.5906368546).epsilon(1e-9));
    CHECK_THROWS_AS(bessel_h(-0.5), std::invalid_argument);
    // large argument stays finite and matches I_1(2 tau)/tau asymptotics
    CHECK(std::isfinite(bessel_h(50.0)));
}

TEST_CASE("bessel h solves its quadratic Volterra equation") {
    // h'(tau) = int_0^tau h(u) h(tau-u) du, checked with independent
    // quadrature (Simpson) and a centered difference
    for (double tau : {0.35, 0.8, 1.6}) {
        const int L = 200;
        const double step = tau / L;
        double conv = 0.0;  // Simpson over [0, tau]
        for (int k = 0; k <= L; ++k) {
            const double u = k * step;
            const double w = (k == 0 || k == L) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            conv += w * bessel_h(u) * bessel_h(tau - u);
        }
        conv *= step / 3.0;
        const double dh = 1e-5;
        const double deriv = (bessel_h(tau + dh) - bessel_h(tau - dh)) / (2.0 * dh);
        CHECK(deriv == doctest::Approx(conv).epsilon(1e-6));
    }
}

TEST_CASE("h series, constant kernel: frozen truncation value") {
    // 1 + 1/2 + 2/24 + 5/720 + 14/40320
    const auto r = h_series_nc_const(1.0, 1.0, 4);
    CHECK(r.value == doctest::Approx(1.5906250).epsilon(1e-12));
    CHECK(h_series_nc_const(0.0, 1.0, 4).value == doctest::Approx(1.0));
    CHECK_THROWS_AS(h_series_nc_const(1.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("h series, constant kernel: truncation bound against bessel") {
    for (double c : {0.5, 1.0, 2.0}) {
        for (double tau : {0.25, 0.5, 1.0}) {
            for (int n_max : {1, 2, 3, 4}) {
                const auto r = h_series_nc_const(c, tau, n_max);
                const double exact = bessel_h(std::sqrt(c) * tau);
                CHECK(std::abs(r.value - exact) <= r.truncation_bound + 1e-14);
            }
        }
    }
}

TEST_CASE("h series, general kernel: reduces to the constant-kernel form") {
    const double c = 0.8, s = 1.3, t = 0.4;
    const auto num = h_series_nc([c](double, double) { return c; }, s, t, 2);
    const auto ref = h_series_nc_const(c, s - t, 2);
    CHECK(num.value == doctest::Approx(ref.value).epsilon(1e-5));
    CHECK(h_series_nc([](double, double) { return 0.0; }, 2.0, 0.5, 2).value ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(h_series_nc([](double, double) { return 1.0; }, 1.0, 0.0, 3),
                    std::invalid_argument);
}

TEST_CASE("h series, general kernel: nontrivial two-time kernel against a "
          "dense-quadrature reference") {
    // order-1 term with kernel g(u,v) = u*v over the triangle t<=v<=u<=s,
    // comparable to an analytic double integral
    const double s = 1.0, t = 0.0;
    const auto r = h_series_nc([](double u, double v) { return u * v; }, s, t, 1);
    // int_0^1 int_0^u u v dv du = int_0^1 u^3/2 du = 1/8
    CHECK(r.value == doctest::Approx(1.0 + 0.125).epsilon(1e-4));
}

TEST_CASE("beta-zero closed form") {
    const auto at = [](double z, double K0, double s, double t) {
        return beta_zero_solution(z, K0, s, t);
    };
    // boundary s = t
    auto v = at(0.7, 1.3, 0.5, 0.5);
    CHECK(v.R == doctest::Approx(1.0));
    CHECK(v.C == doctest::Approx(v.K));
    // stationary point of dK/ds = -2 z K + 1 at K0 = 1/(2z)
    v = at(0.5, 1.0, 40.0, 0.0);
    CHECK(v.K == doctest::Approx(1.0).epsilon(1e-12));
    // direct evaluation
    v = at(1.0, 1.0, 1.0, 0.0);
    CHECK(v.R == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(v.K == doctest::Approx(0.5 + 0.5 * std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(at(0.0, 1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(at(1.0, 1.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("kernel MC check: state-independent p=1 field") {
    const auto spec = ModelSpec::pure(1, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), 3);
    std::vector<double> x = {0.3, -1.2, 0.7}, y = {1.0, 0.4, -0.2};
    const auto rep = kernel_mc_check(spec, 40000, 7, {{x, y}});
    CHECK(rep.max_std_dev <= 5.0);
    // analytic kernel is the identity for p=1 (nu' = 1, nu'' = 0)
    for (const auto& e : rep.entries)
        CHECK(e.analytic == doctest::Approx(e.i == e.j ? 1.0 : 0.0));
}

TEST_CASE("kernel MC check: p=3 covariance matches the analytic kernel") {
    const auto spec = ModelSpec::pure(3, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), 4);
    auto eng = make_engine(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(4), y(4);
    for (auto& v : x) v = gauss(eng);
    for (auto& v : y) v = gauss(eng);
    const auto rep = kernel_mc_check(spec, 100000, 11, {{x, y}});
    CHECK(rep.max_std_dev <= 5.0);
}
