#include <doctest.h>

#include "pspin/model.hpp"

using namespace pspin;

TEST_CASE("nu polynomial: pure p=3 values") {
    const auto spec = ModelSpec::pure(3, 1.0, 1.0, ConfinementSpec::polynomial(5.0, 2), 8);
    NuPolynomial nu(spec);
    CHECK(nu.nu(1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(nu.nu1(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(nu.nu2(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nu.psi(1.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(nu.eval(2.0, 3) == doctest::Approx(1.0).epsilon(1e-14));  // nu''' = 6/3! = 1
}

TEST_CASE("nu polynomial: beta^2 scaling on a mixed model") {
    ModelSpec spec;
    spec.m = 3;
    spec.a = {0.0, 1.0, 1.0};
    spec.beta = 2.0;
    spec.N = 4;
    spec.validate();
    NuPolynomial nu(spec);
    // nu(r) = beta^2 (r^2/2 + r^3/6); nu''(1) = beta^2 (1 + 1) = 8
    CHECK(nu.nu2(1.0) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(nu.nu(1.0) == doctest::Approx(4.0 * (0.5 + 1.0 / 6.0)).epsilon(1e-14));
}

TEST_CASE("nu polynomial: coefficients are non-negative, derivatives monotone") {
    ModelSpec spec;
    spec.m = 3;
    spec.a = {-0.7, 1.3, -0.2};
    spec.beta = 0.9;
    spec.N = 4;
    spec.validate();
    NuPolynomial nu(spec);
    for (double c : nu.coefficients()) CHECK(c >= 0.0);
    double prev = 0.0;
    for (double r = 0.0; r <= 2.0; r += 0.25) {
        CHECK(nu.nu(r) >= prev);
        prev = nu.nu(r);
        CHECK(nu.nu1(r) >= 0.0);
        CHECK(nu.nu2(r) >= 0.0);
    }
}

TEST_CASE("confinement f'") {
    const auto poly = ConfinementSpec::polynomial(5.0, 2);
    CHECK(poly.f_prime(1.0) == doctest::Approx(0.0));
    CHECK(poly.f_prime(1.2) == doctest::Approx(2.0).epsilon(1e-12));
    const auto constant = ConfinementSpec::constant_fprime(1.5);
    CHECK(constant.f_prime(0.0) == doctest::Approx(1.5));
    CHECK(constant.f_prime(7.3) == doctest::Approx(1.5));
}

TEST_CASE("model validation rejects bad inputs") {
    ModelSpec spec;
    spec.m = 2;
    spec.a = {1.0, 0.5};
    spec.N = 4;
    spec.validate();

    ModelSpec bad = spec;
    bad.N = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.beta = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.a = {1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.confinement.r = 3;  // odd exponent
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.confinement.kappa = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
