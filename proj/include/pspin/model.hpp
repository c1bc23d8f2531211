#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pspin {

// Confinement potential N*f(|x|^2/N). Only f' enters the dynamics.
// polynomial:      f(rho) = kappa*(rho-1)^r, so f'(rho) = kappa*r*(rho-1)^(r-1)
// constant-fprime: f'(rho) = z everywhere (linear confinement, used for
//                  closed-form checks)
struct ConfinementSpec {
    enum class Kind { Polynomial, ConstantFPrime };

    Kind kind = Kind::Polynomial;
    double kappa = 5.0;
    int r = 2;
    double z = 1.0;

    double f_prime(double rho) const;

    static ConfinementSpec polynomial(double kappa, int r);
    static ConfinementSpec constant_fprime(double z);
};

// Model definition: interaction coefficients a_1..a_m, inverse temperature
// beta, confinement, system size N. beta is embedded into the coefficients
// everywhere downstream: the drift field uses beta*a_p and the covariance
// polynomial nu carries beta^2, so the dynamics can be written with beta=1.
struct ModelSpec {
    int m = 1;
    std::vector<double> a;   // a[p-1] = a_p
    double beta = 1.0;
    ConfinementSpec confinement;
    int N = 1;

    // a_p scaled by beta (the coefficient actually used by the drift).
    double scaled_a(int p) const { return beta * a.at(static_cast<std::size_t>(p - 1)); }

    int max_active_order() const;   // largest p with a_p != 0 (0 if none)
    void validate() const;          // throws std::invalid_argument

    static ModelSpec pure(int p, double a_p, double beta, ConfinementSpec conf, int N);
};

// nu(r) = beta^2 * sum_p a_p^2/p! r^p and its first three derivatives,
// evaluated by Horner. All coefficients are >= 0, so nu, nu', nu'' are
// non-negative and non-decreasing on r >= 0.
class NuPolynomial {
public:
    NuPolynomial() = default;
    explicit NuPolynomial(const ModelSpec& spec);

    // order-th derivative of nu at r, order in {0,1,2,3}
    double eval(double r, int order = 0) const;

    double nu(double r) const { return eval(r, 0); }
    double nu1(double r) const { return eval(r, 1); }
    double nu2(double r) const { return eval(r, 2); }

    // psi(r) = nu'(r) + r*nu''(r)
    double psi(double r) const { return eval(r, 1) + r * eval(r, 2); }

    const std::vector<double>& coefficients() const { return c_; }

private:
    std::vector<double> c_;  // c_[p-1] = beta^2 a_p^2 / p!
};

} // namespace pspin
