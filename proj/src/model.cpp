#include "pspin/model.hpp"

#include <cmath>

namespace pspin {

double ConfinementSpec::f_prime(double rho) const {
    if (kind == Kind::ConstantFPrime) return z;
    return kappa * r * std::pow(rho - 1.0, r - 1);
}

ConfinementSpec ConfinementSpec::polynomial(double kappa, int r) {
    ConfinementSpec c;
    c.kind = Kind::Polynomial;
    c.kappa = kappa;
    c.r = r;
    return c;
}

ConfinementSpec ConfinementSpec::constant_fprime(double z) {
    ConfinementSpec c;
    c.kind = Kind::ConstantFPrime;
    c.z = z;
    return c;
}

int ModelSpec::max_active_order() const {
    int p_max = 0;
    for (int p = 1; p <= m; ++p)
        if (a[static_cast<std::size_t>(p - 1)] != 0.0) p_max = p;
    return p_max;
}

void ModelSpec::validate() const {
    if (m < 1) throw std::invalid_argument("model: m must be >= 1");
    if (N < 1) throw std::invalid_argument("model: N must be >= 1");
    if (beta < 0.0) throw std::invalid_argument("model: beta must be >= 0");
    if (static_cast<int>(a.size()) != m)
        throw std::invalid_argument("model: need exactly m coefficients a_1..a_m");
    for (double ap : a)
        if (!std::isfinite(ap)) throw std::invalid_argument("model: non-finite coefficient");
    if (confinement.kind == ConfinementSpec::Kind::Polynomial) {
        if (confinement.kappa <= 0.0)
            throw std::invalid_argument("confinement: kappa must be > 0");
        if (confinement.r < 2 || confinement.r % 2 != 0)
            throw std::invalid_argument("confinement: exponent r must be an even integer >= 2");
        // growth condition: f' must dominate rho^(m/2), i.e. r > m/2
        if (2 * confinement.r <= m)
            throw std::invalid_argument("confinement: exponent r must exceed m/2");
    } else {
        if (!std::isfinite(confinement.z))
            throw std::invalid_argument("confinement: non-finite constant f'");
    }
}

ModelSpec ModelSpec::pure(int p, double a_p, double beta, ConfinementSpec conf, int N) {
    ModelSpec spec;
    spec.m = p;
    spec.a.assign(static_cast<std::size_t>(p), 0.0);
    spec.a[static_cast<std::size_t>(p - 1)] = a_p;
    spec.beta = beta;
    spec.confinement = conf;
    spec.N = N;
    spec.validate();
    return spec;
}

NuPolynomial::NuPolynomial(const ModelSpec& spec) {
    c_.resize(static_cast<std::size_t>(spec.m));
    double fact = 1.0;
    for (int p = 1; p <= spec.m; ++p) {
        fact *= p;
        double ap = spec.a[static_cast<std::size_t>(p - 1)];
        c_[static_cast<std::size_t>(p - 1)] = spec.beta * spec.beta * ap * ap / fact;
    }
}

double NuPolynomial::eval(double r, int order) const {
    if (order < 0 || order > 3) throw std::invalid_argument("nu: order must be in {0,1,2,3}");
    // nu^(k)(r) = sum_{p>=max(k,1)} p(p-1)...(p-k+1) c_p r^(p-k), Horner from the top
    const int m = static_cast<int>(c_.size());
    double acc = 0.0;
    for (int j = m - order; j >= 0; --j) {
        const int p = j + order;  // power of r in nu contributing r^j here
        double coef = 0.0;
        if (p >= 1 && p <= m) {
            double falling = 1.0;
            for (int q = 0; q < order; ++q) falling *= (p - q);
            coef = falling * c_[static_cast<std::size_t>(p - 1)];
        }
        acc = acc * r + coef;
    }
    return acc;
}

} // namespace pspin
