#include "spherelab/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace spherelab {

namespace {

constexpr double kCrossover = 16.0;

bool is_half_integer(double nu) {
    return std::abs(nu - std::floor(nu) - 0.5) < 1e-14;
}

// Ascending series J_nu(x) = (x/2)^nu sum_k (-1)^k (x^2/4)^k / (k! Gamma(nu+k+1)).
// Long double accumulation keeps ~18 digits, enough to survive the
// cancellation near the crossover (about 7 digits lost at x = 16).
double series(double nu, double x) {
    const long double q = (long double)x * x / 4.0L;
    long double term = std::exp((long double)nu * std::log((long double)x / 2.0L)
                                - lgammal((long double)nu + 1.0L));
    long double sum = term;
    for (int k = 1; k <= 200; ++k) {
        term *= -q / ((long double)k * ((long double)nu + k));
        sum += term;
        if (std::abs(term) < 1e-25L * (std::abs(sum) + 1e-300L) && k > 4) break;
    }
    return (double)sum;
}

// Hankel asymptotic expansion, truncated at the smallest term.
double asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    const double w = 8.0 * x;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double prev = std::abs(term);
    for (int k = 1; k <= 30; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * w);
        if (std::abs(term) > prev) break;
        prev = std::abs(term);
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            case 0: p += term; break;
        }
    }
    const double omega = x - (0.5 * nu + 0.25) * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(omega) - q * std::sin(omega));
}

// Closed forms for half-integer orders, stable for large arguments.
double half_integer_closed(double nu, double x) {
    const double f = std::sqrt(2.0 / (M_PI * x));
    const double s = std::sin(x), c = std::cos(x);
    if (nu == 0.5) return f * s;
    if (nu == 1.5) return f * (s / x - c);
    if (nu == 2.5) return f * ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x);
    throw std::invalid_argument("bessel_j: unsupported half-integer order");
}

} // namespace

double bessel_j_crossover() { return kCrossover; }

double bessel_j(double nu, double x) {
    if (nu < 0.0 || nu > 3.0)
        throw std::invalid_argument("bessel_j: order outside supported range [0, 3]");
    if (x < 0.0)
        throw std::invalid_argument("bessel_j: negative argument");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (x < kCrossover) return series(nu, x);
    if (is_half_integer(nu)) return half_integer_closed(nu, x);
    return asymptotic(nu, x);
}

} // namespace spherelab
