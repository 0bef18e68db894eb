#include "spherelab/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace spherelab {

namespace {

constexpr std::size_t kMaxNodes = std::size_t(1) << 24;

} // namespace

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: m < 1");
    nodes.assign(m, 0.0);
    weights.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        // Chebyshev initial guess, Newton on the Legendre recurrence.
        long double x = std::cos(M_PI * (i + 0.75L) / (m + 0.5L));
        long double dp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1.0L, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        nodes[i] = (double)-x;
        nodes[m - 1 - i] = (double)x;
        const double w = (double)(2.0L / ((1.0L - x * x) * dp * dp));
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
}

double unit_ball_volume(int n) {
    return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double SphereRule::integrate(
    const std::function<double(std::span<const double>)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < count(); ++i) s += weights[i] * f(node(i));
    return s;
}

double AnnulusRule::average(
    const std::function<double(std::span<const double>)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < count(); ++i) s += weights[i] * f(node(i));
    return s;
}

namespace {

// Polar factor for the recursion S^(n-1) -> [-1,1] x S^(n-2): nodes t_k and
// weights realizing the measure (1-t^2)^((n-3)/2) dt exactly on polynomials.
// Integer exponents fold the polynomial Jacobian into Gauss-Legendre;
// half-integer exponents use the equispaced trigonometric rule in t = cos(phi),
// exact because the transformed integrand is an even trigonometric polynomial.
void polar_rule(int n, int m, std::vector<double>& t, std::vector<double>& w,
                int& exact_degree) {
    const int twice_alpha = n - 3; // weight (1-t^2)^(twice_alpha/2)
    t.clear();
    w.clear();
    if (twice_alpha % 2 == 0) {
        const int q = twice_alpha / 2;
        std::vector<double> gx, gw;
        gauss_legendre(m, gx, gw);
        for (int i = 0; i < m; ++i) {
            t.push_back(gx[i]);
            w.push_back(gw[i] * std::pow(1.0 - gx[i] * gx[i], q));
        }
        exact_degree = 2 * m - 1 - 2 * q;
    } else {
        const int p = twice_alpha + 1; // sin^p(phi) density, p = n - 2
        // Midpoints of (0, pi); exact for even trigonometric polynomials.
        for (int k = 0; k < m; ++k) {
            const double phi = M_PI * (k + 0.5) / m;
            t.push_back(std::cos(phi));
            w.push_back(std::pow(std::sin(phi), p));
        }
        exact_degree = 2 * m - 1 - p;
    }
    double s = 0.0;
    for (double x : w) s += x;
    for (double& x : w) x /= s;
}

// Polynomial degree the product rule is built to integrate exactly; richer
// for the low dimensions the operators use directly, leaner for the deep
// recursions where node counts multiply.
int target_degree(int top, int level) {
    if (top <= 4) return 15 * (1 << (level - 1));
    if (top <= 6) return 11 + 6 * (level - 1);
    return 7 + 6 * (level - 1);
}

// Smallest polar node count reaching the target degree, per the exactness
// formulas in polar_rule.
int polar_count(int n, int degree) {
    const int twice_alpha = n - 3;
    if (twice_alpha % 2 == 0) return (degree + 2 + twice_alpha + 1) / 2;
    return (degree + 1 + twice_alpha + 1 + 1) / 2;
}

SphereRule sphere_rule_rec(int n, int degree) {
    SphereRule rule;
    rule.ambient_dim = n;
    if (n == 2) {
        int m = degree + 1;
        m += (4 - m % 4) % 4;
        rule.nodes.reserve(2 * m);
        rule.weights.assign(m, 1.0 / m);
        for (int k = 0; k < m; ++k) {
            const double th = 2.0 * M_PI * k / m;
            rule.nodes.push_back(std::cos(th));
            rule.nodes.push_back(std::sin(th));
        }
        rule.exact_degree = m - 1;
        return rule;
    }
    const SphereRule inner = sphere_rule_rec(n - 1, degree);
    std::vector<double> t, w;
    int deg = 0;
    polar_rule(n, polar_count(n, degree), t, w, deg);
    const std::size_t cnt = t.size() * inner.count();
    if (cnt > kMaxNodes)
        throw std::invalid_argument("sphere_rule: node count exceeds 2^24");
    rule.nodes.reserve(cnt * n);
    rule.weights.reserve(cnt);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
        for (std::size_t j = 0; j < inner.count(); ++j) {
            rule.nodes.push_back(t[i]);
            const auto om = inner.node(j);
            for (double c : om) rule.nodes.push_back(s * c);
            rule.weights.push_back(w[i] * inner.weights[j]);
        }
    }
    rule.exact_degree = std::min(deg, inner.exact_degree);
    return rule;
}

} // namespace

SphereRule sphere_rule(int n, int level) {
    if (n != 2 && n != 3 && n != 4 && n != 6 && n != 8)
        throw std::invalid_argument("sphere_rule: n must be one of {2,3,4,6,8}");
    if (level < 1) throw std::invalid_argument("sphere_rule: level < 1");
    if (n == 2) {
        SphereRule rule;
        rule.ambient_dim = 2;
        const std::size_t m = (std::size_t(1) << level) * 64;
        if (m > kMaxNodes) throw std::invalid_argument("sphere_rule: level too large");
        rule.nodes.reserve(2 * m);
        rule.weights.assign(m, 1.0 / (double)m);
        for (std::size_t k = 0; k < m; ++k) {
            const double th = 2.0 * M_PI * (double)k / (double)m;
            rule.nodes.push_back(std::cos(th));
            rule.nodes.push_back(std::sin(th));
        }
        rule.exact_degree = (int)m - 1;
        return rule;
    }
    return sphere_rule_rec(n, target_degree(n, level));
}

SphereRule sphere_rule_monte_carlo(int n, int level, std::uint64_t seed) {
    if (n < 2 || n > 8) throw std::invalid_argument("sphere_rule_monte_carlo: bad n");
    if (level < 1) throw std::invalid_argument("sphere_rule_monte_carlo: level < 1");
    SphereRule rule;
    rule.ambient_dim = n;
    rule.kind = SphereRule::Kind::monte_carlo;
    rule.seed = seed;
    const std::size_t m = (std::size_t(1) << (2 * level)) * 4096;
    if (m > kMaxNodes)
        throw std::invalid_argument("sphere_rule_monte_carlo: level too large");
    rule.weights.assign(m, 1.0 / (double)m);
    rule.nodes.reserve(m * n);

    // splitmix64 stream -> Box-Muller; implementation-pinned so identical
    // seeds reproduce bit-identical rules.
    std::uint64_t state = seed ? seed : 0x9e3779b97f4a7c15ull;
    auto next_u64 = [&state]() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    auto next_unit = [&]() {
        return ((next_u64() >> 11) + 0.5) * 0x1.0p-53;
    };
    std::vector<double> g(n);
    for (std::size_t i = 0; i < m; ++i) {
        for (int j = 0; j < n; j += 2) {
            const double u1 = next_unit(), u2 = next_unit();
            const double r = std::sqrt(-2.0 * std::log(u1));
            g[j] = r * std::cos(2.0 * M_PI * u2);
            if (j + 1 < n) g[j + 1] = r * std::sin(2.0 * M_PI * u2);
        }
        double nrm = 0.0;
        for (double x : g) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double x : g) rule.nodes.push_back(x / nrm);
    }
    return rule;
}

AnnulusRule annulus_rule(int n, double delta, int level, std::uint64_t) {
    if (!(delta > 0.0) || delta >= 0.5)
        throw std::invalid_argument("annulus_rule: delta must lie in (0, 1/2)");
    const SphereRule sph = sphere_rule(n, level);
    std::vector<double> gx, gw;
    gauss_legendre(8 * (1 << (level - 1)), gx, gw);

    AnnulusRule rule;
    rule.ambient_dim = n;
    rule.delta = delta;
    rule.volume =
        unit_ball_volume(n) * (std::pow(1.0 + delta, n) - std::pow(1.0 - delta, n));
    const std::size_t cnt = gx.size() * sph.count();
    if (cnt > kMaxNodes) throw std::invalid_argument("annulus_rule: level too large");
    rule.nodes.reserve(cnt * n);
    rule.weights.reserve(cnt);
    double total = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double r = 1.0 + delta * gx[i];
        const double wr = gw[i] * std::pow(r, n - 1);
        for (std::size_t j = 0; j < sph.count(); ++j) {
            const auto y = sph.node(j);
            for (double c : y) rule.nodes.push_back(r * c);
            const double w = wr * sph.weights[j];
            rule.weights.push_back(w);
            total += w;
        }
    }
    for (double& w : rule.weights) w /= total;
    return rule;
}

SlicingRule slicing_weights(int d, int level) {
    if (d < 1) throw std::invalid_argument("slicing_weights: d < 1");
    if (level < 1) throw std::invalid_argument("slicing_weights: level < 1");
    SlicingRule rule;
    rule.d = d;
    if (d == 1) {
        const std::size_t m = (std::size_t(1) << level) * 128;
        rule.nodes.reserve(m);
        for (std::size_t k = 0; k < m; ++k)
            rule.nodes.push_back({2.0 * M_PI * (double)k / (double)m, 1.0 / (double)m, 0.0});
        return rule;
    }
    // Substitution r = sin(alpha) removes the square-root singularity at
    // r = 1; the transformed density is sin^(d-1) cos^(d-1).
    std::vector<double> gx, gw;
    gauss_legendre(32 * (1 << (level - 1)), gx, gw);
    double total = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double alpha = M_PI / 4.0 * (gx[i] + 1.0);
        const double s = std::sin(alpha), c = std::cos(alpha);
        const double w = gw[i] * std::pow(s * c, d - 1);
        rule.nodes.push_back({s, w, c});
        total += w;
    }
    for (auto& nd : rule.nodes) nd.weight /= total;
    return rule;
}

} // namespace spherelab
