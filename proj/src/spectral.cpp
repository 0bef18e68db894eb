#include "spherelab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spherelab/bessel.hpp"
#include "spherelab/quadrature.hpp"

namespace spherelab {

namespace {

struct FftPlanGuard {
    fftw_plan plan = nullptr;
    ~FftPlanGuard() { if (plan) fftw_destroy_plan(plan); }
};

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// Polynomial smoothstep of degree 2n+1 with C^n endpoint matching:
// S_n(t) = sum_k C(n+k,k) C(2n+1,n-k) (-t)^k t^(n+1). Order 0 selects the
// C-infinity exponential transition exp(-1/t)/(exp(-1/t) + exp(-1/(1-t))).
double smoothstep(double t, int order) {
    if (order < 0 || order > 8)
        throw std::invalid_argument("phi_hat: transition order must be 0..8");
    t = std::clamp(t, 0.0, 1.0);
    if (order == 0) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double a = std::exp(-1.0 / t);
        const double b = std::exp(-1.0 / (1.0 - t));
        return a / (a + b);
    }
    double acc = 0.0;
    for (int k = order; k >= 0; --k)
        acc = acc * (-t) + binom(order + k, k) * binom(2 * order + 1, order - k);
    return acc * std::pow(t, order + 1);
}

} // namespace

double phi_hat(double xi_abs, int transition) {
    const double a = std::abs(xi_abs);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    return 1.0 - smoothstep(std::log2(a), transition);
}

double DyadicBand::evaluate(double xi_abs) const {
    if (j == 0) return phi_hat(xi_abs, transition);
    const double s = std::ldexp(1.0, -j); // exact powers of two
    return phi_hat(s * xi_abs, transition) - phi_hat(2.0 * s * xi_abs, transition);
}

std::vector<DyadicBand> build_partition(int J, int transition) {
    if (J < 1) throw std::invalid_argument("build_partition: J < 1");
    smoothstep(0.5, transition); // validate the order
    std::vector<DyadicBand> bands;
    bands.push_back({0, transition, 0.0, 2.0});
    for (int j = 1; j <= J; ++j)
        bands.push_back({j, transition, std::ldexp(1.0, j - 1), std::ldexp(1.0, j + 1)});
    return bands;
}

RadialProfile combine(const RadialProfile& a, const RadialProfile& b,
                      double (*op)(double, double)) {
    if (a.convention != b.convention)
        throw std::invalid_argument("RadialProfile: mixing Fourier conventions");
    if (a.r != b.r)
        throw std::invalid_argument("RadialProfile: mismatched radial grids");
    RadialProfile out = a;
    for (std::size_t i = 0; i < out.value.size(); ++i)
        out.value[i] = op(a.value[i], b.value[i]);
    return out;
}

double SpectralGolden::kappa(int d) const {
    switch (d) {
        case 2: return kappa_d2;
        case 3: return kappa_d3;
        case 4: return kappa_d4;
        default: throw std::invalid_argument("SpectralGolden: d must be 2..4");
    }
}

SpectralGolden default_golden() {
    // Frozen from kappa_calibrate; see data/spectral_golden.txt.
    SpectralGolden g;
    g.kappa_d2 = 1.0;
    g.kappa_d3 = 1.0;
    g.kappa_d4 = 1.0;
    g.bessel_crossover = 16.0;
    return g;
}

SpectralGolden load_golden(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_golden: cannot open " + path);
    SpectralGolden g;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const double val = std::stod(line.substr(eq + 1));
        if (key == "kappa_d2") g.kappa_d2 = val;
        else if (key == "kappa_d3") g.kappa_d3 = val;
        else if (key == "kappa_d4") g.kappa_d4 = val;
        else if (key == "bessel_crossover") g.bessel_crossover = val;
        else throw std::runtime_error("load_golden: unknown key " + key);
    }
    return g;
}

namespace {

// Unscaled Bessel difference profile in the two_pi convention:
// |xi|^{-d/2} [ (1+delta)^{d/2} J_{d/2}(2 pi (1+delta)|xi|)
//             - (1-delta)^{d/2} J_{d/2}(2 pi (1-delta)|xi|) ].
double annulus_hat_raw(double delta, int d, double xi_abs) {
    const double nu = d / 2.0;
    const double rp = 1.0 + delta, rm = 1.0 - delta;
    const double tp = std::pow(rp, nu) * bessel_j(nu, 2.0 * M_PI * rp * xi_abs);
    const double tm = std::pow(rm, nu) * bessel_j(nu, 2.0 * M_PI * rm * xi_abs);
    return (tp - tm) / std::pow(xi_abs, nu);
}

} // namespace

double annulus_hat(double delta, int d, double xi_abs, const SpectralGolden& golden) {
    if (!(delta > 0.0) || delta >= 0.5)
        throw std::invalid_argument("annulus_hat: delta must lie in (0, 1/2)");
    if (d < 2 || d > 4) throw std::invalid_argument("annulus_hat: d must be 2..4");
    if (!(xi_abs > 0.0))
        throw std::invalid_argument(
            "annulus_hat: xi_abs must be positive (the value at 0 is the shell volume)");
    return golden.kappa(d) * annulus_hat_raw(delta, d, xi_abs);
}

double kappa_calibrate(int d, double delta, int n_per_axis, double xi_ref) {
    if (d < 2 || d > 4) throw std::invalid_argument("kappa_calibrate: d must be 2..4");
    const double half = 1.0 + delta + 0.1;
    const int n = n_per_axis;
    const double h = 2.0 * half / n;
    const double lo2 = (1.0 - delta) * (1.0 - delta);
    const double hi2 = (1.0 + delta) * (1.0 + delta);

    // Midpoint lattice sum of cos(2 pi x . xi_ref e1) over the shell; the
    // imaginary part vanishes by symmetry of the box.
    double acc = 0.0;
    std::vector<int> idx(d, 0);
    std::vector<double> x(d, 0.0);
    while (true) {
        double r2 = 0.0;
        for (int ax = 0; ax < d; ++ax) {
            x[ax] = -half + (idx[ax] + 0.5) * h;
            r2 += x[ax] * x[ax];
        }
        if (r2 > lo2 && r2 < hi2) acc += std::cos(2.0 * M_PI * x[0] * xi_ref);
        int ax = d - 1;
        while (ax >= 0 && ++idx[ax] == n) idx[ax--] = 0;
        if (ax < 0) break;
    }
    const double numeric = acc * std::pow(h, d);
    const double raw = annulus_hat_raw(delta, d, xi_ref);
    if (std::abs(raw) < 1e-3)
        throw std::runtime_error("kappa_calibrate: degenerate reference frequency");
    return numeric / raw;
}

double annulus_dft_max_rel_err(int d, double delta, int n, double xi_lim,
                               const SpectralGolden& golden) {
    if (d != 2)
        throw std::invalid_argument("annulus_dft_max_rel_err: d = 2 only");
    const double half = 1.0 + delta + 0.15;
    const double side = 2.0 * half;
    const double h = side / n;
    const double lo2 = (1.0 - delta) * (1.0 - delta);
    const double hi2 = (1.0 + delta) * (1.0 + delta);

    std::vector<std::complex<double>> buf((std::size_t)n * n);
    for (int i = 0; i < n; ++i) {
        const double x = -half + (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            const double y = -half + (j + 0.5) * h;
            const double r2 = x * x + y * y;
            buf[(std::size_t)i * n + j] = (r2 > lo2 && r2 < hi2) ? 1.0 : 0.0;
        }
    }
    FftPlanGuard plan;
    plan.plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                                 reinterpret_cast<fftw_complex*>(buf.data()),
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan.plan);

    const double vol = unit_ball_volume(2) * (hi2 - lo2);
    const int mmax = (int)std::floor(xi_lim * side);
    double worst = 0.0;
    for (int m1 = -mmax; m1 <= mmax; ++m1)
        for (int m2 = -mmax; m2 <= mmax; ++m2) {
            const double xi1 = m1 / side, xi2 = m2 / side;
            const double xi = std::hypot(xi1, xi2);
            if (xi > xi_lim) continue;
            const int i1 = (m1 % n + n) % n, i2 = (m2 % n + n) % n;
            // midpoint-sample phase: x_k = -half + (k + 1/2) h
            const std::complex<double> ph =
                std::exp(std::complex<double>(0.0, -2.0 * M_PI) *
                         ((-half + 0.5 * h) * (xi1 + xi2)));
            const std::complex<double> numeric =
                buf[(std::size_t)i1 * n + i2] * ph * (h * h);
            const double closed = xi == 0.0 ? vol : annulus_hat(delta, d, xi, golden);
            worst = std::max(worst, std::abs(numeric.real() - closed) / vol);
        }
    return worst;
}

double sigma_hat(int d, double xi_abs) {
    if (d < 2) throw std::invalid_argument("sigma_hat: d must be >= 2");
    if (d > 8) throw std::invalid_argument("sigma_hat: d must be <= 8");
    if (xi_abs < 0.0) throw std::invalid_argument("sigma_hat: negative |xi|");
    const double nu = (d - 2) / 2.0;
    const double z = 2.0 * M_PI * xi_abs;
    if (z < 1e-6) {
        // E[e^{-2 pi i xi . y}] = 1 - (2 pi xi)^2 / (2d) + O(xi^4)
        return 1.0 - z * z / (2.0 * d);
    }
    return std::tgamma(d / 2.0) * std::pow(M_PI, 1.0 - d / 2.0) *
           bessel_j(nu, z) / std::pow(xi_abs, nu);
}

GridFunction band_project(const GridFunction& g, const DyadicBand& band) {
    const std::size_t total = g.cell_count();
    // Boundary-mass precondition: the multiplier acts by circular
    // convolution, so periodization must be harmless.
    double maxabs = 0.0;
    for (double v : g.values) maxabs = std::max(maxabs, std::abs(v));
    double boundary = 0.0;
    std::vector<double> x(g.dim);
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rem = c;
        bool on_boundary = false;
        for (int ax = g.dim - 1; ax >= 0; --ax) {
            const int i = (int)(rem % g.n);
            rem /= g.n;
            if (i == 0 || i == g.n - 1) on_boundary = true;
        }
        if (on_boundary) boundary = std::max(boundary, std::abs(g.values[c]));
    }
    if (maxabs > 0.0 && boundary >= 1e-8 * maxabs)
        throw std::invalid_argument(
            "band_project: boundary mass " + std::to_string(boundary) +
            " exceeds 1e-8 of peak " + std::to_string(maxabs));

    std::vector<std::complex<double>> buf(total);
    for (std::size_t i = 0; i < total; ++i) buf[i] = g.values[i];

    std::vector<int> dims(g.dim, g.n);
    FftPlanGuard fwd, bwd;
    fwd.plan = fftw_plan_dft(g.dim, dims.data(),
                             reinterpret_cast<fftw_complex*>(buf.data()),
                             reinterpret_cast<fftw_complex*>(buf.data()),
                             FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(fwd.plan);

    const double side = g.hi - g.lo;
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rem = c;
        double xi2 = 0.0;
        for (int ax = g.dim - 1; ax >= 0; --ax) {
            const int m = (int)(rem % g.n);
            rem /= g.n;
            const int f = m <= g.n / 2 ? m : m - g.n;
            const double xi = f / side;
            xi2 += xi * xi;
        }
        buf[c] *= band.evaluate(std::sqrt(xi2));
    }

    bwd.plan = fftw_plan_dft(g.dim, dims.data(),
                             reinterpret_cast<fftw_complex*>(buf.data()),
                             reinterpret_cast<fftw_complex*>(buf.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(bwd.plan);

    GridFunction out = g;
    double imag_peak = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        out.values[i] = buf[i].real() / (double)total;
        imag_peak = std::max(imag_peak, std::abs(buf[i].imag()) / (double)total);
    }
    if (maxabs > 0.0 && imag_peak > 1e-10 * maxabs)
        throw std::runtime_error("band_project: conjugate symmetry violated");
    return out;
}

RadialProfile kernel_psi_sigma(int j, int d, const std::vector<double>& x_abs_grid,
                               int transition) {
    if (j < 1 || j > 10)
        throw std::invalid_argument("kernel_psi_sigma: j must lie in 1..10");
    if (d != 2 && d != 3)
        throw std::invalid_argument("kernel_psi_sigma: d must be 2 or 3");

    const DyadicBand band{j, transition, std::ldexp(1.0, j - 1), std::ldexp(1.0, j + 1)};
    const double lo = band.support_lo, hi = band.support_hi;
    double r_max = 0.0;
    for (double r : x_abs_grid) r_max = std::max(r_max, r);

    // Gauss-Legendre panels sized to the fastest oscillation
    // (J_{(d-2)/2}(2 pi r rho) times the sigma_hat phase); panel count is
    // doubled until probe radii stabilize below 1e-8 * 2^j. The band and
    // sigma_hat factors are frozen per node so each output radius costs one
    // Bessel (or sine) evaluation per node.
    std::vector<double> gx, gw;
    gauss_legendre(16, gx, gw);
    struct Node { double rho, base; };
    auto make_nodes = [&](int panels) {
        std::vector<Node> nodes;
        nodes.reserve((std::size_t)panels * gx.size());
        const double w = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = lo + p * w;
            for (std::size_t q = 0; q < gx.size(); ++q) {
                const double rho = a + 0.5 * w * (gx[q] + 1.0);
                double base = band.evaluate(rho) * sigma_hat(d, rho) * 0.5 * w * gw[q];
                base *= d == 2 ? 2.0 * M_PI * rho : 2.0 * rho;
                nodes.push_back({rho, base});
            }
        }
        return nodes;
    };
    auto eval = [&](const std::vector<Node>& nodes, double r) {
        double acc = 0.0;
        if (d == 2) {
            for (const auto& nd : nodes)
                acc += nd.base * bessel_j(0.0, 2.0 * M_PI * r * nd.rho);
        } else {
            for (const auto& nd : nodes) {
                const double z = 2.0 * M_PI * r * nd.rho;
                acc += nd.base *
                       (z < 1e-8 ? 2.0 * M_PI * nd.rho : std::sin(z) / r);
            }
        }
        return acc;
    };

    int panels = std::max(64, (int)std::ceil((hi - lo) * (1.0 + r_max)));
    const double tol = 1e-8 * std::ldexp(1.0, j);
    const double probes[] = {0.3, 0.9, 1.0, 1.1, std::max(2.0, r_max)};
    std::vector<Node> nodes = make_nodes(panels);
    for (; panels < (1 << 15); panels *= 2) {
        const std::vector<Node> finer = make_nodes(2 * panels);
        double worst = 0.0;
        for (double r : probes)
            worst = std::max(worst, std::abs(eval(nodes, r) - eval(finer, r)));
        if (worst < tol) break;
        nodes = finer;
    }

    RadialProfile prof;
    prof.convention = Convention::two_pi;
    prof.r = x_abs_grid;
    prof.value.reserve(x_abs_grid.size());
    for (double r : x_abs_grid) prof.value.push_back(eval(nodes, r));
    return prof;
}

} // namespace spherelab
