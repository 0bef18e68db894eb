#include "spherelab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spherelab/quadrature.hpp"

namespace spherelab {

double GridFunction::cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= spacing();
    return v;
}

void GridFunction::cell_center(std::size_t c, std::span<double> x) const {
    for (int ax = dim - 1; ax >= 0; --ax) {
        x[ax] = center((int)(c % n));
        c /= n;
    }
}

GridFunction sample(const PointFn& f, int dim, double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("sample: n_per_axis < 2");
    if (dim < 1 || dim > 3) throw std::invalid_argument("sample: dim must be 1..3");
    if (!(hi > lo)) throw std::invalid_argument("sample: degenerate box");
    GridFunction g;
    g.dim = dim;
    g.lo = lo;
    g.hi = hi;
    g.n = n;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= (std::size_t)n;
    g.values.resize(total);
    std::vector<double> x(dim);
    for (std::size_t c = 0; c < total; ++c) {
        g.cell_center(c, x);
        g.values[c] = f(std::span<const double>(x));
    }
    return g;
}

double eval_interp(const GridFunction& g, std::span<const double> x) {
    const double h = g.spacing();
    int base[3];
    double frac[3];
    for (int ax = 0; ax < g.dim; ++ax) {
        if (x[ax] < g.lo || x[ax] > g.hi) return 0.0;
        const double u = (x[ax] - g.lo) / h - 0.5;
        int i = (int)std::floor(u);
        // Clamping to the outermost cell pair keeps the rim linear
        // (extrapolation), which preserves multilinear exactness.
        i = std::clamp(i, 0, g.n - 2);
        base[ax] = i;
        frac[ax] = u - i;
    }
    double out = 0.0;
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int ax = 0; ax < g.dim; ++ax) {
            const int bit = (c >> ax) & 1;
            w *= bit ? frac[ax] : 1.0 - frac[ax];
            idx = idx * g.n + (std::size_t)(base[ax] + bit);
        }
        out += w * g.values[idx];
    }
    return out;
}

double lp_norm(const GridFunction& g, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("lp_norm: p must be positive");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : g.values) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (double v : g.values) s += std::pow(std::abs(v), p);
    return std::pow(s * g.cell_volume(), 1.0 / p);
}

namespace {

// Sorted positive |values|, descending.
std::vector<double> sorted_levels(const GridFunction& g) {
    std::vector<double> v;
    v.reserve(g.values.size());
    for (double x : g.values)
        if (x != 0.0) v.push_back(std::abs(x));
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

} // namespace

DistributionFunction distribution(const GridFunction& g, int num_thresholds) {
    if (num_thresholds < 1) throw std::invalid_argument("distribution: need >= 1");
    auto v = sorted_levels(g);
    if (v.empty()) throw std::invalid_argument("distribution: identically zero input");
    const double tmax = v.front();
    const double tmin = v.back();
    DistributionFunction df;
    const double cv = g.cell_volume();
    for (int i = 0; i < num_thresholds; ++i) {
        const double t =
            num_thresholds == 1
                ? tmax
                : tmax * std::pow(tmin / tmax, (double)i / (num_thresholds - 1));
        // count of |v| strictly above t in the descending order
        const auto k =
            std::lower_bound(v.begin(), v.end(), t, std::greater<>()) - v.begin();
        df.thresholds.push_back(t);
        df.measures.push_back((double)k * cv);
    }
    return df;
}

double lorentz_norm(const GridFunction& g, LorentzExponent e) {
    if (e.p < 1.0) throw std::invalid_argument("lorentz_norm: p < 1");
    auto v = sorted_levels(g);
    if (v.empty()) return 0.0;
    const double cv = g.cell_volume();
    if (std::isinf(e.r)) {
        double best = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k)
            best = std::max(best, v[k] * std::pow((double)(k + 1) * cv, 1.0 / e.p));
        return best;
    }
    if (e.r < 1.0) throw std::invalid_argument("lorentz_norm: r < 1");
    // d_f(t) = k * cv on t in [v_{k+1}, v_k); integrate t^(r-1) d_f^(r/p) exactly.
    double s = 0.0;
    for (std::size_t k = 1; k <= v.size(); ++k) {
        const double hi = std::pow(v[k - 1], e.r);
        const double lo = k < v.size() ? std::pow(v[k], e.r) : 0.0;
        if (hi > lo) s += std::pow((double)k * cv, e.r / e.p) * (hi - lo);
    }
    return std::pow(e.p / e.r, 1.0 / e.r) * std::pow(s, 1.0 / e.r);
}

namespace {

// In-place box sum along one axis with window half-width w cells,
// zero-padded: out[i] = sum_{|j-i|<=w} in[j].
void box_sum_axis(std::vector<double>& vals, std::vector<double>& tmp, int n,
                  std::size_t total, int axis, int dim, int w) {
    // stride of the axis and number of independent lines
    std::size_t stride = 1;
    for (int ax = dim - 1; ax > axis; --ax) stride *= (std::size_t)n;
    const std::size_t lines = total / (std::size_t)n;
    tmp.resize(total);
    for (std::size_t line = 0; line < lines; ++line) {
        // base offset of this line
        const std::size_t block = line / stride;
        const std::size_t within = line % stride;
        const std::size_t base = block * stride * (std::size_t)n + within;
        double run = 0.0;
        for (int i = 0; i <= std::min(w, n - 1); ++i) run += vals[base + stride * i];
        for (int i = 0; i < n; ++i) {
            tmp[base + stride * i] = run;
            const int add = i + w + 1, del = i - w;
            if (add < n) run += vals[base + stride * add];
            if (del >= 0) run -= vals[base + stride * del];
        }
    }
    vals.swap(tmp);
}

} // namespace

double hl_comparability_factor(int dim) {
    // Any centered ball average is dominated by this discrete maximal times
    // 4^d / omega_d: one factor 2^d for dyadic radius bracketing, one
    // (2^d / omega_d) for square-vs-ball averaging.
    return std::pow(4.0, dim) / unit_ball_volume(dim);
}

GridFunction hl_maximal(const GridFunction& g) {
    GridFunction out = g;
    for (double& v : out.values) v = std::abs(v); // zero-radius term of the sup
    const std::vector<double> absg(out.values);
    std::vector<double> work, tmp;
    const std::size_t total = g.cell_count();
    for (int w = 1; w < 2 * g.n; w *= 2) {
        work = absg;
        for (int ax = 0; ax < g.dim; ++ax)
            box_sum_axis(work, tmp, g.n, total, ax, g.dim, w);
        const double cells = std::pow(2.0 * w + 1.0, g.dim);
        for (std::size_t i = 0; i < total; ++i)
            out.values[i] = std::max(out.values[i], work[i] / cells);
    }
    return out;
}

NecWitness nec_counterexample(int d, double s, int N, double a) {
    if (d != 2 && d != 3) throw std::invalid_argument("nec_counterexample: d must be 2 or 3");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("nec_counterexample: s in (0,1)");
    if (N < 1 || N > 6) throw std::invalid_argument("nec_counterexample: N must be 1..6");
    const double lambda1 = std::pow(2.0, -1.0 / s);
    const double lambda2 = std::pow(2.0, -1.0 / (1.0 - s));
    const double separation = 1.0 - 2.0 * lambda2; // first-level gap of C2
    if (!(a > 0.0) || !(a / 4.0 < separation))
        throw std::invalid_argument(
            "nec_counterexample: a/4 must stay below the C2 separation scale " +
            std::to_string(separation));

    const double fine = a * std::pow(4.0, -N) / 4.0;
    const auto depth_for = [&](double lambda) {
        int k = 1;
        while (std::pow(lambda, k) >= fine && k < 30) ++k;
        return k;
    };
    CompactSet c1 = cantor_set(lambda1, depth_for(lambda1));
    CompactSet c2 = cantor_set(lambda2, depth_for(lambda2));

    const double pad = a / 4.0 + 2.0 * fine;
    const double lo = -pad, hi = 1.0 + pad;
    const auto n = (int)std::ceil((hi - lo) / fine);
    double cells = 1.0;
    for (int i = 0; i < d; ++i) cells *= (double)n;
    if (cells > (double)(std::size_t(1) << 26))
        throw std::invalid_argument(
            "nec_counterexample: grid would need " + std::to_string((std::size_t)cells) +
            " cells (limit 2^26); reduce N or increase a");

    // f(x) depends only on dist(x, C2 e1): levels are nested balls.
    std::vector<double> sorted_c2(c2.points);
    std::sort(sorted_c2.begin(), sorted_c2.end());
    const double ratio = std::pow(4.0, d - 1);
    auto f = [&](std::span<const double> x) {
        double ax1 = x[0];
        auto it = std::lower_bound(sorted_c2.begin(), sorted_c2.end(), ax1);
        double d1 = std::numeric_limits<double>::infinity();
        if (it != sorted_c2.end()) d1 = std::min(d1, std::abs(*it - ax1));
        if (it != sorted_c2.begin()) d1 = std::min(d1, std::abs(*(it - 1) - ax1));
        double dist2 = d1 * d1;
        for (int ax = 1; ax < d; ++ax) dist2 += x[ax] * x[ax];
        const double dist = std::sqrt(dist2);
        if (dist > a / 4.0) return 0.0;
        int levels = (int)std::floor(std::log(a / std::max(dist, 1e-300)) / std::log(4.0));
        levels = std::min(levels, N);
        if (levels < 1) return 0.0;
        // sum_{i=1}^{levels} ratio^i
        return ratio * (std::pow(ratio, levels) - 1.0) / (ratio - 1.0);
    };

    NecWitness out;
    out.f = sample(f, d, lo, hi, n);
    out.a = a;
    out.levels = N;
    out.c2 = std::move(c2);
    out.T.dim = d;
    out.T.resolution = c1.resolution;
    out.T.label = "nec T = C1 x {0}^" + std::to_string(d - 1);
    out.T.points.assign(c1.count() * d, 0.0);
    for (std::size_t i = 0; i < c1.count(); ++i) out.T.points[i * d] = c1.points[i];
    return out;
}

} // namespace spherelab
