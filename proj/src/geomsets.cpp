#include "spherelab/geomsets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace spherelab {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace

CompactSet cantor_set(double lambda, int depth) {
    if (!(lambda > 0.0) || lambda > 0.5)
        throw std::invalid_argument("cantor_set: lambda must lie in (0, 1/2]");
    if (depth < 1 || depth > 30)
        throw std::invalid_argument("cantor_set: depth must lie in [1, 30]");
    if (depth >= 27 && lambda < 0.5)
        throw std::invalid_argument("cantor_set: point count would exceed 2^30");

    // lambda = 1/2 keeps the full interval at every depth; iterating would
    // only duplicate points.
    std::vector<double> pts;
    if (lambda == 0.5) {
        const double h = std::pow(lambda, depth);
        const auto n = (std::size_t)std::llround(1.0 / h);
        pts.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) pts.push_back((double)i * h);
    } else {
        pts = {0.0, 1.0};
        for (int k = 0; k < depth; ++k) {
            std::vector<double> next;
            next.reserve(2 * pts.size());
            for (double x : pts) next.push_back(lambda * x);
            for (double x : pts) next.push_back(lambda * x + (1.0 - lambda));
            pts.swap(next);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }

    CompactSet out;
    out.dim = 1;
    out.points = std::move(pts);
    out.resolution = std::pow(lambda, depth);
    out.label = "cantor(lambda=" + std::to_string(lambda) +
                ",depth=" + std::to_string(depth) + ")";
    return out;
}

CompactSet singleton_set(double x) {
    CompactSet out;
    out.dim = 1;
    out.points = {x};
    out.resolution = std::numeric_limits<double>::min();
    out.label = "singleton";
    return out;
}

CompactSet interval_set(double lo, double hi, double h) {
    if (!(hi > lo) || !(h > 0.0))
        throw std::invalid_argument("interval_set: need hi > lo and h > 0");
    CompactSet out;
    out.dim = 1;
    const auto n = (std::size_t)std::ceil((hi - lo) / h);
    out.points.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        out.points.push_back(std::min(lo + (double)i * h, hi));
    out.resolution = h;
    out.label = "interval";
    return out;
}

CompactSet product_embed(const CompactSet& base, int ambient_dim) {
    if (ambient_dim < base.dim)
        throw std::invalid_argument("product_embed: ambient_dim < base dim");
    CompactSet out;
    out.dim = ambient_dim;
    out.resolution = base.resolution;
    out.label = base.label + " in R^" + std::to_string(ambient_dim);
    out.points.assign(base.count() * ambient_dim, 0.0);
    const int pad = ambient_dim - base.dim;
    for (std::size_t i = 0; i < base.count(); ++i)
        for (int j = 0; j < base.dim; ++j)
            out.points[i * ambient_dim + pad + j] = base.points[i * base.dim + j];
    return out;
}

CoveringResult covering_number(const CompactSet& set, double delta) {
    if (set.count() == 0) throw std::invalid_argument("covering_number: empty set");
    if (delta < set.resolution)
        throw std::invalid_argument(
            "covering_number: delta " + std::to_string(delta) +
            " below set resolution " + std::to_string(set.resolution) +
            "; the discretization cannot certify a cover at this scale");

    const std::size_t n = set.count();
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    CoveringResult out;
    out.delta = delta;
    const double r2 = delta * delta;

    std::size_t next = 0; // first center: lowest index
    while (true) {
        const auto c = set.point(next);
        out.centers.insert(out.centers.end(), c.begin(), c.end());
        double worst = -1.0;
        std::size_t worst_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = dist2(set.point(i), c);
            if (d < d2[i]) d2[i] = d;
            if (d2[i] > worst) { worst = d2[i]; worst_i = i; }
        }
        if (worst <= r2) break;
        next = worst_i;
    }
    out.count = out.centers.size() / set.dim;
    return out;
}

FitResult minkowski_fit(const CompactSet& set, double delta_min, double delta_max,
                        int num_scales) {
    if (!(set.resolution <= delta_min) || !(delta_min < delta_max))
        throw std::invalid_argument(
            "minkowski_fit: need resolution <= delta_min < delta_max");
    if (num_scales < 3) throw std::invalid_argument("minkowski_fit: num_scales < 3");

    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < num_scales; ++i) {
        const double t = (double)i / (num_scales - 1);
        const double delta = delta_max * std::pow(delta_min / delta_max, t);
        pts.emplace_back(1.0 / delta, (double)covering_number(set, delta).count);
    }
    return exponent_fit(pts);
}

CompactSet set_sum(const CompactSet& a, const CompactSet& b) {
    if (a.dim != 1 || b.dim != 1)
        throw std::invalid_argument("set_sum: only 1-d sets are supported");
    if (a.count() * b.count() > (std::size_t(1) << 26))
        throw std::invalid_argument("set_sum: point-count product exceeds 2^26");

    CompactSet out;
    out.dim = 1;
    out.resolution = a.resolution + b.resolution;
    out.label = "(" + a.label + ")+(" + b.label + ")";

    // Deduplicate on a grid of spacing resolution/2; keeps memory linear
    // while preserving the net property.
    const double cell = out.resolution / 2.0;
    std::unordered_set<std::int64_t> seen;
    seen.reserve(a.count() * 4);
    for (double x : a.points)
        for (double y : b.points) {
            const double s = x + y;
            const auto key = (std::int64_t)std::llround(s / cell);
            if (seen.insert(key).second) out.points.push_back(s);
        }
    std::sort(out.points.begin(), out.points.end());
    return out;
}

namespace {

// Shared scan: marks which tolerance-grid points of [lo,hi] are covered.
std::vector<bool> coverage_mask(const CompactSet& set, double lo, double hi,
                                double tolerance, std::size_t& m_out) {
    if (set.dim != 1)
        throw std::invalid_argument("interval_cover_check: only 1-d sets");
    if (tolerance < set.resolution)
        throw std::invalid_argument(
            "interval_cover_check: tolerance below set resolution");
    std::vector<double> sorted(set.points);
    std::sort(sorted.begin(), sorted.end());
    const auto m = (std::size_t)std::floor((hi - lo) / tolerance) + 1;
    m_out = m;
    std::vector<bool> covered(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        const double g = lo + (double)i * tolerance;
        auto it = std::lower_bound(sorted.begin(), sorted.end(), g);
        double best = std::numeric_limits<double>::infinity();
        if (it != sorted.end()) best = std::min(best, std::abs(*it - g));
        if (it != sorted.begin()) best = std::min(best, std::abs(*(it - 1) - g));
        covered[i] = best <= tolerance * (1.0 + 1e-12);
    }
    return covered;
}

} // namespace

bool interval_cover_check(const CompactSet& set, double lo, double hi,
                          double tolerance) {
    std::size_t m = 0;
    const auto covered = coverage_mask(set, lo, hi, tolerance, m);
    for (bool c : covered)
        if (!c) return false;
    for (double x : set.points)
        if (x < lo - tolerance || x > hi + tolerance) return false;
    return true;
}

GapReport interval_gap_report(const CompactSet& set, double lo, double hi,
                              double tolerance) {
    std::size_t m = 0;
    const auto covered = coverage_mask(set, lo, hi, tolerance, m);
    GapReport rep;
    std::size_t run = 0;
    for (std::size_t i = 0; i <= m; ++i) {
        if (i < m && !covered[i]) {
            ++run;
        } else if (run > 0) {
            rep.largest_gap = std::max(rep.largest_gap, (double)(run + 1) * tolerance);
            rep.total_uncovered += (double)run * tolerance;
            run = 0;
        }
    }
    return rep;
}

} // namespace spherelab
