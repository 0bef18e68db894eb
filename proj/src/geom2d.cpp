#include "spherelab/geom2d.hpp"

#include <algorithm>
#include <cmath>

namespace spherelab {
namespace geom2d {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap(double a) { // into [0, 2*pi)
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

} // namespace

void ArcSet::add(double a, double b) {
    if (!(b > a)) return;
    if (b - a >= kTwoPi) {
        ivs_.assign(1, {0.0, kTwoPi});
        return;
    }
    const double s = wrap(a);
    ivs_.emplace_back(s, s + (b - a)); // may extend past 2*pi; kept unwrapped
}

double ArcSet::measure() const {
    // Split wrapped tails, then sweep.
    std::vector<std::pair<double, double>> flat;
    for (auto [a, b] : ivs_) {
        if (b <= kTwoPi) {
            flat.emplace_back(a, b);
        } else {
            flat.emplace_back(a, kTwoPi);
            flat.emplace_back(0.0, b - kTwoPi);
        }
    }
    std::sort(flat.begin(), flat.end());
    double total = 0.0, cur_a = 0.0, cur_b = -1.0;
    for (auto [a, b] : flat) {
        if (a > cur_b) {
            if (cur_b > cur_a) total += cur_b - cur_a;
            cur_a = a;
            cur_b = b;
        } else {
            cur_b = std::max(cur_b, b);
        }
    }
    if (cur_b > cur_a) total += cur_b - cur_a;
    return std::min(total, kTwoPi);
}

ArcSet ArcSet::unite(const ArcSet& s, const ArcSet& t) {
    ArcSet out = s;
    out.ivs_.insert(out.ivs_.end(), t.ivs_.begin(), t.ivs_.end());
    return out;
}

ArcSet ArcSet::intersect(const ArcSet& s, const ArcSet& t) {
    ArcSet out;
    for (auto [a, b] : s.ivs_)
        for (auto [c, d] : t.ivs_) {
            // compare on the universal cover: shift [c,d] by -2pi, 0, +2pi
            for (int k = -1; k <= 1; ++k) {
                const double lo = std::max(a, c + k * kTwoPi);
                const double hi = std::min(b, d + k * kTwoPi);
                if (hi > lo) out.add(lo, hi);
            }
        }
    return out;
}

ArcSet circle_ball_arcs(double cx, double cy, double zx, double zy, double rho) {
    ArcSet out;
    const double dx = zx - cx, dy = zy - cy;
    const double q = std::hypot(dx, dy);
    if (q + 1.0 <= rho) { // circle entirely inside the ball
        out.add(0.0, kTwoPi);
        return out;
    }
    if (q <= 0.0 || std::abs(q - 1.0) >= rho) return out;
    const double c = (1.0 + q * q - rho * rho) / (2.0 * q);
    const double alpha = std::acos(std::clamp(c, -1.0, 1.0));
    const double theta0 = std::atan2(dy, dx);
    out.add(theta0 - alpha, theta0 + alpha);
    return out;
}

ArcSet circle_sin_band(double cy, double lo, double hi) {
    ArcSet out;
    const double slo = std::max(lo - cy, -1.0);
    const double shi = std::min(hi - cy, 1.0);
    if (slo > shi) return out;
    const double a = std::asin(slo), b = std::asin(shi);
    out.add(a, b);                    // right half, sin increasing
    out.add(M_PI - b, M_PI - a);      // left half, sin decreasing
    return out;
}

ArcSet circle_cos_band(double cx, double lo, double hi) {
    ArcSet out;
    const double clo = std::max(lo - cx, -1.0);
    const double chi = std::min(hi - cx, 1.0);
    if (clo > chi) return out;
    const double a = std::acos(chi), b = std::acos(clo); // a <= b in [0, pi]
    out.add(a, b);
    out.add(-b, -a);
    return out;
}

ArcSet circle_capsule_arcs(double cx, double cy, double p, double q, double rho) {
    const ArcSet rect = ArcSet::intersect(circle_sin_band(cy, -rho, rho),
                                          circle_cos_band(cx, p, q));
    const ArcSet caps = ArcSet::unite(circle_ball_arcs(cx, cy, p, 0.0, rho),
                                      circle_ball_arcs(cx, cy, q, 0.0, rho));
    return ArcSet::unite(rect, caps);
}

double disk_overlap_area(double d, double r1, double r2) {
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    if (d >= r1 + r2) return 0.0;
    const double rmin = std::min(r1, r2);
    if (d <= std::abs(r1 - r2)) return M_PI * rmin * rmin;
    const double c1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1);
    const double c2 = (d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2);
    const double a1 = std::acos(std::clamp(c1, -1.0, 1.0));
    const double a2 = std::acos(std::clamp(c2, -1.0, 1.0));
    const double tri =
        0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) *
                                          (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * a1 + r2 * r2 * a2 - tri;
}

double annulus_overlap_area(double d, double a_lo, double a_hi, double b_lo,
                            double b_hi) {
    return disk_overlap_area(d, a_hi, b_hi) - disk_overlap_area(d, a_hi, b_lo) -
           disk_overlap_area(d, a_lo, b_hi) + disk_overlap_area(d, a_lo, b_lo);
}

double ball_radial_band_area(double cdist, double rho, double r_lo, double r_hi) {
    return disk_overlap_area(cdist, rho, r_hi) - disk_overlap_area(cdist, rho, r_lo);
}

} // namespace geom2d
} // namespace spherelab
