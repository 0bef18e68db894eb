#include "spherelab/region.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace spherelab {

namespace {

long long safe_mul(long long a, long long b) {
    const __int128 p = (__int128)a * b;
    if (p > INT64_MAX || p < INT64_MIN) throw std::overflow_error("Frac: overflow");
    return (long long)p;
}

} // namespace

Frac::Frac(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Frac: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
}

Frac Frac::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        std::size_t pos = 0;
        const long long n = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("Frac: bad literal " + text);
        return Frac(n);
    }
    return Frac(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

Frac Frac::operator+(const Frac& o) const {
    return Frac(safe_mul(num, o.den) + safe_mul(o.num, den), safe_mul(den, o.den));
}
Frac Frac::operator-(const Frac& o) const {
    return Frac(safe_mul(num, o.den) - safe_mul(o.num, den), safe_mul(den, o.den));
}
Frac Frac::operator*(const Frac& o) const {
    return Frac(safe_mul(num, o.num), safe_mul(den, o.den));
}
Frac Frac::operator/(const Frac& o) const {
    if (o.num == 0) throw std::invalid_argument("Frac: division by zero");
    return Frac(safe_mul(num, o.den), safe_mul(den, o.num));
}
bool Frac::operator<(const Frac& o) const {
    return (__int128)num * o.den < (__int128)o.num * den;
}
std::string Frac::str() const {
    return den == 1 ? std::to_string(num)
                    : std::to_string(num) + "/" + std::to_string(den);
}

namespace {

Frac frac_min(Frac a, Frac b) { return a < b ? a : b; }

// Endpoint diagonal coordinate 1/(1 + m(d, s)) where m is the case minimum.
Frac h_coordinate(int d, Frac s) {
    const Frac one(1);
    Frac m;
    if (d == 2) {
        m = s;
    } else if (d == 3) {
        m = frac_min(s / Frac(2),
                     frac_min(one / (Frac(3) - s),
                              (Frac(5) - Frac(2) * s) / (Frac(9) - Frac(4) * s)));
    } else {
        const Frac ds = Frac(d) - s;
        m = frac_min(s / Frac(d - 1),
                     frac_min(one / ds, ds / (Frac(3) * ds - Frac(2))));
    }
    return one / (one + m);
}

// sign of the cross product (b - a) x (p - a); exact.
int orient(const FracPoint& a, const FracPoint& b, const FracPoint& p) {
    const Frac v = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    return v.num == 0 ? 0 : (v.num > 0 ? 1 : -1);
}

bool in_closed_convex(const std::vector<FracPoint>& poly, FracPoint p) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (orient(poly[i], poly[(i + 1) % poly.size()], p) < 0) return false;
    return true;
}

bool in_open_convex(const std::vector<FracPoint>& poly, FracPoint p) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (orient(poly[i], poly[(i + 1) % poly.size()], p) <= 0) return false;
    return true;
}

bool on_closed_segment(const FracPoint& a, const FracPoint& b, FracPoint p) {
    if (orient(a, b, p) != 0) return false;
    const Frac lox = frac_min(a.x, b.x), hix = a.x < b.x ? b.x : a.x;
    const Frac loy = frac_min(a.y, b.y), hiy = a.y < b.y ? b.y : a.y;
    return lox <= p.x && p.x <= hix && loy <= p.y && p.y <= hiy;
}

// Excluded set at the corner [E, H]: the whole segment in the high-content
// regime (d = 3, s > 3/2; d >= 4, s > d-2), otherwise just the endpoints.
bool segment_excluded(const RegionVertices& rv) {
    if (rv.d == 3) return Frac(3, 2) < rv.s;
    if (rv.d >= 4) return Frac(rv.d - 2) < rv.s;
    return false;
}

} // namespace

RegionVertices region_vertices(int d, Frac s) {
    if (d < 2) throw std::invalid_argument("region_vertices: d must be >= 2");
    // the closed endpoint s = d-1 keeps every case formula finite
    if (!(Frac(0) < s) || !(s <= Frac(d - 1)))
        throw std::invalid_argument("region_vertices: need 0 < s <= d-1");
    RegionVertices rv;
    rv.d = d;
    rv.s = s;
    const Frac one(1);
    const Frac h = h_coordinate(d, s);
    rv.H = {h, h};
    const Frac dsp1 = Frac(d) - s + one;
    rv.E = {(Frac(d) - s) / dsp1, one / dsp1};
    const Frac pp = Frac(d - 1) / (Frac(d - 1) + s);
    rv.P = {pp, pp};
    if (d >= 3 && s < Frac(d - 2)) {
        const Frac q = (Frac(d) - s - one) / (Frac(d) - s);
        rv.Q = FracPoint{one, q};
        rv.R = FracPoint{q, one};
    }
    return rv;
}

bool strong_type_member(const RegionVertices& rv, FracPoint pq) {
    const FracPoint a{Frac(0), Frac(0)};
    if (!in_closed_convex({a, rv.E, rv.H}, pq)) return false;
    if (segment_excluded(rv)) return !on_closed_segment(rv.E, rv.H, pq);
    return !(pq == rv.E) && !(pq == rv.H);
}

bool restricted_weak_member(const RegionVertices& rv, FracPoint pq) {
    if (pq == rv.E) return true;
    if (pq == rv.H) return !segment_excluded(rv);
    return false;
}

bool bilinear_region_member(const RegionVertices& rv, FracPoint p1p2) {
    const FracPoint o{Frac(0), Frac(0)}, a{Frac(1), Frac(0)}, b{Frac(0), Frac(1)};
    if (rv.Q && rv.R)
        return in_open_convex({o, a, *rv.Q, rv.P, *rv.R, b}, p1p2);
    return in_open_convex({o, a, rv.P, b}, p1p2);
}

} // namespace spherelab
