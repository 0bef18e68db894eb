#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace spherelab {

// Exact rational arithmetic for the exponent-region geometry; the vertex
// table and membership predicates are sign tests on cross-multiplied
// integers, never floating point.
struct Frac {
    long long num = 0;
    long long den = 1;

    Frac() = default;
    Frac(long long n, long long d = 1);
    static Frac parse(const std::string& text); // "2/3", "1", "0.5" rejected

    Frac operator+(const Frac& o) const;
    Frac operator-(const Frac& o) const;
    Frac operator*(const Frac& o) const;
    Frac operator/(const Frac& o) const;
    bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
    bool operator<(const Frac& o) const;
    bool operator<=(const Frac& o) const { return *this < o || *this == o; }
    double to_double() const { return (double)num / (double)den; }
    std::string str() const;
};

struct FracPoint {
    Frac x, y;
    bool operator==(const FracPoint& o) const { return x == o.x && y == o.y; }
};

// Vertices of the L^p-improving region for A^T (H, E) and of the bilinear
// lacunary region (P, and Q, R when d >= 3 and s < d-2), all in exact
// rationals. s must satisfy 0 < s < d-1.
struct RegionVertices {
    int d = 2;
    Frac s;
    FracPoint H, E, P;
    std::optional<FracPoint> Q, R;
};

RegionVertices region_vertices(int d, Frac s);

// (1/p, 1/q) admits the strong-type L^p -> L^q bound: closed triangle with
// vertices (0,0), H, E minus the excluded endpoint set ({E,H} or, for
// d = 3 with s > 3/2 and d >= 4 with s > d-2, the whole closed segment [E,H]).
bool strong_type_member(const RegionVertices& rv, FracPoint pq);

// (1/p, 1/q) is an endpoint with the restricted weak-type bound.
bool restricted_weak_member(const RegionVertices& rv, FracPoint pq);

// (1/p1, 1/p2) lies in the open convex hull O, A, P, B (plus Q, R when
// present) where the bilinear lacunary operator is bounded.
bool bilinear_region_member(const RegionVertices& rv, FracPoint p1p2);

} // namespace spherelab
