#pragma once

#include <vector>

namespace spherelab {
namespace geom2d {

// Union of angular intervals on the circle, stored unwrapped as [a, b] with
// b - a <= 2*pi. Used for exact arc measures of circle/region intersections.
class ArcSet {
  public:
    void add(double a, double b); // interval [a, b], any reals, b >= a
    double measure() const;       // measure of the union, <= 2*pi
    const std::vector<std::pair<double, double>>& intervals() const { return ivs_; }
    static ArcSet intersect(const ArcSet& s, const ArcSet& t);
    static ArcSet unite(const ArcSet& s, const ArcSet& t);

  private:
    std::vector<std::pair<double, double>> ivs_; // normalized to [0, 4*pi)
};

// {theta : |c + (cos,sin)(theta) - z| <= rho} for the unit circle centered at
// c; at most one arc.
ArcSet circle_ball_arcs(double cx, double cy, double zx, double zy, double rho);

// {theta : lo <= cy + sin(theta) <= hi} and the cosine analogue.
ArcSet circle_sin_band(double cy, double lo, double hi);
ArcSet circle_cos_band(double cx, double lo, double hi);

// {theta : dist(c + e(theta), [p,q] x {0}) <= rho}: a capsule around an
// axis-aligned segment.
ArcSet circle_capsule_arcs(double cx, double cy, double p, double q, double rho);

// Area of the intersection of two disks with center distance d.
double disk_overlap_area(double d, double r1, double r2);

// Area of the intersection of two annuli (radii bands [a_lo,a_hi], [b_lo,b_hi])
// with center distance d, by inclusion-exclusion of disk overlaps.
double annulus_overlap_area(double d, double a_lo, double a_hi, double b_lo,
                            double b_hi);

// Area of B(c, rho) intersected with the centered radial band
// {r_lo <= |y| <= r_hi}, c at distance cdist from the origin.
double ball_radial_band_area(double cdist, double rho, double r_lo, double r_hi);

} // namespace geom2d
} // namespace spherelab
