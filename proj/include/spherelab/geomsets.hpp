#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spherelab/fit.hpp"

namespace spherelab {

// Finite discretization of a compact subset of R^d. The stored point cloud
// is an h-net of the ideal set, h = resolution; covering claims about the
// ideal set are only made for radii >= resolution.
struct CompactSet {
    int dim = 1;
    std::vector<double> points; // flat, size count()*dim
    double resolution = 0.0;
    std::string label;

    std::size_t count() const { return dim ? points.size() / dim : 0; }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * dim, (std::size_t)dim};
    }
};

struct CoveringResult {
    double delta = 0.0;
    std::size_t count = 0;
    std::vector<double> centers; // flat, count*dim
};

// Depth-th IFS iterate of [0,1] under x -> lambda x and x -> lambda x + (1-lambda).
// Result is a lambda^depth-net of the attractor; resolution = lambda^depth.
CompactSet cantor_set(double lambda, int depth);

// Single point {x} in R^1.
CompactSet singleton_set(double x = 0.0);

// h-net of [lo, hi] with resolution h.
CompactSet interval_set(double lo, double hi, double h);

// {0}^(d-m) x base, embedded in R^d with zeros in the leading coordinates.
CompactSet product_embed(const CompactSet& base, int ambient_dim);

// Greedy farthest-point cover with centers chosen from set.points; count is
// within a factor 2 of the optimal covering number. Deterministic tie-break:
// lowest point index.
CoveringResult covering_number(const CompactSet& set, double delta);

// Least-squares slope of log N(T,delta) against log(1/delta) over
// geometrically spaced delta in [delta_min, delta_max].
FitResult minkowski_fit(const CompactSet& set, double delta_min, double delta_max,
                        int num_scales);

// Minkowski sum {x+y} of two 1-d sets, deduplicated on a grid of spacing
// resolution/2; resolution = a.resolution + b.resolution.
CompactSet set_sum(const CompactSet& a, const CompactSet& b);

// True iff every grid point of [lo,hi] at spacing `tolerance` is within
// tolerance of a set point and all set points lie in the fattened interval.
bool interval_cover_check(const CompactSet& set, double lo, double hi,
                          double tolerance);

// Largest maximal sub-interval of [lo,hi] whose tolerance-grid points are all
// uncovered, and the total uncovered length. Companion diagnostic to
// interval_cover_check.
struct GapReport {
    double largest_gap = 0.0;
    double total_uncovered = 0.0;
};
GapReport interval_gap_report(const CompactSet& set, double lo, double hi,
                              double tolerance);

} // namespace spherelab
