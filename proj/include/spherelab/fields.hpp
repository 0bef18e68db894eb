#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spherelab/geomsets.hpp"

namespace spherelab {

// Real-valued function sampled at cell centers of a regular grid on the
// cube [lo, hi]^dim. Evaluation outside the box is zero; all experiment
// inputs are compactly supported.
struct GridFunction {
    int dim = 1;
    double lo = 0.0, hi = 1.0;
    int n = 2; // cells per axis
    std::vector<double> values; // size n^dim, last axis fastest

    double spacing() const { return (hi - lo) / n; }
    double cell_volume() const;
    std::size_t cell_count() const { return values.size(); }
    double center(int i) const { return lo + (i + 0.5) * spacing(); }
    // Coordinates of the center of flat cell index `c`.
    void cell_center(std::size_t c, std::span<double> x) const;
};

struct LorentzExponent {
    double p = 1.0;
    double r = 1.0; // r = infinity encodes the weak norm
};

struct DistributionFunction {
    std::vector<double> thresholds; // decreasing
    std::vector<double> measures;   // nonincreasing in threshold order
};

using PointFn = std::function<double(std::span<const double>)>;

// Cell-centered sampling of f on [lo, hi]^dim with n cells per axis.
GridFunction sample(const PointFn& f, int dim, double lo, double hi, int n);

// Multilinear interpolation; exact on multilinear polynomials inside the
// box, zero outside it.
double eval_interp(const GridFunction& g, std::span<const double> x);

// (sum |v|^p cellvol)^(1/p); max |v| for p = infinity. Quasinorms 0 < p < 1
// are allowed.
double lp_norm(const GridFunction& g, double p);

// Sampled distribution function d_f(t) at num_thresholds geometrically
// spaced t between the smallest positive |value| and the largest.
DistributionFunction distribution(const GridFunction& g, int num_thresholds);

// Lorentz quasinorm evaluated exactly on the piecewise-constant distribution
// function of the grid: (p/r)^(1/r) (sum_k (k cv)^(r/p) (v_k^r - v_{k+1}^r))^(1/r)
// over the sorted positive values, and sup_t t d_f(t)^(1/p) for r = infinity.
double lorentz_norm(const GridFunction& g, LorentzExponent e);

// Centered maximal function: sup over dyadic radii (spacing .. box diameter)
// of box-filter averages, zero-padded at the boundary. Comparable to the
// continuum ball maximal function within the documented factor
// hl_comparability_factor().
GridFunction hl_maximal(const GridFunction& g);
double hl_comparability_factor(int dim);

// Witness pair for the endpoint blow-up experiment: the layered function
// f = sum_i 4^((d-1)i) chi_{C2 e1 + B(0, a 4^-i)} on a grid fine enough to
// resolve the thinnest layer, and the translation set T = C1 e1 on the same
// axis. C1, C2 are Cantor iterates of ratios 2^(-1/s), 2^(-1/(1-s)).
struct NecWitness {
    GridFunction f;
    CompactSet T;          // subset of the e1-axis in R^d
    CompactSet c2;         // the 1-d net generating the layers
    double a = 0.0;
    int levels = 0;        // N
};
NecWitness nec_counterexample(int d, double s, int N, double a);

} // namespace spherelab
