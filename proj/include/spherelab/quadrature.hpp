#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace spherelab {

// Gauss-Legendre nodes/weights on [-1, 1], exact for polynomials of degree
// <= 2m-1.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

// Quadrature rule for the normalized surface measure on S^(n-1).
struct SphereRule {
    enum class Kind { deterministic, monte_carlo };
    int ambient_dim = 2;
    std::vector<double> nodes;   // flat, count()*ambient_dim, unit vectors
    std::vector<double> weights; // sum to 1
    Kind kind = Kind::deterministic;
    std::uint64_t seed = 0;
    int exact_degree = 0; // polynomials up to this degree integrate exactly

    std::size_t count() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const {
        return {nodes.data() + i * ambient_dim, (std::size_t)ambient_dim};
    }
    double integrate(const std::function<double(std::span<const double>)>& f) const;
};

// Deterministic rule on S^(n-1) for n in {2,3,4,6,8}. n=2 is the equispaced
// circle rule with 2^level*64 points; n=3 a Gauss-Legendre(polar) x
// equispaced(azimuth) product; n>=4 a recursive polar product. Node counts
// double per level; rules above 2^24 nodes are refused.
SphereRule sphere_rule(int n, int level);

// Seeded uniform sampling on S^(n-1) with 4^level*4096 nodes (Box-Muller on
// a counter-seeded mt19937_64; fully reproducible).
SphereRule sphere_rule_monte_carlo(int n, int level, std::uint64_t seed);

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// Quadrature rule for the normalized measure on the shell
// 1-delta < |y| < 1+delta in R^n, with the closed-form shell volume.
struct AnnulusRule {
    int ambient_dim = 2;
    double delta = 0.0;
    std::vector<double> nodes;   // flat
    std::vector<double> weights; // sum to 1
    double volume = 0.0;         // |S^delta(0)|

    std::size_t count() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const {
        return {nodes.data() + i * ambient_dim, (std::size_t)ambient_dim};
    }
    double average(const std::function<double(std::span<const double>)>& f) const;
};

// Radial Gauss-Legendre on [1-delta, 1+delta] with Jacobian r^(n-1), tensored
// with sphere_rule(n, level).
AnnulusRule annulus_rule(int n, double delta, int level, std::uint64_t seed = 0);

// One radial node of the decomposition of S^(2d-1) into products
// S^(d-1)(r) x S^(d-1)(sqrt(1-r^2)). For d = 1 the rule degenerates to the
// circle-angle parametrization and `r` holds theta with inner_scale unused.
struct SliceNode {
    double r = 0.0;
    double weight = 0.0;
    double inner_scale = 0.0; // sqrt(1 - r^2)
};

struct SlicingRule {
    int d = 2;
    std::vector<SliceNode> nodes; // weights sum to 1
};

// Realizes the mean over S^(2d-1) of F(y, z) = f1(y) f2(z) as
// sum_i w_i * [mean of f1 over S^(d-1)(r_i)] * [mean of f2 over
// S^(d-1)(inner_scale_i)]; the normalization is fixed by F == 1 -> 1.
SlicingRule slicing_weights(int d, int level);

} // namespace spherelab
