#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spherelab/fields.hpp"
#include "spherelab/geomsets.hpp"
#include "spherelab/quadrature.hpp"

namespace spherelab {

// Truncation of the dyadic scale index k (scale t = 2^k). Compact supports
// force all but finitely many k to contribute zero; the range is validated
// user input rather than auto-detected.
struct LacunaryRange {
    int k_min = 0;
    int k_max = 0;
};

// Per-cell argmax record: re-evaluating the average at (u, v, k) reproduces
// the stored value exactly (same code path, same arithmetic).
struct Witness {
    double u[3] = {0, 0, 0};
    double v[3] = {0, 0, 0};
    int k = 0;
    bool has_v = false;
    bool has_k = false;
    double value = 0.0;
};

struct OperatorOutput {
    GridFunction value_grid;
    std::vector<Witness> witnesses; // one per cell of value_grid
    std::string meta;
};

// Optional output grid for operator evaluation; defaults to the input grid.
struct OutputGrid {
    int n = 0;
    double lo = 0.0, hi = 0.0;
};

// A^u_t f(x) = mean over S^(d-1) of f(x + t(u + y)).
double spherical_average_at(const GridFunction& f, double t,
                            std::span<const double> u, const SphereRule& rule,
                            std::span<const double> x);
GridFunction spherical_average(const GridFunction& f, double t,
                               std::span<const double> u, const SphereRule& rule,
                               std::optional<OutputGrid> out = std::nullopt);

// A^T_t f(x) = max over the covering centers of T at scale f.spacing of
// |A^u_t f(x)|; witness u recorded.
OperatorOutput maximal_over_set(const GridFunction& f, const CompactSet& T, double t,
                                const SphereRule& rule,
                                std::optional<OutputGrid> out = std::nullopt);

// sup over k in range and u in the T cover of |A^u_{2^k} f|.
OperatorOutput lacunary_maximal(const GridFunction& f, const CompactSet& T,
                                LacunaryRange range, const SphereRule& rule,
                                std::optional<OutputGrid> out = std::nullopt);

// Normalized annulus average at unit translate u and scale t.
double nikodym_average_at(const GridFunction& f, std::span<const double> u,
                          const AnnulusRule& ann, double t,
                          std::span<const double> x);
GridFunction nikodym_average(const GridFunction& f, std::span<const double> u,
                             const AnnulusRule& ann, double t = 1.0);

// sup over u nodes (node spacing must resolve delta) and optionally k.
OperatorOutput nikodym_maximal(const GridFunction& f, const AnnulusRule& ann,
                               const SphereRule& u_rule,
                               std::optional<LacunaryRange> range = std::nullopt,
                               std::optional<OutputGrid> out = std::nullopt);

// sup_u of the p-power annulus mean ((1/|S^delta|) integral of |f|^p)^(1/p).
// The annulus may live in R^(2d) with f in R^d; `half` selects which block
// of node coordinates feeds f (0 for the y-half, 1 for the z-half). Sharing
// nodes with bilinear_nikodym makes the Holder domination exact in the
// discrete arithmetic.
GridFunction annulus_power_mean(const GridFunction& f, const AnnulusRule& ann,
                                const SphereRule& u_rule, double p, int half = 0,
                                std::optional<OutputGrid> out = std::nullopt);

// Equispaced circle rule with an arbitrary node count (the sup-over-u grids
// of the Nikodym operators do not need the 2^level * 64 ladder).
SphereRule circle_rule(std::size_t count);

// Mean over S^(2d-1) of f1(x + t(u+y)) f2(x + t(v+z)) via the slicing rule;
// the d = 1 rule integrates over the circle angle directly.
double bilinear_average_at(const GridFunction& f1, const GridFunction& f2,
                           std::span<const double> u, std::span<const double> v,
                           double t, const SlicingRule& slicing,
                           const SphereRule& inner, std::span<const double> x);
GridFunction bilinear_average(const GridFunction& f1, const GridFunction& f2,
                              std::span<const double> u, std::span<const double> v,
                              double t, const SlicingRule& slicing,
                              const SphereRule& inner);

// sup over (u, v) pairs from the T cover and k in range; refuses when
// |cover|^2 * |range| * cells exceeds the budget.
OperatorOutput bilinear_lacunary_maximal(const GridFunction& f1, const GridFunction& f2,
                                         const CompactSet& T, LacunaryRange range,
                                         const SlicingRule& slicing,
                                         const SphereRule& inner,
                                         std::uint64_t budget = std::uint64_t(1) << 33,
                                         std::optional<OutputGrid> out = std::nullopt);

// sup over (u, v) node pairs of the normalized 2d-annulus average of the
// tensor product; same budget guard.
OperatorOutput bilinear_nikodym(const GridFunction& f1, const GridFunction& f2,
                                const AnnulusRule& ann2d, const SphereRule& u_rule,
                                const SphereRule& v_rule,
                                std::uint64_t budget = std::uint64_t(1) << 33,
                                std::optional<OutputGrid> out = std::nullopt);

} // namespace spherelab
