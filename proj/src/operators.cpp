#include "spherelab/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace spherelab {

namespace {

GridFunction make_output(const GridFunction& f, const std::optional<OutputGrid>& out,
                         int dim) {
    GridFunction g;
    g.dim = dim;
    if (out) {
        g.n = out->n;
        g.lo = out->lo;
        g.hi = out->hi;
    } else {
        g.n = f.n;
        g.lo = f.lo;
        g.hi = f.hi;
    }
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= (std::size_t)g.n;
    g.values.assign(total, 0.0);
    return g;
}

void check_dim(const GridFunction& f, int dim, const char* who) {
    if (f.dim != dim)
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

// Covering centers of T at the output grid scale; the sup over T is realized
// on these centers.
std::vector<double> cover_centers(const CompactSet& T, double spacing, int dim,
                                  std::size_t& count) {
    if (T.count() == 0) throw std::invalid_argument("maximal operator: empty T");
    if (T.dim != dim) throw std::invalid_argument("maximal operator: T dimension");
    if (T.resolution > spacing)
        throw std::invalid_argument(
            "maximal operator: T resolution " + std::to_string(T.resolution) +
            " coarser than grid spacing " + std::to_string(spacing) +
            "; the sup over T is certified only at matching resolution");
    CoveringResult cov = covering_number(T, spacing);
    count = cov.count;
    return std::move(cov.centers);
}

} // namespace

double spherical_average_at(const GridFunction& f, double t,
                            std::span<const double> u, const SphereRule& rule,
                            std::span<const double> x) {
    double acc = 0.0;
    double y[3];
    for (std::size_t i = 0; i < rule.count(); ++i) {
        const auto node = rule.node(i);
        for (int ax = 0; ax < f.dim; ++ax) y[ax] = x[ax] + t * (u[ax] + node[ax]);
        acc += rule.weights[i] * eval_interp(f, {y, (std::size_t)f.dim});
    }
    return acc;
}

GridFunction spherical_average(const GridFunction& f, double t,
                               std::span<const double> u, const SphereRule& rule,
                               std::optional<OutputGrid> out) {
    if (rule.ambient_dim != f.dim)
        throw std::invalid_argument("spherical_average: rule dimension mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("spherical_average: t <= 0");
    GridFunction g = make_output(f, out, f.dim);
    std::vector<double> x(f.dim);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        g.cell_center(c, x);
        g.values[c] = spherical_average_at(f, t, u, rule, x);
    }
    return g;
}

OperatorOutput maximal_over_set(const GridFunction& f, const CompactSet& T, double t,
                                const SphereRule& rule, std::optional<OutputGrid> out) {
    if (rule.ambient_dim != f.dim)
        throw std::invalid_argument("maximal_over_set: rule dimension mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("maximal_over_set: t <= 0");
    OperatorOutput res;
    res.value_grid = make_output(f, out, f.dim);
    res.witnesses.assign(res.value_grid.cell_count(), {});
    std::size_t ucount = 0;
    const auto centers = cover_centers(T, res.value_grid.spacing(), f.dim, ucount);

    std::vector<double> x(f.dim);
    for (std::size_t c = 0; c < res.value_grid.cell_count(); ++c) {
        res.value_grid.cell_center(c, x);
        double best = -1.0;
        Witness w;
        for (std::size_t ui = 0; ui < ucount; ++ui) {
            std::span<const double> u{centers.data() + ui * f.dim, (std::size_t)f.dim};
            const double val = std::abs(spherical_average_at(f, t, u, rule, x));
            if (val > best) {
                best = val;
                for (int ax = 0; ax < f.dim; ++ax) w.u[ax] = u[ax];
                w.value = val;
            }
        }
        res.value_grid.values[c] = best;
        res.witnesses[c] = w;
    }
    res.meta = "maximal_over_set t=" + std::to_string(t) +
               " cover=" + std::to_string(ucount);
    return res;
}

OperatorOutput lacunary_maximal(const GridFunction& f, const CompactSet& T,
                                LacunaryRange range, const SphereRule& rule,
                                std::optional<OutputGrid> out) {
    if (rule.ambient_dim != f.dim)
        throw std::invalid_argument("lacunary_maximal: rule dimension mismatch");
    if (range.k_min > range.k_max)
        throw std::invalid_argument("lacunary_maximal: empty k range");
    double umax = 0.0;
    for (std::size_t i = 0; i < T.count(); ++i) {
        double nrm = 0.0;
        for (double c : T.point(i)) nrm += c * c;
        umax = std::max(umax, std::sqrt(nrm));
    }
    const double reach = std::ldexp(1.0, range.k_max) * (1.0 + umax);
    if (reach > (f.hi - f.lo))
        throw std::invalid_argument(
            "lacunary_maximal: scale 2^" + std::to_string(range.k_max) +
            " with |u| <= " + std::to_string(umax) + " overflows the box");

    OperatorOutput res;
    res.value_grid = make_output(f, out, f.dim);
    res.witnesses.assign(res.value_grid.cell_count(), {});
    std::size_t ucount = 0;
    const auto centers = cover_centers(T, res.value_grid.spacing(), f.dim, ucount);

    std::vector<double> x(f.dim);
    for (std::size_t c = 0; c < res.value_grid.cell_count(); ++c) {
        res.value_grid.cell_center(c, x);
        double best = -1.0;
        Witness w;
        w.has_k = true;
        for (int k = range.k_min; k <= range.k_max; ++k) {
            const double t = std::ldexp(1.0, k);
            for (std::size_t ui = 0; ui < ucount; ++ui) {
                std::span<const double> u{centers.data() + ui * f.dim,
                                          (std::size_t)f.dim};
                const double val = std::abs(spherical_average_at(f, t, u, rule, x));
                if (val > best) {
                    best = val;
                    for (int ax = 0; ax < f.dim; ++ax) w.u[ax] = u[ax];
                    w.k = k;
                    w.value = val;
                }
            }
        }
        res.value_grid.values[c] = best;
        res.witnesses[c] = w;
    }
    res.meta = "lacunary_maximal k=[" + std::to_string(range.k_min) + "," +
               std::to_string(range.k_max) + "] cover=" + std::to_string(ucount);
    return res;
}

double nikodym_average_at(const GridFunction& f, std::span<const double> u,
                          const AnnulusRule& ann, double t,
                          std::span<const double> x) {
    double acc = 0.0;
    double y[3];
    for (std::size_t i = 0; i < ann.count(); ++i) {
        const auto node = ann.node(i);
        for (int ax = 0; ax < f.dim; ++ax) y[ax] = x[ax] + t * (u[ax] + node[ax]);
        acc += ann.weights[i] * eval_interp(f, {y, (std::size_t)f.dim});
    }
    return acc;
}

GridFunction nikodym_average(const GridFunction& f, std::span<const double> u,
                             const AnnulusRule& ann, double t) {
    check_dim(f, ann.ambient_dim, "nikodym_average");
    double nrm = 0.0;
    for (std::size_t ax = 0; ax < u.size(); ++ax) nrm += u[ax] * u[ax];
    if (std::abs(std::sqrt(nrm) - 1.0) > 1e-9)
        throw std::invalid_argument("nikodym_average: u must be a unit vector");
    GridFunction g = make_output(f, std::nullopt, f.dim);
    std::vector<double> x(f.dim);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        g.cell_center(c, x);
        g.values[c] = nikodym_average_at(f, u, ann, t, x);
    }
    return g;
}

namespace {

void check_u_rule_spacing(const SphereRule& u_rule, double delta, const char* who) {
    // equispaced circle rule: exact spacing; other rules: mean-spacing proxy
    const double spacing =
        u_rule.ambient_dim == 2
            ? 2.0 * M_PI / (double)u_rule.count()
            : 2.0 * std::pow(unit_ball_volume(u_rule.ambient_dim - 1) /
                                 (double)u_rule.count(),
                             1.0 / (u_rule.ambient_dim - 1));
    if (spacing > delta)
        throw std::invalid_argument(std::string(who) + ": u-grid spacing " +
                                    std::to_string(spacing) +
                                    " too coarse for delta " + std::to_string(delta));
}

} // namespace

OperatorOutput nikodym_maximal(const GridFunction& f, const AnnulusRule& ann,
                               const SphereRule& u_rule,
                               std::optional<LacunaryRange> range,
                               std::optional<OutputGrid> out) {
    check_dim(f, ann.ambient_dim, "nikodym_maximal");
    check_dim(f, u_rule.ambient_dim, "nikodym_maximal");
    check_u_rule_spacing(u_rule, ann.delta, "nikodym_maximal");

    OperatorOutput res;
    res.value_grid = make_output(f, out, f.dim);
    res.witnesses.assign(res.value_grid.cell_count(), {});
    const LacunaryRange kr = range.value_or(LacunaryRange{0, 0});

    std::vector<double> x(f.dim);
    for (std::size_t c = 0; c < res.value_grid.cell_count(); ++c) {
        res.value_grid.cell_center(c, x);
        double best = -1.0;
        Witness w;
        w.has_k = range.has_value();
        for (int k = kr.k_min; k <= kr.k_max; ++k) {
            const double t = std::ldexp(1.0, k);
            for (std::size_t ui = 0; ui < u_rule.count(); ++ui) {
                const auto u = u_rule.node(ui);
                const double val = std::abs(nikodym_average_at(f, u, ann, t, x));
                if (val > best) {
                    best = val;
                    for (int ax = 0; ax < f.dim; ++ax) w.u[ax] = u[ax];
                    w.k = k;
                    w.value = val;
                }
            }
        }
        res.value_grid.values[c] = best;
        res.witnesses[c] = w;
    }
    res.meta = "nikodym_maximal delta=" + std::to_string(ann.delta);
    return res;
}

SphereRule circle_rule(std::size_t count) {
    if (count < 4) throw std::invalid_argument("circle_rule: count < 4");
    SphereRule rule;
    rule.ambient_dim = 2;
    rule.weights.assign(count, 1.0 / (double)count);
    rule.nodes.reserve(2 * count);
    for (std::size_t k = 0; k < count; ++k) {
        const double th = 2.0 * M_PI * (double)k / (double)count;
        rule.nodes.push_back(std::cos(th));
        rule.nodes.push_back(std::sin(th));
    }
    rule.exact_degree = (int)count - 1;
    return rule;
}

GridFunction annulus_power_mean(const GridFunction& f, const AnnulusRule& ann,
                                const SphereRule& u_rule, double p, int half,
                                std::optional<OutputGrid> out) {
    if (ann.ambient_dim != f.dim && ann.ambient_dim != 2 * f.dim)
        throw std::invalid_argument("annulus_power_mean: annulus dimension");
    check_u_rule_spacing(u_rule, ann.delta, "annulus_power_mean");
    if (!(p >= 1.0)) throw std::invalid_argument("annulus_power_mean: p < 1");
    const int off = half ? f.dim : 0;
    if (half && ann.ambient_dim != 2 * f.dim)
        throw std::invalid_argument("annulus_power_mean: z-half needs a 2d annulus");
    GridFunction g = make_output(f, out, f.dim);
    std::vector<double> x(f.dim);
    double y[3];
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        g.cell_center(c, x);
        double best = 0.0;
        for (std::size_t ui = 0; ui < u_rule.count(); ++ui) {
            const auto u = u_rule.node(ui);
            double acc = 0.0;
            for (std::size_t i = 0; i < ann.count(); ++i) {
                const auto node = ann.node(i);
                for (int ax = 0; ax < f.dim; ++ax)
                    y[ax] = x[ax] + u[ax] + node[off + ax];
                acc += ann.weights[i] *
                       std::pow(std::abs(eval_interp(f, {y, (std::size_t)f.dim})), p);
            }
            best = std::max(best, acc);
        }
        g.values[c] = std::pow(best, 1.0 / p);
    }
    return g;
}

double bilinear_average_at(const GridFunction& f1, const GridFunction& f2,
                           std::span<const double> u, std::span<const double> v,
                           double t, const SlicingRule& slicing,
                           const SphereRule& inner, std::span<const double> x) {
    const int d = f1.dim;
    if (d == 1) {
        // circle-angle parametrization: y = cos(theta), z = sin(theta)
        double acc = 0.0;
        for (const auto& nd : slicing.nodes) {
            const double y = x[0] + t * (u[0] + std::cos(nd.r));
            const double z = x[0] + t * (v[0] + std::sin(nd.r));
            acc += nd.weight * eval_interp(f1, {&y, 1}) * eval_interp(f2, {&z, 1});
        }
        return acc;
    }
    double acc = 0.0;
    double y[3];
    for (const auto& nd : slicing.nodes) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < inner.count(); ++i) {
            const auto node = inner.node(i);
            for (int ax = 0; ax < d; ++ax) y[ax] = x[ax] + t * (u[ax] + nd.r * node[ax]);
            m1 += inner.weights[i] * eval_interp(f1, {y, (std::size_t)d});
            for (int ax = 0; ax < d; ++ax)
                y[ax] = x[ax] + t * (v[ax] + nd.inner_scale * node[ax]);
            m2 += inner.weights[i] * eval_interp(f2, {y, (std::size_t)d});
        }
        acc += nd.weight * m1 * m2;
    }
    return acc;
}

GridFunction bilinear_average(const GridFunction& f1, const GridFunction& f2,
                              std::span<const double> u, std::span<const double> v,
                              double t, const SlicingRule& slicing,
                              const SphereRule& inner) {
    if (f1.dim != f2.dim || f1.n != f2.n || f1.lo != f2.lo || f1.hi != f2.hi)
        throw std::invalid_argument("bilinear_average: operands must share a grid");
    if (f1.dim > 3) throw std::invalid_argument("bilinear_average: d must be 1..3");
    if (slicing.d != f1.dim)
        throw std::invalid_argument("bilinear_average: slicing rule dimension");
    GridFunction g = make_output(f1, std::nullopt, f1.dim);
    std::vector<double> x(f1.dim);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        g.cell_center(c, x);
        g.values[c] = bilinear_average_at(f1, f2, u, v, t, slicing, inner, x);
    }
    return g;
}

OperatorOutput bilinear_lacunary_maximal(const GridFunction& f1, const GridFunction& f2,
                                         const CompactSet& T, LacunaryRange range,
                                         const SlicingRule& slicing,
                                         const SphereRule& inner, std::uint64_t budget,
                                         std::optional<OutputGrid> out) {
    if (f1.dim != f2.dim || f1.n != f2.n)
        throw std::invalid_argument("bilinear_lacunary_maximal: operand grids differ");
    OperatorOutput res;
    res.value_grid = make_output(f1, out, f1.dim);
    res.witnesses.assign(res.value_grid.cell_count(), {});
    std::size_t ucount = 0;
    const auto centers = cover_centers(T, res.value_grid.spacing(), f1.dim, ucount);

    const std::uint64_t kcount = (std::uint64_t)(range.k_max - range.k_min + 1);
    const std::uint64_t cost = (std::uint64_t)ucount * ucount * kcount *
                               res.value_grid.cell_count();
    if (cost > budget)
        throw std::invalid_argument(
            "bilinear_lacunary_maximal: |cover|^2*|range|*cells = " +
            std::to_string(cost) + " exceeds budget " + std::to_string(budget));

    std::vector<double> x(f1.dim);
    const int d = f1.dim;
    for (std::size_t c = 0; c < res.value_grid.cell_count(); ++c) {
        res.value_grid.cell_center(c, x);
        double best = -1.0;
        Witness w;
        w.has_k = true;
        w.has_v = true;
        for (int k = range.k_min; k <= range.k_max; ++k) {
            const double t = std::ldexp(1.0, k);
            for (std::size_t ui = 0; ui < ucount; ++ui)
                for (std::size_t vi = 0; vi < ucount; ++vi) {
                    std::span<const double> u{centers.data() + ui * d, (std::size_t)d};
                    std::span<const double> v{centers.data() + vi * d, (std::size_t)d};
                    const double val =
                        std::abs(bilinear_average_at(f1, f2, u, v, t, slicing, inner, x));
                    if (val > best) {
                        best = val;
                        for (int ax = 0; ax < d; ++ax) {
                            w.u[ax] = u[ax];
                            w.v[ax] = v[ax];
                        }
                        w.k = k;
                        w.value = val;
                    }
                }
        }
        res.value_grid.values[c] = best;
        res.witnesses[c] = w;
    }
    res.meta = "bilinear_lacunary_maximal cover=" + std::to_string(ucount);
    return res;
}

OperatorOutput bilinear_nikodym(const GridFunction& f1, const GridFunction& f2,
                                const AnnulusRule& ann2d, const SphereRule& u_rule,
                                const SphereRule& v_rule, std::uint64_t budget,
                                std::optional<OutputGrid> out) {
    const int d = f1.dim;
    if (f2.dim != d || f1.n != f2.n)
        throw std::invalid_argument("bilinear_nikodym: operand grids differ");
    if (ann2d.ambient_dim != 2 * d)
        throw std::invalid_argument("bilinear_nikodym: annulus must live in R^(2d)");
    check_u_rule_spacing(u_rule, ann2d.delta, "bilinear_nikodym");
    check_u_rule_spacing(v_rule, ann2d.delta, "bilinear_nikodym");

    OperatorOutput res;
    res.value_grid = make_output(f1, out, d);
    res.witnesses.assign(res.value_grid.cell_count(), {});
    const std::uint64_t cost = (std::uint64_t)u_rule.count() * v_rule.count() *
                               res.value_grid.cell_count();
    if (cost > budget)
        throw std::invalid_argument("bilinear_nikodym: pair sweep cost " +
                                    std::to_string(cost) + " exceeds budget " +
                                    std::to_string(budget));

    std::vector<double> x(d);
    double y[3], z[3];
    for (std::size_t c = 0; c < res.value_grid.cell_count(); ++c) {
        res.value_grid.cell_center(c, x);
        double best = -1.0;
        Witness w;
        w.has_v = true;
        for (std::size_t ui = 0; ui < u_rule.count(); ++ui)
            for (std::size_t vi = 0; vi < v_rule.count(); ++vi) {
                const auto u = u_rule.node(ui);
                const auto v = v_rule.node(vi);
                double acc = 0.0;
                for (std::size_t i = 0; i < ann2d.count(); ++i) {
                    const auto node = ann2d.node(i);
                    for (int ax = 0; ax < d; ++ax) {
                        y[ax] = x[ax] + u[ax] + node[ax];
                        z[ax] = x[ax] + v[ax] + node[d + ax];
                    }
                    acc += ann2d.weights[i] *
                           eval_interp(f1, {y, (std::size_t)d}) *
                           eval_interp(f2, {z, (std::size_t)d});
                }
                acc = std::abs(acc);
                if (acc > best) {
                    best = acc;
                    for (int ax = 0; ax < d; ++ax) {
                        w.u[ax] = u[ax];
                        w.v[ax] = v[ax];
                    }
                    w.value = acc;
                }
            }
        res.value_grid.values[c] = best;
        res.witnesses[c] = w;
    }
    res.meta = "bilinear_nikodym delta=" + std::to_string(ann2d.delta);
    return res;
}

} // namespace spherelab
