#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "spherelab/experiments.hpp"
#include "spherelab/fields.hpp"
#include "spherelab/geomsets.hpp"
#include "spherelab/operators.hpp"
#include "spherelab/quadrature.hpp"
#include "spherelab/region.hpp"
#include "spherelab/spectral.hpp"

namespace py = pybind11;
using namespace spherelab;

namespace {

py::array_t<double> grid_values(const GridFunction& g) {
    std::vector<py::ssize_t> shape(g.dim, g.n);
    py::array_t<double> out(shape);
    std::copy(g.values.begin(), g.values.end(), out.mutable_data());
    return out;
}

GridFunction grid_from_array(py::array_t<double, py::array::c_style> arr, double lo,
                             double hi) {
    GridFunction g;
    g.dim = (int)arr.ndim();
    g.n = (int)arr.shape(0);
    for (int ax = 1; ax < g.dim; ++ax)
        if (arr.shape(ax) != g.n)
            throw std::invalid_argument("grid arrays must be square");
    g.lo = lo;
    g.hi = hi;
    g.values.assign(arr.data(), arr.data() + arr.size());
    return g;
}

} // namespace

PYBIND11_MODULE(_spherelab, m) {
    m.doc() = "spherical averaging and Nikodym maximal-operator laboratory";

    py::class_<CompactSet>(m, "CompactSet")
        .def_readonly("dim", &CompactSet::dim)
        .def_readonly("resolution", &CompactSet::resolution)
        .def_readonly("label", &CompactSet::label)
        .def_property_readonly("points",
                               [](const CompactSet& s) {
                                   py::array_t<double> out(
                                       {(py::ssize_t)s.count(), (py::ssize_t)s.dim});
                                   std::copy(s.points.begin(), s.points.end(),
                                             out.mutable_data());
                                   return out;
                               })
        .def("__len__", &CompactSet::count);

    py::class_<CoveringResult>(m, "CoveringResult")
        .def_readonly("delta", &CoveringResult::delta)
        .def_readonly("count", &CoveringResult::count);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("slope", &FitResult::slope)
        .def_readonly("intercept", &FitResult::intercept)
        .def_readonly("max_residual", &FitResult::max_residual);

    m.def("cantor_set", &cantor_set, py::arg("lambda_"), py::arg("depth"));
    m.def("interval_set", &interval_set, py::arg("lo"), py::arg("hi"), py::arg("h"));
    m.def("singleton_set", &singleton_set, py::arg("x") = 0.0);
    m.def("product_embed", &product_embed, py::arg("base"), py::arg("ambient_dim"));
    m.def("covering_number", &covering_number, py::arg("set"), py::arg("delta"));
    m.def("minkowski_fit", &minkowski_fit, py::arg("set"), py::arg("delta_min"),
          py::arg("delta_max"), py::arg("num_scales"));
    m.def("set_sum", &set_sum);
    m.def("interval_cover_check", &interval_cover_check, py::arg("set"),
          py::arg("lo"), py::arg("hi"), py::arg("tolerance"));

    py::class_<SphereRule>(m, "SphereRule")
        .def_readonly("ambient_dim", &SphereRule::ambient_dim)
        .def_readonly("exact_degree", &SphereRule::exact_degree)
        .def("__len__", &SphereRule::count)
        .def("integrate", [](const SphereRule& r, const py::function& f) {
            return r.integrate([&](std::span<const double> y) {
                py::array_t<double> arr((py::ssize_t)y.size());
                std::copy(y.begin(), y.end(), arr.mutable_data());
                return f(arr).cast<double>();
            });
        });
    m.def("sphere_rule", &sphere_rule, py::arg("n"), py::arg("level"));
    m.def("unit_ball_volume", &unit_ball_volume);

    py::class_<GridFunction>(m, "GridFunction")
        .def_readonly("dim", &GridFunction::dim)
        .def_readonly("lo", &GridFunction::lo)
        .def_readonly("hi", &GridFunction::hi)
        .def_readonly("n", &GridFunction::n)
        .def_property_readonly("values", &grid_values)
        .def("spacing", &GridFunction::spacing);

    m.def("grid_from_array", &grid_from_array, py::arg("values"), py::arg("lo"),
          py::arg("hi"));
    m.def("lp_norm", &lp_norm, py::arg("g"), py::arg("p"));
    m.def(
        "lorentz_norm",
        [](const GridFunction& g, double p, double r) {
            return lorentz_norm(g, {p, r});
        },
        py::arg("g"), py::arg("p"), py::arg("r"));
    m.def("hl_maximal", &hl_maximal);
    m.def(
        "eval_interp",
        [](const GridFunction& g, std::vector<double> x) {
            return eval_interp(g, x);
        },
        py::arg("g"), py::arg("x"));

    m.def(
        "spherical_average",
        [](const GridFunction& f, double t, std::vector<double> u, int level) {
            const SphereRule rule = sphere_rule(f.dim, level);
            return spherical_average(f, t, u, rule);
        },
        py::arg("f"), py::arg("t"), py::arg("u"), py::arg("level") = 1);
    m.def(
        "maximal_over_set",
        [](const GridFunction& f, const CompactSet& T, double t, int level) {
            const SphereRule rule = sphere_rule(f.dim, level);
            return maximal_over_set(f, T, t, rule).value_grid;
        },
        py::arg("f"), py::arg("T"), py::arg("t") = 1.0, py::arg("level") = 1);

    m.def("phi_hat", &phi_hat, py::arg("xi_abs"), py::arg("transition") = 2);
    m.def(
        "band_values",
        [](int J, int transition, double xi) {
            std::vector<double> out;
            for (const auto& b : build_partition(J, transition))
                out.push_back(b.evaluate(xi));
            return out;
        },
        py::arg("J"), py::arg("transition"), py::arg("xi"));
    m.def(
        "band_project",
        [](const GridFunction& g, int j, int J, int transition) {
            const auto bands = build_partition(J, transition);
            return band_project(g, bands.at(j));
        },
        py::arg("g"), py::arg("j"), py::arg("J") = 8, py::arg("transition") = 2);
    m.def("sigma_hat", &sigma_hat, py::arg("d"), py::arg("xi_abs"));
    m.def(
        "annulus_hat",
        [](double delta, int d, double xi) { return annulus_hat(delta, d, xi); },
        py::arg("delta"), py::arg("d"), py::arg("xi_abs"));

    m.def(
        "region_vertices",
        [](int d, const std::string& s) {
            const RegionVertices rv = region_vertices(d, Frac::parse(s));
            py::dict out;
            auto point = [](const FracPoint& p) {
                return py::make_tuple(p.x.str(), p.y.str());
            };
            out["H"] = point(rv.H);
            out["E"] = point(rv.E);
            out["P"] = point(rv.P);
            if (rv.Q) out["Q"] = point(*rv.Q);
            if (rv.R) out["R"] = point(*rv.R);
            return out;
        },
        py::arg("d"), py::arg("s"));
    m.def(
        "strong_type_member",
        [](int d, const std::string& s, const std::string& px, const std::string& py_) {
            const RegionVertices rv = region_vertices(d, Frac::parse(s));
            return strong_type_member(rv, {Frac::parse(px), Frac::parse(py_)});
        },
        py::arg("d"), py::arg("s"), py::arg("inv_p"), py::arg("inv_q"));

    m.def(
        "exponent_fit",
        [](std::vector<std::pair<double, double>> pts) { return exponent_fit(pts); },
        py::arg("points"));

    m.def(
        "run_experiment",
        [](const std::string& name, const std::map<std::string, std::string>& params,
           const std::string& out_dir, std::uint64_t seed) {
            ExperimentConfig cfg;
            cfg.experiment = name;
            cfg.params = params;
            cfg.output_dir = out_dir;
            cfg.seed = seed;
            const auto res = run_experiment(cfg);
            py::dict out;
            out["scalars"] = res.scalars;
            out["files"] = res.files;
            py::dict fits;
            for (const auto& [k, v] : res.fits) fits[k.c_str()] = v;
            out["fits"] = fits;
            return out;
        },
        py::arg("name"), py::arg("params"), py::arg("out_dir"), py::arg("seed") = 1);

    m.attr("__version__") = SPHERELAB_VERSION;
}
