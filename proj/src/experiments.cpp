#include "spherelab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "spherelab/fields.hpp"
#include "spherelab/geom2d.hpp"
#include "spherelab/geomsets.hpp"
#include "spherelab/io.hpp"
#include "spherelab/operators.hpp"
#include "spherelab/quadrature.hpp"
#include "spherelab/region.hpp"
#include "spherelab/spectral.hpp"

namespace spherelab {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- parameters

struct Params {
    const std::map<std::string, std::string>& kv;

    std::string str(const std::string& key, const std::string& def) const {
        auto it = kv.find(key);
        return it == kv.end() ? def : it->second;
    }
    double real(const std::string& key, double def) const {
        auto it = kv.find(key);
        return it == kv.end() ? def : std::stod(it->second);
    }
    int integer(const std::string& key, int def) const {
        auto it = kv.find(key);
        return it == kv.end() ? def : std::stoi(it->second);
    }
    std::vector<double> list(const std::string& key, const std::string& def) const {
        std::vector<double> out;
        std::stringstream ss(str(key, def));
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(std::stod(item));
        return out;
    }
};

void validate_keys(const ExperimentConfig& cfg, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : cfg.params)
        if (!allowed.count(key))
            throw std::invalid_argument("experiment " + cfg.experiment +
                                        ": unknown config key '" + key + "'");
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return ((splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

double uniform(std::uint64_t& state, double lo, double hi) {
    return lo + (hi - lo) * uniform01(state);
}

// ---------------------------------------------------------------- csv writer

class Csv {
  public:
    explicit Csv(std::string header) { rows_.push_back(std::move(header)); }
    template <typename... T>
    void row(T... cells) {
        std::string line;
        append(line, cells...);
        rows_.push_back(std::move(line));
    }
    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("csv: cannot open " + path);
        for (const auto& r : rows_) out << r << "\n";
    }

  private:
    static void append_one(std::string& line, double v) { line += io::shortest(v); }
    static void append_one(std::string& line, int v) { line += std::to_string(v); }
    static void append_one(std::string& line, const std::string& v) { line += v; }
    static void append_one(std::string& line, const char* v) { line += v; }
    template <typename T0, typename... T>
    static void append(std::string& line, T0 first, T... rest) {
        append_one(line, first);
        if constexpr (sizeof...(rest) > 0) {
            line += ",";
            append(line, rest...);
        }
    }
    std::vector<std::string> rows_;
};

// ------------------------------------------------------------ random inputs

// Gaussian composed with a linear map: exp(-|A(x - b)|^2).
struct GaussianMap {
    int d = 2;
    double A[9] = {0};
    double b[3] = {0};

    static GaussianMap draw(int d, std::uint64_t& state) {
        GaussianMap g;
        g.d = d;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                g.A[i * d + j] = (i == j ? 1.0 : 0.0) + uniform(state, -0.25, 0.25);
        for (int i = 0; i < d; ++i) g.b[i] = uniform(state, -0.3, 0.3);
        return g;
    }
    double operator()(std::span<const double> x) const {
        double q = 0.0;
        for (int i = 0; i < d; ++i) {
            double row = 0.0;
            for (int j = 0; j < d; ++j) row += A[i * d + j] * (x[j] - b[j]);
            q += row * row;
        }
        return std::exp(-q);
    }
};

// Union of a few random axis-aligned rectangles; the indicator test family.
struct RectUnion {
    int d = 2;
    std::vector<std::array<double, 6>> boxes; // lo0,lo1,lo2,hi0,hi1,hi2

    static RectUnion draw(int d, std::uint64_t& state, double extent) {
        RectUnion r;
        r.d = d;
        const int count = 2 + (int)(splitmix64(state) % 3);
        for (int i = 0; i < count; ++i) {
            std::array<double, 6> box{};
            for (int ax = 0; ax < d; ++ax) {
                const double c = uniform(state, -extent, extent);
                const double w = uniform(state, 0.1, 0.5);
                box[ax] = c - w / 2;
                box[3 + ax] = c + w / 2;
            }
            r.boxes.push_back(box);
        }
        return r;
    }
    double operator()(std::span<const double> x) const {
        for (const auto& box : boxes) {
            bool in = true;
            for (int ax = 0; ax < d; ++ax)
                if (x[ax] < box[ax] || x[ax] > box[3 + ax]) in = false;
            if (in) return 1.0;
        }
        return 0.0;
    }
};

// -------------------------------------------------- slicing check machinery

double direct_tensor_mean(const SphereRule& rule, int d, const GaussianMap& f1,
                          const GaussianMap& f2, std::span<const double> shift) {
    double acc = 0.0;
    double y[3], z[3];
    for (std::size_t i = 0; i < rule.count(); ++i) {
        const auto node = rule.node(i);
        for (int ax = 0; ax < d; ++ax) {
            y[ax] = shift[ax] + node[ax];
            z[ax] = shift[ax] + node[d + ax];
        }
        acc += rule.weights[i] *
               f1({y, (std::size_t)d}) * f2({z, (std::size_t)d});
    }
    return acc;
}

double sliced_tensor_mean(const SlicingRule& slicing, const SphereRule& inner, int d,
                          const GaussianMap& f1, const GaussianMap& f2,
                          std::span<const double> shift) {
    double acc = 0.0;
    double y[3];
    if (d == 1) {
        for (const auto& nd : slicing.nodes) {
            y[0] = shift[0] + std::cos(nd.r);
            const double a = f1({y, 1});
            y[0] = shift[0] + std::sin(nd.r);
            acc += nd.weight * a * f2({y, 1});
        }
        return acc;
    }
    for (const auto& nd : slicing.nodes) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < inner.count(); ++i) {
            const auto om = inner.node(i);
            for (int ax = 0; ax < d; ++ax) y[ax] = shift[ax] + nd.r * om[ax];
            m1 += inner.weights[i] * f1({y, (std::size_t)d});
            for (int ax = 0; ax < d; ++ax) y[ax] = shift[ax] + nd.inner_scale * om[ax];
            m2 += inner.weights[i] * f2({y, (std::size_t)d});
        }
        acc += nd.weight * m1 * m2;
    }
    return acc;
}

// ------------------------------------------------------- nec tube evaluator

// Fast evaluation of A^T f for the layered witness: f is a sum of
// 4^((d-1)i) indicators of capsule neighborhoods of C2 on the e1-axis, so
// the spherical average is a weighted arc measure. Angular nodes are laid
// only on the arcs where the circle meets the widest layer; everything
// skipped is certified zero.
struct NecTubeEvaluator {
    struct Level {
        double rho = 0.0;
        double len = 0.0;
        std::vector<double> lefts;
        double weight = 0.0;
    };
    std::vector<Level> levels;
    std::vector<double> u_offsets;

    struct RowCache {
        struct Samples {
            std::vector<double> cos_theta;
            std::vector<double> halfwidth;
            std::vector<double> dtheta;
        };
        std::vector<Samples> per_level;
    };

    static std::vector<double> ifs_lefts(double lambda, int depth) {
        std::vector<double> lefts{0.0};
        for (int k = 0; k < depth; ++k) {
            std::vector<double> next;
            next.reserve(2 * lefts.size());
            for (double l : lefts) next.push_back(lambda * l);
            for (double l : lefts) next.push_back(lambda * l + (1.0 - lambda));
            lefts.swap(next);
        }
        std::sort(lefts.begin(), lefts.end());
        return lefts;
    }

    static NecTubeEvaluator build(double s, int N, double a, double u_resolution) {
        NecTubeEvaluator ev;
        const double lambda2 = std::pow(2.0, -1.0 / (1.0 - s));
        for (int i = 1; i <= N; ++i) {
            Level lv;
            lv.rho = a * std::pow(4.0, -i);
            int m = 1;
            while (std::pow(lambda2, m) > lv.rho / 8.0 && m < 26) ++m;
            lv.len = std::pow(lambda2, m);
            lv.lefts = ifs_lefts(lambda2, m);
            lv.weight = 4.0 * std::pow(4.0, i - 1); // 4^i for d = 2
            ev.levels.push_back(std::move(lv));
        }
        const double lambda1 = std::pow(2.0, -1.0 / s);
        int depth1 = 1;
        while (std::pow(lambda1, depth1) > u_resolution && depth1 < 26) ++depth1;
        CompactSet c1 = cantor_set(lambda1, depth1);
        ev.u_offsets = std::move(c1.points);
        return ev;
    }

    RowCache prepare_row(double x2) const {
        RowCache rc;
        rc.per_level.resize(levels.size());
        for (std::size_t li = 0; li < levels.size(); ++li) {
            const Level& lv = levels[li];
            const auto arcs = geom2d::circle_sin_band(x2, -lv.rho, lv.rho);
            auto& smp = rc.per_level[li];
            for (auto [alpha, beta] : arcs.intervals()) {
                const int m = std::clamp(
                    (int)std::ceil((beta - alpha) / (lv.rho / 4.0)), 8, 1024);
                const double dth = (beta - alpha) / m;
                for (int k = 0; k < m; ++k) {
                    const double th = alpha + (k + 0.5) * dth;
                    const double z2 = x2 + std::sin(th);
                    const double w2 = lv.rho * lv.rho - z2 * z2;
                    if (w2 <= 0.0) continue;
                    smp.cos_theta.push_back(std::cos(th));
                    smp.halfwidth.push_back(std::sqrt(w2));
                    smp.dtheta.push_back(dth);
                }
            }
        }
        return rc;
    }

    double value_at(const RowCache& rc, double x1, double* witness_u = nullptr) const {
        double best = 0.0;
        double best_u = u_offsets.empty() ? 0.0 : u_offsets.front();
        for (double u : u_offsets) {
            const double c1 = x1 + u;
            double total = 0.0;
            for (std::size_t li = 0; li < levels.size(); ++li) {
                const Level& lv = levels[li];
                const auto& smp = rc.per_level[li];
                double arc = 0.0;
                for (std::size_t k = 0; k < smp.cos_theta.size(); ++k) {
                    const double z1 = c1 + smp.cos_theta[k];
                    const double w = smp.halfwidth[k];
                    auto it = std::upper_bound(lv.lefts.begin(), lv.lefts.end(), z1);
                    bool in = false;
                    if (it != lv.lefts.begin())
                        in = z1 <= *(it - 1) + lv.len + w;
                    if (!in && it != lv.lefts.end())
                        in = *it - w <= z1;
                    if (in) arc += smp.dtheta[k];
                }
                total += lv.weight * arc / (2.0 * M_PI);
            }
            if (total > best) {
                best = total;
                best_u = u;
            }
        }
        if (witness_u) *witness_u = best_u;
        return best;
    }
};

// distance from x to the region [-1,1]e1 + S^1 (zero inside the fattened
// witness region).
double stadium_annulus_gap(double x1, double x2) {
    const double e = std::clamp(x1, -1.0, 1.0);
    const double r = std::hypot(x1 - e, x2);
    // radius reachable from the segment: nearest center is the clamp
    const double rmin = r;
    const double rmax = std::hypot(std::abs(x1) + 1.0, x2);
    if (rmin <= 1.0 && 1.0 <= rmax) return 0.0;
    return rmin > 1.0 ? rmin - 1.0 : 1.0 - rmax;
}

// ------------------------------------------------------------- experiments

using Runner = std::function<void(const ExperimentConfig&, const Params&,
                                  const std::string& dir, ExperimentResult&)>;

void run_covering_fit(const ExperimentConfig& cfg, const Params& p,
                      const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"set", "lambda", "depth", "h", "delta_min", "delta_max",
                        "num_scales", "plot"});
    const std::string kind = p.str("set", "cantor");
    CompactSet set;
    if (kind == "cantor")
        set = cantor_set(p.real("lambda", 0.25), p.integer("depth", 10));
    else if (kind == "interval")
        set = interval_set(0.0, 1.0, p.real("h", 1.0 / 1024.0));
    else if (kind == "singleton")
        set = singleton_set();
    else
        throw std::invalid_argument("covering_fit: unknown set kind " + kind);

    const double dmin = p.real("delta_min", std::max(set.resolution, 1.0 / 256.0));
    const double dmax = p.real("delta_max", 0.25);
    const int scales = p.integer("num_scales", 7);

    Csv csv("delta,count");
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < scales; ++i) {
        const double t = scales == 1 ? 0.0 : (double)i / (scales - 1);
        const double delta = dmax * std::pow(dmin / dmax, t);
        const auto cov = covering_number(set, delta);
        csv.row(delta, (int)cov.count);
        pts.emplace_back(1.0 / delta, (double)cov.count);
    }
    const FitResult fit = exponent_fit(pts);
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");

    Csv fitcsv("slope,intercept,max_residual");
    fitcsv.row(fit.slope, fit.intercept, fit.max_residual);
    fitcsv.write(dir + "/fit.csv");
    res.files.push_back("fit.csv");

    if (p.integer("plot", 0)) {
        io::write_loglog_svg(pts, fit.slope, fit.intercept, dir + "/plot.svg");
        res.files.push_back("plot.svg");
    }
    res.fits["covering"] = fit;
    res.scalars["slope"] = fit.slope;
    res.report.push_back("covering slope " + io::shortest(fit.slope) + " over " +
                         std::to_string(scales) + " scales");
}

void run_cantor_sum(const ExperimentConfig& cfg, const Params& p,
                    const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"lambda", "depth", "tolerance"});
    const double lambda = p.real("lambda", 1.0 / 3.0);
    const int depth = p.integer("depth", 8);
    const CompactSet c = cantor_set(lambda, depth);
    const CompactSet sum = set_sum(c, c);
    const double tol = p.real("tolerance", 2.0 * std::pow(lambda, depth));

    const bool covers = interval_cover_check(sum, 0.0, 2.0, tol);
    const auto sum_gaps = interval_gap_report(sum, 0.0, 2.0, tol);
    const bool set_covers = interval_cover_check(c, 0.0, 1.0, std::pow(lambda, depth));
    const auto set_gaps = interval_gap_report(c, 0.0, 1.0, std::pow(lambda, depth));

    Csv csv("check,covers,largest_gap,total_uncovered");
    csv.row("sum_on_[0,2]", covers ? 1 : 0, sum_gaps.largest_gap,
            sum_gaps.total_uncovered);
    csv.row("set_on_[0,1]", set_covers ? 1 : 0, set_gaps.largest_gap,
            set_gaps.total_uncovered);
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");

    res.scalars["sum_covers"] = covers ? 1.0 : 0.0;
    res.scalars["sum_largest_gap"] = sum_gaps.largest_gap;
    res.scalars["set_largest_gap"] = set_gaps.largest_gap;
    res.scalars["max_reported_gap"] =
        std::max(sum_gaps.largest_gap, set_gaps.largest_gap);
    res.report.push_back("lambda " + io::shortest(lambda) + ": sum covers [0,2] = " +
                         (covers ? "yes" : "no") + ", largest gap " +
                         io::shortest(res.scalars["max_reported_gap"]));
}

void run_slicing_check(const ExperimentConfig& cfg, const Params& p,
                       const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "num_pairs", "num_points", "level", "level_direct"});
    const int d = p.integer("d", 2);
    const int pairs = p.integer("num_pairs", 20);
    const int points = p.integer("num_points", 50);
    const SlicingRule slicing = slicing_weights(d, p.integer("level", 2));
    const SphereRule inner = sphere_rule(std::max(d, 2), p.integer("level", 2));
    const SphereRule direct = sphere_rule(2 * d, p.integer("level_direct", 1));

    std::uint64_t state = cfg.seed;
    Csv csv("pair,max_abs_diff");
    double worst = 0.0;
    for (int pr = 0; pr < pairs; ++pr) {
        const GaussianMap f1 = GaussianMap::draw(d, state);
        const GaussianMap f2 = GaussianMap::draw(d, state);
        double pair_worst = 0.0;
        for (int pt = 0; pt < points; ++pt) {
            double shift[3] = {0, 0, 0};
            for (int ax = 0; ax < d; ++ax) shift[ax] = uniform(state, -0.2, 0.2);
            const double a =
                direct_tensor_mean(direct, d, f1, f2, {shift, (std::size_t)d});
            const double b =
                sliced_tensor_mean(slicing, inner, d, f1, f2, {shift, (std::size_t)d});
            pair_worst = std::max(pair_worst, std::abs(a - b));
        }
        csv.row(pr, pair_worst);
        worst = std::max(worst, pair_worst);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");
    res.scalars["max_diff"] = worst;
    res.report.push_back("slicing vs direct (d=" + std::to_string(d) +
                         "): max |diff| = " + io::shortest(worst));
}

void run_kernel_decay(const ExperimentConfig& cfg, const Params& p,
                      const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "j_min", "j_max", "weight_power", "transition"});
    const int d = p.integer("d", 2);
    const int j_min = p.integer("j_min", 1);
    const int j_max = p.integer("j_max", 8);
    const double power = p.real("weight_power", 4.0);
    const int transition = p.integer("transition", 4);

    Csv csv("j,c_j,peak_over_2j");
    double cmax = 0.0, cmin = 1e300;
    std::vector<std::pair<double, double>> peak_pts;
    for (int j = j_min; j <= j_max; ++j) {
        std::vector<double> grid;
        for (double r = 0.0; r <= 4.0; r += 0.005) grid.push_back(r);
        const double fine = std::ldexp(1.0, -j) / 8.0;
        for (int m = -768; m <= 768; ++m) {
            const double r = 1.0 + m * fine;
            if (r > 0.0) grid.push_back(r);
        }
        const RadialProfile prof = kernel_psi_sigma(j, d, grid, transition);
        const double twoj = std::ldexp(1.0, j);
        double cj = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double w = std::pow(1.0 + twoj * std::abs(grid[i] - 1.0), power);
            cj = std::max(cj, std::abs(prof.value[i]) * w / twoj);
            peak = std::max(peak, std::abs(prof.value[i]) / twoj);
        }
        csv.row(j, cj, peak);
        cmax = std::max(cmax, cj);
        cmin = std::min(cmin, cj);
        if (j >= j_min + 2) {
            res.scalars["c_max_tail"] = std::max(
                res.scalars.count("c_max_tail") ? res.scalars["c_max_tail"] : 0.0, cj);
            res.scalars["c_min_tail"] = std::min(
                res.scalars.count("c_min_tail") ? res.scalars["c_min_tail"] : 1e300,
                cj);
        }
        peak_pts.emplace_back(twoj, peak * twoj);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");
    res.scalars["c_max"] = cmax;
    res.scalars["c_ratio"] = cmax / cmin;
    if (res.scalars.count("c_max_tail"))
        res.scalars["c_ratio_tail"] =
            res.scalars["c_max_tail"] / res.scalars["c_min_tail"];
    const FitResult peak_fit = exponent_fit(peak_pts);
    res.fits["peak"] = peak_fit;
    res.scalars["peak_slope"] = peak_fit.slope;
    res.report.push_back("kernel decay: C in [" + io::shortest(cmin) + ", " +
                         io::shortest(cmax) + "], peak slope " +
                         io::shortest(peak_fit.slope));
}

void run_annulus_decay(const ExperimentConfig& cfg, const Params& p,
                       const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "delta_list", "eps", "xi_max", "dft_check", "dft_n",
                        "dft_delta", "dft_xi_max"});
    const int d = p.integer("d", 2);
    const auto deltas = p.list("delta_list", "0.1,0.05,0.025");
    const double eps = p.real("eps", 0.1);
    const double xi_max = p.real("xi_max", 64.0);
    const SpectralGolden golden = default_golden();

    Csv csv("delta,sup_functional");
    double sup_all = 0.0;
    for (double delta : deltas) {
        const double vol = unit_ball_volume(d) * (std::pow(1.0 + delta, d) -
                                                  std::pow(1.0 - delta, d));
        double sup = 0.0;
        for (double xi = 1.0; xi <= xi_max; xi += 0.01) {
            const double v = std::abs(annulus_hat(delta, d, xi, golden)) / vol;
            sup = std::max(sup, v * std::pow(1.0 + xi, (d - 1) / 2.0 + eps) *
                                    std::pow(delta, eps));
        }
        csv.row(delta, sup);
        sup_all = std::max(sup_all, sup);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");
    res.scalars["sup_functional"] = sup_all;

    if (p.integer("dft_check", 1)) {
        const double delta = p.real("dft_delta", 0.1);
        const int n = p.integer("dft_n", 2048);
        const double xi_lim = p.real("dft_xi_max", 8.0);
        res.scalars["dft_max_rel_err"] =
            annulus_dft_max_rel_err(d, delta, n, xi_lim, golden);
        res.report.push_back("closed form vs DFT rel err = " +
                             io::shortest(res.scalars["dft_max_rel_err"]));
    }
    res.report.push_back("decay functional sup = " + io::shortest(sup_all));
}

void run_nec_blowup(const ExperimentConfig& cfg, const Params& p,
                    const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "s", "N_list", "a", "r", "out_n", "out_half",
                        "region_width", "calib_frac"});
    const int d = p.integer("d", 2);
    if (d != 2) throw std::invalid_argument("nec_blowup: only d = 2 is implemented");
    const double s = p.real("s", 0.5);
    const auto Ns = p.list("N_list", "2,3,4,5");
    const double a = p.real("a", 1.0);
    const std::string rstr = p.str("r", "inf");
    const double r = rstr == "inf" ? std::numeric_limits<double>::infinity()
                                   : std::stod(rstr);
    const int out_n = p.integer("out_n", 1024);
    const double half = p.real("out_half", 2.2);
    const double region_w = p.real("region_width", 0.1);
    const double calib_frac = p.real("calib_frac", 0.5);
    const double pexp = 1.0 + s / (d - 1);

    // designated-region cell mask on the output grid; row-major in x2 so the
    // per-row angular caches are reused across the row
    const double h = 2.0 * half / out_n;
    std::vector<std::pair<double, double>> cells; // (x2, x1)
    for (int j = 0; j < out_n; ++j)
        for (int i = 0; i < out_n; ++i) {
            const double x1 = -half + (i + 0.5) * h;
            const double x2 = -half + (j + 0.5) * h;
            if (stadium_annulus_gap(x1, x2) <= region_w) cells.emplace_back(x2, x1);
        }

    auto sweep = [&](int N, double& min_over_region, std::vector<double>& vals) {
        const NecTubeEvaluator ev =
            NecTubeEvaluator::build(s, N, a, a * std::pow(4.0, -N) / 4.0);
        vals.clear();
        vals.reserve(cells.size());
        min_over_region = 1e300;
        double last_x2 = 1e300;
        NecTubeEvaluator::RowCache rc;
        for (const auto& [x2, x1] : cells) {
            if (x2 != last_x2) {
                rc = ev.prepare_row(x2);
                last_x2 = x2;
            }
            const double v = ev.value_at(rc, x1);
            vals.push_back(v);
            min_over_region = std::min(min_over_region, v);
        }
    };

    // calibration at the smallest N
    std::vector<double> vals;
    double min_region = 0.0;
    const int N0 = (int)Ns.front();
    sweep(N0, min_region, vals);
    if (!(min_region > 0.0))
        throw std::runtime_error("nec_blowup: calibration failure (flat witness)");
    const double c = calib_frac * min_region / N0;

    Csv csv("N,m,lorentz_norm,ratio");
    std::vector<std::pair<double, double>> pts;
    for (double Nd : Ns) {
        const int N = (int)Nd;
        if (N != N0) sweep(N, min_region, vals);
        double m = 0.0;
        for (double v : vals)
            if (v >= c * N) m += h * h;
        const NecWitness wit = nec_counterexample(d, s, N, a);
        const double ell = lorentz_norm(wit.f, {pexp, r});
        const double ratio = m * std::pow(N / ell, pexp);
        csv.row(N, m, ell, ratio);
        pts.emplace_back((double)N, ratio);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");

    const FitResult fit = exponent_fit(pts);
    res.fits["blowup"] = fit;
    res.scalars["slope"] = fit.slope;
    res.scalars["expected_slope"] =
        std::isinf(r) ? pexp : pexp * (1.0 - 1.0 / r);
    res.scalars["calibration_c"] = c;
    res.report.push_back("nec blow-up r=" + rstr + ": slope " +
                         io::shortest(fit.slope) + " (stated target " +
                         io::shortest(res.scalars["expected_slope"]) + ")");
}

void run_sharpness_E(const ExperimentConfig& cfg, const Params& p,
                     const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "s", "depth", "inv_p", "inv_q", "delta_list", "grid_n",
                        "grid_half"});
    const int d = p.integer("d", 2);
    if (d != 2) throw std::invalid_argument("sharpness_E: only d = 2 is implemented");
    const double s = p.real("s", 0.5);
    const double inv_p = p.real("inv_p", 0.6);
    const double inv_q = p.real("inv_q", 0.4);
    const auto deltas = p.list("delta_list", "0.28,0.2,0.14,0.1,0.07");
    const int n = p.integer("grid_n", 384);
    const double half = p.real("grid_half", 2.3);
    const double hh = 2.0 * half / n;
    for (double delta : deltas)
        if (delta < 4.0 * hh)
            throw std::invalid_argument("sharpness_E: delta below grid resolution");
    {
        std::set<double> uniq(deltas.begin(), deltas.end());
        if (uniq.size() != deltas.size() || deltas.size() < 3)
            throw std::invalid_argument("sharpness_E: degenerate abscissa");
    }

    const double lambda = std::pow(2.0, -1.0 / s);
    const CompactSet c = cantor_set(lambda, p.integer("depth", 8));

    Csv csv("delta,ratio");
    std::vector<std::pair<double, double>> pts;
    for (double delta : deltas) {
        // cover of T at the scale the sup needs (quarter of the ball radius)
        const auto cov = covering_number(c, std::max(c.resolution, delta / 4.0));
        double qsum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double x1 = -half + (i + 0.5) * hh;
                const double x2 = -half + (j + 0.5) * hh;
                double best = 0.0;
                for (double uc : cov.centers) {
                    const auto arcs =
                        geom2d::circle_ball_arcs(x1, x2 + uc, 0.0, 0.0, delta);
                    best = std::max(best, arcs.measure() / (2.0 * M_PI));
                }
                if (best > 0.0) qsum += std::pow(best, 1.0 / inv_q);
            }
        const double qnorm = std::pow(qsum * hh * hh, inv_q);
        const double pnorm = std::pow(M_PI * delta * delta, inv_p);
        csv.row(delta, qnorm / pnorm);
        pts.emplace_back(1.0 / delta, qnorm / pnorm);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");

    const FitResult fit = exponent_fit(pts);
    res.fits["sharpness"] = fit;
    res.scalars["slope"] = fit.slope;
    res.scalars["blowup_margin"] =
        d / ((d - 1.0)) * inv_p - (1.0 - s) / (d - 1.0) * inv_q - 1.0;
    res.report.push_back("sharpness at E: slope " + io::shortest(fit.slope) +
                         ", predicted margin " +
                         io::shortest(res.scalars["blowup_margin"]));
}

void run_nikodym_witness(const ExperimentConfig& cfg, const Params& p,
                         const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "p", "delta_list", "k_min", "k_max", "radii_n", "r_max"});
    const int d = p.integer("d", 2);
    if (d != 2)
        throw std::invalid_argument("nikodym_witness: only d = 2 is implemented");
    const double pexp = p.real("p", 2.0);
    const auto deltas = p.list("delta_list", "0.1,0.05,0.025");
    if (deltas.size() < 2)
        throw std::invalid_argument("nikodym_witness: need >= 2 deltas for a fit");
    const int k_min = p.integer("k_min", -2), k_max = p.integer("k_max", 2);
    const int nr = p.integer("radii_n", 512);
    const double r_max = p.real("r_max", 3.5);

    Csv csv("delta,ratio");
    std::vector<std::pair<double, double>> pts;
    for (double delta : deltas) {
        const double vol = M_PI * (std::pow(1 + delta, 2) - std::pow(1 - delta, 2));
        const int ucount = (int)std::ceil(2.0 * M_PI / (delta / 2.0));
        const double dr = r_max / nr;
        double psum = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double rad = (i + 0.5) * dr;
            double best = 0.0;
            for (int k = k_min; k <= k_max; ++k) {
                const double t = std::ldexp(1.0, k);
                for (int ui = 0; ui < ucount; ++ui) {
                    const double phi = 2.0 * M_PI * ui / ucount;
                    const double dist =
                        std::hypot(rad + t * std::cos(phi), t * std::sin(phi));
                    const double ov = geom2d::annulus_overlap_area(
                        dist, t * (1 - delta), t * (1 + delta), 1 - 2 * delta,
                        1 + 2 * delta);
                    best = std::max(best, ov / (t * t * vol));
                }
            }
            psum += std::pow(best, pexp) * 2.0 * M_PI * rad * dr;
        }
        const double out_norm = std::pow(psum, 1.0 / pexp);
        const double f_norm = std::pow(2.0 * vol, 1.0 / pexp); // |S^{2 delta}| = 2 vol
        csv.row(delta, out_norm / f_norm);
        pts.emplace_back(1.0 / delta, out_norm / f_norm);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");
    const FitResult fit = exponent_fit(pts);
    res.fits["witness"] = fit;
    res.scalars["slope"] = fit.slope;
    res.report.push_back("linear nikodym witness p=" + io::shortest(pexp) +
                         ": slope " + io::shortest(fit.slope));
}

void run_bilinear_nikodym_witness(const ExperimentConfig& cfg, const Params& p,
                                  const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "delta_list", "rho_factor", "radii_n", "r_max"});
    const int d = p.integer("d", 2);
    if (d != 2)
        throw std::invalid_argument("bilinear_nikodym_witness: only d = 2");
    const auto deltas = p.list("delta_list", "0.1,0.05,0.025");
    const double rho_factor = p.real("rho_factor", 1.0);
    const int nr = p.integer("radii_n", 256);
    const double r_max = p.real("r_max", 2.4);

    std::vector<double> gx, gw;
    gauss_legendre(32, gx, gw);

    Csv csv("delta,l_half_norm,ratio");
    std::vector<std::pair<double, double>> pts;
    for (double delta : deltas) {
        const double rho = rho_factor * delta;
        const double vol4 = unit_ball_volume(4) *
                            (std::pow(1 + delta, 4) - std::pow(1 - delta, 4));
        const double norm1 = M_PI / 4.0; // ||(2 rho)^-2 chi_B(rho)||_1
        const double fudge = std::sqrt(2.0) * rho;

        // I(a1, a2) = |S^delta cap (B(b1,rho) x B(b2,rho))| for |b1| = a1,
        // |b2| = a2, via radial slicing of the y-ball.
        auto overlap = [&](double a1, double a2) {
            const double tlo = std::max(0.0, a1 - rho), thi = a1 + rho;
            double acc = 0.0;
            for (std::size_t q = 0; q < gx.size(); ++q) {
                const double t = 0.5 * (tlo + thi) + 0.5 * (thi - tlo) * gx[q];
                if (t <= 0.0) continue;
                double ang = M_PI;
                if (a1 > 1e-12) {
                    const double co =
                        (t * t + a1 * a1 - rho * rho) / (2.0 * t * a1);
                    if (co >= 1.0) continue;
                    ang = std::acos(std::max(co, -1.0));
                }
                const double rp2 = (1 + delta) * (1 + delta) - t * t;
                if (rp2 <= 0.0) continue;
                const double rm2 = (1 - delta) * (1 - delta) - t * t;
                const double band = geom2d::ball_radial_band_area(
                    a2, rho, rm2 > 0.0 ? std::sqrt(rm2) : 0.0, std::sqrt(rp2));
                acc += 0.5 * (thi - tlo) * gw[q] * 2.0 * t * ang * band;
            }
            return acc;
        };

        // the average depends on the angles only through |x+u|, |x+v|, so a
        // half-circle sweep at node spacing delta/2 realizes the sup
        const int half_nodes = std::max(8, (int)std::ceil(M_PI / (delta / 2.0)));
        const double dphi = M_PI / half_nodes;
        const double dr = r_max / nr;
        double hsum = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double rad = (i + 0.5) * dr;
            double best = 0.0;
            for (int ui = 0; ui <= half_nodes; ++ui) {
                const double phu = ui * dphi;
                const double a1 = std::hypot(rad + std::cos(phu), std::sin(phu));
                const double lo2 = std::pow(std::max(0.0, 1 - delta - fudge), 2) -
                                   a1 * a1;
                const double hi2 = std::pow(1 + delta + fudge, 2) - a1 * a1;
                if (hi2 <= 0.0) continue;
                // admissible |x + v| band; enumerate only v-angles inside it
                const double a2min2 = std::max(lo2, 0.0);
                const double clo =
                    std::clamp((a2min2 - rad * rad - 1.0) / (2.0 * rad), -1.0, 1.0);
                const double chi =
                    std::clamp((hi2 - rad * rad - 1.0) / (2.0 * rad), -1.0, 1.0);
                if (clo > chi) continue;
                const int vlo = (int)std::floor(std::acos(chi) / dphi);
                const int vhi = (int)std::ceil(std::acos(clo) / dphi);
                for (int vi = vlo; vi <= std::min(vhi, half_nodes); ++vi) {
                    const double phv = vi * dphi;
                    const double a2 = std::hypot(rad + std::cos(phv), std::sin(phv));
                    const double val =
                        overlap(a1, a2) / (vol4 * std::pow(2.0 * rho, 4));
                    best = std::max(best, val);
                }
            }
            hsum += std::sqrt(best) * 2.0 * M_PI * rad * dr;
        }
        const double l_half = hsum * hsum;
        const double ratio = l_half / (norm1 * norm1);
        csv.row(delta, l_half, ratio);
        pts.emplace_back(1.0 / delta, ratio);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");
    const FitResult fit = exponent_fit(pts);
    res.fits["witness"] = fit;
    res.scalars["slope"] = fit.slope;
    res.report.push_back("bilinear nikodym witness: slope " +
                         io::shortest(fit.slope) + " vs target 1");
}

void run_domination_check(const ExperimentConfig& cfg, const Params& p,
                          const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "num_pairs", "grid_n", "grid_half", "delta", "p",
                        "sample_points"});
    const int d = p.integer("d", 2);
    if (d != 2)
        throw std::invalid_argument("domination_check: only d = 2 is implemented");
    const int pairs = p.integer("num_pairs", 10);
    const int n = p.integer("grid_n", 24);
    const double half = p.real("grid_half", 1.5);
    const double delta = p.real("delta", 0.25);
    const double pexp = p.real("p", 2.0);

    std::uint64_t state = cfg.seed;
    const CompactSet c1 = cantor_set(1.0 / 3.0, 3);
    CompactSet T;
    T.dim = 2;
    T.resolution = c1.resolution;
    T.label = "cantor(1/3,3) x {0}";
    T.points.assign(c1.count() * 2, 0.0);
    for (std::size_t i = 0; i < c1.count(); ++i) T.points[2 * i] = c1.points[i];

    const SlicingRule slicing = slicing_weights(2, 1);
    const SphereRule inner = sphere_rule(2, 1);
    const LacunaryRange range{-3, -1};
    const double umax = 1.0;
    const double C_bilin = 4.0 * std::pow(1.0 + umax, 2) * hl_comparability_factor(2);

    const AnnulusRule ann4 = annulus_rule(4, delta, 1);
    const SphereRule u_rule = circle_rule((std::size_t)std::ceil(2.0 * M_PI / delta) + 8);
    const double pp = pexp / (pexp - 1.0);
    const OutputGrid probe{2, -0.5, 0.5};
    const int holder_pairs = std::min(pairs, 3);

    Csv csv("pair,bilinear_max_ratio,holder_max_excess");
    double worst_bilin = 0.0, worst_holder = 0.0;
    for (int pr = 0; pr < pairs; ++pr) {
        const RectUnion r1 = RectUnion::draw(2, state, 0.9);
        const RectUnion r2 = RectUnion::draw(2, state, 0.9);
        const GridFunction f1 =
            sample([&](std::span<const double> x) { return r1(x); }, 2, -half, half, n);
        const GridFunction f2 =
            sample([&](std::span<const double> x) { return r2(x); }, 2, -half, half, n);

        // (a) bilinear lacunary vs the HL product bound
        const OperatorOutput op =
            bilinear_lacunary_maximal(f1, f2, T, range, slicing, inner);
        const GridFunction m1 = hl_maximal(f1), m2 = hl_maximal(f2);
        const double inf1 = lp_norm(f1, std::numeric_limits<double>::infinity());
        const double inf2 = lp_norm(f2, std::numeric_limits<double>::infinity());
        double ratio = 0.0;
        for (std::size_t cidx = 0; cidx < op.value_grid.cell_count(); ++cidx) {
            const double bound =
                C_bilin * std::min(inf1 * m2.values[cidx], inf2 * m1.values[cidx]);
            if (op.value_grid.values[cidx] > 1e-14)
                ratio = std::max(ratio, op.value_grid.values[cidx] / bound);
        }
        worst_bilin = std::max(worst_bilin, ratio);

        // (b) exact discrete Holder domination on shared nodes
        double excess = 0.0;
        if (pr < holder_pairs) {
            const OperatorOutput bn = bilinear_nikodym(f1, f2, ann4, u_rule, u_rule,
                                                       std::uint64_t(1) << 34, probe);
            const GridFunction np1 =
                annulus_power_mean(f1, ann4, u_rule, pexp, 0, probe);
            const GridFunction np2 =
                annulus_power_mean(f2, ann4, u_rule, pp, 1, probe);
            for (std::size_t cidx = 0; cidx < bn.value_grid.cell_count(); ++cidx) {
                const double lhs = bn.value_grid.values[cidx];
                const double rhs = np1.values[cidx] * np2.values[cidx];
                excess = std::max(excess, lhs - rhs * (1.0 + 1e-12));
            }
            worst_holder = std::max(worst_holder, excess);
        }
        csv.row(pr, ratio, excess);
    }
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");
    res.scalars["bilinear_max_ratio"] = worst_bilin;
    res.scalars["bilinear_C"] = C_bilin;
    res.scalars["holder_max_excess"] = worst_holder;
    res.report.push_back("dominations: bilinear max ratio " +
                         io::shortest(worst_bilin) + " (C = " +
                         io::shortest(C_bilin) + "), Holder excess " +
                         io::shortest(worst_holder));
}

void run_region_table(const ExperimentConfig& cfg, const Params& p,
                      const std::string& dir, ExperimentResult& res) {
    validate_keys(cfg, {"d", "s"});
    const int d = p.integer("d", 2);
    const Frac s = Frac::parse(p.str("s", "1/2"));
    const RegionVertices rv = region_vertices(d, s);

    Csv csv("vertex,x,y");
    csv.row("H", rv.H.x.str(), rv.H.y.str());
    csv.row("E", rv.E.x.str(), rv.E.y.str());
    csv.row("P", rv.P.x.str(), rv.P.y.str());
    if (rv.Q) csv.row("Q", rv.Q->x.str(), rv.Q->y.str());
    if (rv.R) csv.row("R", rv.R->x.str(), rv.R->y.str());
    csv.write(dir + "/results.csv");
    res.files.push_back("results.csv");

    res.scalars["H_x"] = rv.H.x.to_double();
    res.scalars["E_x"] = rv.E.x.to_double();
    res.scalars["E_y"] = rv.E.y.to_double();
    res.scalars["P_x"] = rv.P.x.to_double();
    res.report.push_back("region vertices d=" + std::to_string(d) + " s=" + s.str() +
                         ": H=(" + rv.H.x.str() + "," + rv.H.y.str() + ") E=(" +
                         rv.E.x.str() + "," + rv.E.y.str() + ")");
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "covering_fit",    "cantor_sum",       "slicing_check",
        "kernel_decay",    "annulus_decay",    "nec_blowup",
        "sharpness_E",     "nikodym_witness",  "bilinear_nikodym_witness",
        "domination_check", "region_table"};
    return names;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    static const std::map<std::string, Runner> runners = {
        {"covering_fit", run_covering_fit},
        {"cantor_sum", run_cantor_sum},
        {"slicing_check", run_slicing_check},
        {"kernel_decay", run_kernel_decay},
        {"annulus_decay", run_annulus_decay},
        {"nec_blowup", run_nec_blowup},
        {"sharpness_E", run_sharpness_E},
        {"nikodym_witness", run_nikodym_witness},
        {"bilinear_nikodym_witness", run_bilinear_nikodym_witness},
        {"domination_check", run_domination_check},
        {"region_table", run_region_table}};
    const auto it = runners.find(cfg.experiment);
    if (it == runners.end())
        throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");

    fs::create_directories(cfg.output_dir);
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult res;
    it->second(cfg, Params{cfg.params}, cfg.output_dir, res);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();

    std::ofstream man(cfg.output_dir + "/manifest.txt");
    if (!man) throw std::runtime_error("cannot write manifest");
    man << "experiment = " << cfg.experiment << "\n";
    man << "version = " << SPHERELAB_VERSION << "\n";
    man << "seed = " << cfg.seed << "\n";
    man << "budget_cells = " << cfg.budget_cells << "\n";
    for (const auto& [k, v] : cfg.params) man << "param " << k << " = " << v << "\n";
    man << "wallclock_ms = " << ms << "\n";
    for (const auto& f : res.files) {
        const std::string path = cfg.output_dir + "/" + f;
        man << "file " << f << " sha256=" << io::sha256_file(path)
            << " bytes=" << fs::file_size(path) << "\n";
    }
    return res;
}

} // namespace spherelab
