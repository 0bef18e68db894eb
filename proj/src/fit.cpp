#include "spherelab/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace spherelab {

FitResult exponent_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("exponent_fit: need at least 3 points");

    FitResult out;
    out.points.reserve(points.size());
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::invalid_argument("exponent_fit: nonpositive value in input");
        out.points.emplace_back(std::log(x), std::log(y));
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = (double)out.points.size();
    for (const auto& [lx, ly] : out.points) {
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-12 * (n * sxx + sx * sx + 1e-300))
        throw std::invalid_argument("exponent_fit: degenerate abscissae");

    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    for (const auto& [lx, ly] : out.points)
        out.max_residual = std::max(out.max_residual,
                                    std::abs(ly - out.slope * lx - out.intercept));
    return out;
}

} // namespace spherelab
