#pragma once

#include <utility>
#include <vector>

namespace spherelab {

// Least-squares slope/intercept in log-log coordinates. Every power-law
// claim in the experiment suite is reported through one of these.
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    std::vector<std::pair<double, double>> points; // (log x, log y)
};

// Ordinary least squares on (log x, log y). Requires at least 3 points with
// positive coordinates and distinct abscissae.
FitResult exponent_fit(const std::vector<std::pair<double, double>>& points);

} // namespace spherelab
