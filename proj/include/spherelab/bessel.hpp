#pragma once

namespace spherelab {

// Bessel function of the first kind J_nu for the orders this project needs:
// integers 0..3 and half-integers 1/2, 3/2, 5/2 (profiles of surface and
// annulus measures in ambient dimension up to 8).
//
// Evaluation scheme: ascending power series (long double accumulation) below
// the crossover, Hankel asymptotic expansion above it; half-integer orders
// switch to their trigonometric closed forms above the crossover. The
// crossover (16.0) balances series cancellation against the asymptotic
// truncation floor; both branches stay below 1e-10 absolute error for
// arguments up to 1e3 and beyond.
double bessel_j(double nu, double x);

// Crossover between the series and asymptotic branches, exposed for the
// golden-parameter file and its regression test.
double bessel_j_crossover();

} // namespace spherelab
