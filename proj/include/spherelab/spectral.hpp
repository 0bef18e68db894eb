#pragma once

#include <string>
#include <vector>

#include "spherelab/fields.hpp"

namespace spherelab {

// One Littlewood-Paley band. j = 0 is the low-pass profile phi_hat (radial,
// 1 on B(0,1), supported in B(0,2)); j >= 1 is the dilation difference
// phi_hat(2^-j xi) - phi_hat(2^-j+1 xi), supported in 2^(j-1) <= |xi| <= 2^(j+1).
// `transition` selects the smoothstep order of the phi_hat falloff in
// log2|xi|: k -> polynomial of degree 2k+1 with C^k endpoint matching.
struct DyadicBand {
    int j = 0;
    int transition = 2;
    double support_lo = 0.0, support_hi = 2.0;

    double evaluate(double xi_abs) const;
};

// Radial low-pass profile: 1 for |xi| <= 1, 0 for |xi| >= 2, smoothstep of
// the given order in log2|xi| in between.
double phi_hat(double xi_abs, int transition = 2);

// Bands j = 0 (low-pass) .. J; the telescoping identity
// phi_hat(xi) + sum_{j=1..J} psi_hat_j(xi) = phi_hat(2^-J xi) holds exactly.
std::vector<DyadicBand> build_partition(int J, int transition = 2);

enum class Convention { two_pi, plain };

struct RadialProfile {
    std::vector<double> r;
    std::vector<double> value;
    Convention convention = Convention::two_pi;
};

// Elementwise combination; throws if the convention tags differ.
RadialProfile combine(const RadialProfile& a, const RadialProfile& b,
                      double (*op)(double, double));

// Frozen spectral constants (Fourier convention factors and the Bessel
// branch crossover), kept in data/spectral_golden.txt.
struct SpectralGolden {
    double kappa_d2 = 1.0;
    double kappa_d3 = 1.0;
    double kappa_d4 = 1.0;
    double bessel_crossover = 16.0;

    double kappa(int d) const;
};
SpectralGolden default_golden();
SpectralGolden load_golden(const std::string& path);

// Fourier transform (e^{-2 pi i x.xi} convention) of the indicator of the
// shell 1-delta < |y| < 1+delta, evaluated through the Bessel difference
// closed form scaled by the calibrated kappa(d). xi_abs must be positive;
// the value at 0 is the shell volume.
double annulus_hat(double delta, int d, double xi_abs,
                   const SpectralGolden& golden = default_golden());

// Single-frequency lattice transform of the sampled shell indicator divided
// by the unscaled closed form: the calibration that produces kappa(d).
double kappa_calibrate(int d, double delta, int n_per_axis, double xi_ref);

// Max over the FFT frequency lattice (|xi| <= xi_lim) of
// |closed form - discrete transform| / |S^delta(0)| for the sampled shell
// indicator on an n^d grid; d = 2 only (the oracle grid for criterion runs).
double annulus_dft_max_rel_err(int d, double delta, int n, double xi_lim,
                               const SpectralGolden& golden = default_golden());

// Radial profile of the Fourier transform of the normalized surface measure
// on S^(d-1) (two_pi convention); sigma_hat(d, 0) = 1.
double sigma_hat(int d, double xi_abs);

// Discrete-Fourier band projection R_j g (or the low-pass P g for j = 0).
// Requires the grid content to be negligible at the boundary.
GridFunction band_project(const GridFunction& g, const DyadicBand& band);

// Radial profile of psi_{2^-j} * sigma computed by numeric inversion of
// psi_hat_j(|xi|) sigma_hat(|xi|) on the band support; d in {2, 3}. The
// transition order defaults higher than the partition's: the weighted decay
// checks need the extra profile smoothness.
RadialProfile kernel_psi_sigma(int j, int d, const std::vector<double>& x_abs_grid,
                               int transition = 4);

} // namespace spherelab
