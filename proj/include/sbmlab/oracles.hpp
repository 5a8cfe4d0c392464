#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sbmlab/types.hpp"

// Independent numerical oracles used by the tests and the validation suite.
// Nothing in the library's implementation paths calls into this module.
namespace sbmlab::oracles {

// Quadrature of f against the semicircle density (theta substitution removes
// the edge singularity; Simpson on a fine grid).
double semicircle_expectation(double sigma, const std::function<double(double)>& f,
                              int panels = 4000);

// Deterministic finite bulk: M midpoint quantiles of the semicircle law.
std::vector<double> semicircle_quantiles(double sigma, int m);

// (1/N) ln Z for an explicit finite spectrum, via the exact one-dimensional
// contour representation with a real saddle above the top eigenvalue.
double log_partition_contour(const std::vector<double>& eigenvalues);

// Cubic roots from the companion-matrix eigenvalues (descending).
std::array<double, 3> companion_cubic_roots(double p2, double p1, double p0);

// Closed-form replica expression for the evidence coefficient in the
// condensed-outlier phase (trace-K spectra), used as an algebraic cross-check.
double replica_phi_outlier(const DataSpectrum& spectrum, const Hyper& hyper, int d, double g1);

// Grid extremization of the per-mode spherical-integral exponent over
// (u^2, chi); returns {chi*, u^2*}.
std::array<double, 2> hciz_grid_extremize(double lambda_k, double c_k, const Hyper& hyper);

// Brute-force eta-grid minimizer of a scalar function of eta (log-spaced grid
// with one refinement pass). Returns {eta_opt, f(eta_opt), f(eta_max_edge)}.
struct GridMin {
    double eta_opt;
    double f_opt;
    double f_right_edge;
};
GridMin eta_grid_minimize(const std::function<double(double)>& f, double eta_lo = 1e-3,
                          double eta_hi = 1e3, int n = 600);

}  // namespace sbmlab::oracles
