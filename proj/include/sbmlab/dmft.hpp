#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "sbmlab/types.hpp"

namespace sbmlab::dmft {

struct TimeGrid {
    double t_max;
    double dt;
    int n;  // number of steps; grid points t_i = i*dt, i = 0..n

    TimeGrid(double t_max_, double dt_) : t_max(t_max_), dt(dt_) {
        if (!(dt > 0) || !(t_max > 0)) throw std::invalid_argument("TimeGrid: dt, t_max > 0");
        n = static_cast<int>(std::ceil(t_max / dt - 1e-12));
    }
    double t(int i) const { return i * dt; }
};

// Dense two-time storage, full square with the symmetry (Q) or causal zero
// (R) kept explicit so column sweeps stream row-major.
class TwoTime {
  public:
    TwoTime() = default;
    TwoTime(int n, double diag) : n_(n + 1), a_((n + 1) * static_cast<std::size_t>(n + 1), 0.0) {
        for (int i = 0; i <= n; ++i) at(i, i) = diag;
    }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * n_; }
    double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * n_; }
    int size() const { return n_; }

  private:
    int n_ = 0;
    std::vector<double> a_;
};

struct DmftSolution {
    TimeGrid grid;
    std::vector<std::vector<double>> s;  // s[k][i]
    std::vector<double> kappa;           // kappa[i]
    TwoTime Q;                           // symmetric, Q(i,i) = 1
    TwoTime R;                           // causal, R(i,i) = 1, zero above diagonal
    std::vector<double> c;               // data eigenvalues used
    int corrector_max_iters = 0;
};

struct SolveOptions {
    double corrector_tol = 1e-10;
    int corrector_cap = 50;
    double nu_dt_guard = 0.6;
    int n_cap = 4096;  // two-time storage is O(n^2); override explicitly for more
};

// Causal row-by-row time marching of the closed two-time system with an
// implicit predictor-corrector per step; kappa(t_n) solves the linear
// equal-time balance so that Q(t_n, t_n) = 1. Memory integrals use the
// trapezoidal rule; the delta part of the noise correlator enters the
// equal-time balance analytically as 2*nu.
DmftSolution solve_dmft(const DataSpectrum& spectrum, const Hyper& hyper,
                        const std::vector<double>& s0, const TimeGrid& grid,
                        const SolveOptions& opts = {});

// Early-time outlier position lambda_k(t); returns the bulk edge 2*sigma when
// the mode has not detached (or never does, c_k <= sqrt(gamma/eta)).
double early_outlier_trajectory(int k, double t, const DataSpectrum& spectrum,
                                const Hyper& hyper);

// t_out,k = -(2/gamma) ln(1 - sqrt(gamma/eta)/c_k); nullopt when the mode
// never detaches.
std::optional<double> detachment_time(int k, const DataSpectrum& spectrum, const Hyper& hyper);

// First grid time at which s1 attains its dip minimum below `threshold`
// before regrowing; nullopt when s1 never dips and regrows. A seed already
// below threshold gives t* = 0.
std::optional<double> condensation_onset_time(const DmftSolution& sol, double threshold = 1e-2);

// ---- stationary (time-translation invariant) solver -------------------------

struct StationaryOptions {
    double dtau = 1e-2;
    double tau_max = 60.0;
    int max_iter = 2000;
    double tol = 1e-11;
    double relax = 1.0;
    bool want_condensed = true;  // follow the condensed branch when it exists
};

struct StationaryState {
    std::vector<double> tau;
    std::vector<double> Q;   // Q_st on the tau grid (selected branch)
    std::vector<double> R;   // R_st
    double kappa = 0.0;
    double chi_P = 0.0;      // integrated uncondensed-bath response
    double kappa_P = 0.0;    // uncondensed-bath multiplier
    double s1 = 0.0;         // stationary signal of the top mode (0 on the trivial branch)
    double q = 0.0;          // persistent plateau s1^2
    bool condensed = false;
    double nu_c = 0.0;       // gamma / (c1 chi_P)
    int iters = 0;
};

// Fixed-point solve of the stationary system: first the uncondensed bath
// (s = 0), then continuation to the condensed branch when it exists. Kernel
// tails beyond the grid are folded in analytically through the persistent
// plateau q.
StationaryState stationary_solve(const DataSpectrum& spectrum, const Hyper& hyper,
                                 const StationaryOptions& opts = {});

// gamma / (c1 chi_P) evaluated from the uncondensed bath at the given hyper
// (including its nu).
double critical_nu(const DataSpectrum& spectrum, const Hyper& hyper,
                   const StationaryOptions& opts = {});

// Self-consistent dynamical threshold: largest crossing of nu c1 chi_P(nu) =
// gamma on an ascending nu scan, refined by bisection. The scan is capped by
// the guard nu * dtau < 0.6. nullopt when no boundary exists in the window.
std::optional<double> find_critical_nu(const DataSpectrum& spectrum, const Hyper& hyper,
                                       const StationaryOptions& opts = {}, double nu_lo = 1e-2,
                                       double nu_hi = 0.0);

// MAP-limit (eta -> infinity) condensation boundary. The MAP bath is scale
// invariant, so nu c1 chi_P depends on (gamma, nu) only through gamma/nu;
// X(g) = chi_P at nu = 1, c1 = 1, kernel rate g. A boundary exists iff
// min_g X(g) < gamma < 1; gamma > 1 admits no solution unconditionally.
bool map_condensation_boundary(double gamma, const StationaryOptions& opts = {});
// min_g X(g): the smallest gamma with a MAP dynamical boundary (about 0.84).
double map_gamma_min(const StationaryOptions& opts = {});

// ---- large-K reductions ------------------------------------------------------

// Bijective map between bare K-scaled parameters and the invariant O(1)
// regime: tbar = (K/K') t, gammabar = (K'/K) gamma, etabar = (K/K') eta,
// nubar = (K'/K) nu, cbar = (K'/K) c.
struct DynParams {
    double t;
    double gamma, eta, nu;
    std::vector<double> c;
};
DynParams to_invariant(const DynParams& bare, int K, int Kprime);
DynParams to_bare(const DynParams& invariant, int K, int Kprime);

// Closed-form large-K non-equilibrium stationary state:
// q = min{1, c_tilde_max}, kappa_tilde = (c_tilde_max - 1)_+ / gamma.
struct LargeKStationary {
    double q;
    double kappa_tilde;
};
LargeKStationary large_k_stationary(double c_tilde_max, double gamma);

}  // namespace sbmlab::dmft
