#pragma once

#include <vector>

#include "sbmlab/spectral.hpp"
#include "sbmlab/types.hpp"

namespace sbmlab::equilibrium {

// Phases of the trained model, labeled by the condensation weight h and the
// data alignments u_k. "Edge": h=0, u=0, all eigenvalues pinned at 2*sigma.
// "Aligned": h=0, top a modes detached and aligned. "RandomCondensed": h!=0
// along a random direction, u=0. "CondensedEdge"/"CondensedOutlier": h!=0
// with the top d modes aligned, coalesced at the bulk edge or detached.
enum class Phase { Edge, Aligned, RandomCondensed, CondensedEdge, CondensedOutlier };

const char* phase_name(Phase p);
bool condensed(Phase p);

struct EquilibriumSolution {
    Phase phase;
    std::vector<double> lambda;  // top eigenvalue positions, descending
    std::vector<double> g;       // g_k = G(lambda_k)
    std::vector<double> u_sq;    // W-eigenvector / data-eigenvector overlaps
    std::vector<double> chi;     // HCIZ saddle variables
    double h_sq = 0.0;           // condensation weight
    double mu = 0.0;             // spherical Lagrange multiplier
    double g1 = 0.0;             // Stieltjes value at the top position
    int d = 0;                   // number of coalesced condensed modes
    int a = 0;                   // number of detached aligned modes when h=0
    double sigma = 0.0;          // bulk half-width parameter
};

// Classify the equilibrium phase and populate all order parameters. Ties in
// the spectrum are perturbed by a relative 1e-12 jitter before classification;
// boundary cases within 1e-12 resolve toward the condensed phase with the
// largest d (order parameters are continuous there).
EquilibriumSolution classify_phase(const DataSpectrum& spectrum, const Hyper& hyper);

// Saddle point of the sample partition function given the top Stieltjes value:
// mu = G^{-1}(1), h^2 = 0 when g1 >= 1, else mu = lambda1, h^2 = 1 - g1.
struct SaddleMu {
    double mu;
    double h_sq;
};
SaddleMu saddle_mu(double g1, double lambda1, const spectral::SemicircleBulk& bulk);

// (1/N) ln Z at the saddle, including the (1/2) ln(2 pi) base-measure constant.
double log_partition_intensive(const EquilibriumSolution& sol, const Hyper& hyper);

// (1/N) <E> = (1 - mu)/2.
double avg_energy_intensive(const EquilibriumSolution& sol);

// (1/N) H[P_W] = [ln(2 pi e) - F(mu)] / 2.
double entropy_intensive(const EquilibriumSolution& sol, const Hyper& hyper);

// Per-mode HCIZ saddle. Coupled branch chi = lambda_k, u^2 = 1 - g_k/(eta c_k)
// when g_k <= eta c_k; uncoupled branch chi = G^{-1}(eta c_k), u^2 = 0.
struct HcizSaddle {
    double chi;
    double u_sq;
};
HcizSaddle hciz_saddle(double lambda_k, double c_k, const Hyper& hyper);

// O(N) coefficient of the log-evidence for a rank-K source with eigenvalues
// spectrum.c (general trace). Differences of phi between spectra with equal
// trace give intensive log-probability ratios directly; when the traces
// differ by dT, the honest ratio carries an extra -(eta/2) dT ln(2 pi) from
// the sample-space base measure (see metrics::pp_entropy).
double evidence_phi(const DataSpectrum& spectrum, const Hyper& hyper);
double evidence_phi(const DataSpectrum& spectrum, const Hyper& hyper,
                    const EquilibriumSolution& sol);

// Coefficients w_k = chi_k - 1/(eta c_k) of the posterior weight mean
// <W> = (1/N) sum_k w_k (c_k c_k^T - I).
std::vector<double> weight_mean_coefficients(const DataSpectrum& spectrum, const Hyper& hyper);

// Coefficients s_k = gamma * w_k of the posterior-predictive second moment
// (K/N) <<x x^T>> = C - (1/N) sum_k s_k (c_k c_k^T - I).
std::vector<double> sample_second_moment_coefficients(const DataSpectrum& spectrum,
                                                      const Hyper& hyper);

// Reverse KL of the unconstrained-Gaussian equivalent model from a rank-one
// teacher at signal-to-noise omega_star; equals the SBM h=0 branch,
// (omega* - 1 - ln omega*)/2 + 1/(4 gamma eta).
double gaussian_baseline_kl(double omega_star, const Hyper& hyper);

}  // namespace sbmlab::equilibrium
