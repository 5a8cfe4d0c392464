#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sbmlab/equilibrium.hpp"
#include "sbmlab/types.hpp"

namespace sbmlab::metrics {

// Rank-one teacher at signal-to-noise omega_star > 1. Its K=2 training data
// has covariance eigenvalues c1 = 2 - 1/w*, c2 = 1/w*, and the top data
// eigenvector overlaps the teacher direction with squared overlap
// 1 - 1/(2 w* - 1).
struct Teacher {
    double omega_star;

    explicit Teacher(double omega) : omega_star(omega) {
        if (!(omega > 1.0)) throw std::invalid_argument("Teacher: omega_star > 1 required");
    }
    double c1() const { return 2.0 - 1.0 / omega_star; }
    double c2() const { return 1.0 / omega_star; }
    double overlap_sq() const { return 1.0 - 1.0 / (2.0 * omega_star - 1.0); }
    DataSpectrum spectrum() const { return DataSpectrum({c1(), c2()}); }
    // (1/N) ln Z(W*) and (1/N) H[P*]
    double log_partition() const;
    double entropy() const;
};

// All four intensive KL divergences plus the entropies behind them. Values are
// leading order in N; identities hold to 1e-10 + O(1/N).
struct KlReport {
    double reverse_typical;
    double reverse_pp;
    double forward_typical;
    double forward_pp;
    double pp_entropy;
    double student_entropy;
    double teacher_entropy;
    equilibrium::Phase phase;
    double h_sq, u1_sq;
};

double kl_reverse_typical(const Teacher& t, const Hyper& h);
double kl_forward_typical(const Teacher& t, const Hyper& h);
double kl_reverse_pp(const Teacher& t, const Hyper& h);
double kl_forward_pp(const Teacher& t, const Hyper& h);
double pp_entropy(const Teacher& t, const Hyper& h);
KlReport kl_report(const Teacher& t, const Hyper& h);

// Posterior-predictive sample overlaps m_k^2 with the data eigenvectors and
// the three nonzero eigenvalues of the perturbed source C + x x^T/(N eta),
// descending. Throws CubicDegeneracy when roots coalesce within tolerance.
struct PerturbedSpectrum {
    double m1_sq, m2_sq;
    std::array<double, 3> tilde_c;
};
PerturbedSpectrum pp_perturbed_spectrum(const Teacher& t, const Hyper& h);

// Deterministic eigenvalues (lambda+, lambda-, c2) of the perturbed source
// when x is drawn from the teacher.
std::array<double, 3> teacher_perturbed_eigenvalues(const Teacher& t, const Hyper& h);

// Post-training sampling temperature: unique minimizer of the forward KL
// D(P* || P_{beta W}) over beta > 0, with the phase the rescaled model lands
// in. The model phase is re-classified at every trial beta.
struct TemperatureTuning {
    double beta_opt;
    bool dest_condensed;  // h != 0 after rescaling
    bool dest_aligned;    // u_1 != 0 (invariant under rescaling)
};
TemperatureTuning beta_tt(const Teacher& t, const Hyper& h);
// d/dbeta D(P* || P_{beta W}) at beta = 1 (sign decides beta_opt vs 1).
double beta_tt_derivative_at_one(const Teacher& t, const Hyper& h);

// Threshold posterior temperature above which the typical reverse KL develops
// a local minimum inside the condensed phase (double descent). Infinity for
// omega_star <= 1 + 1/sqrt(2).
double eta_dd(double omega_star);

// Derivative of the condensed-branch reverse KL with respect to g1.
double dd_reverse_kl_condensed(double omega_star, double eta, double g1);
double dd_reverse_kl_condensed_derivative(double omega_star, double eta, double g1);

// Optimal tempered-posterior classification.
enum class TemperedLabel { Warm, Cold, MAP, Deg, WarmDeg, WarmFlat, Mixed, ColdUnique };
const char* tempered_label_name(TemperedLabel l);

struct TemperedPhase {
    TemperedLabel label;
    // point optimum when finite and unique; [lo, hi] for degenerate sectors;
    // infinity for MAP
    std::optional<double> eta_opt;
    std::optional<std::pair<double, double>> eta_interval;
};

// Reverse-KL classifier over (omega*, gamma): WarmDeg/Deg for weak teachers,
// Warm/Cold/MAP otherwise with closed-form boundaries.
TemperedPhase tempered_reverse_phase(const Teacher& t, double gamma);

// Forward-KL classifier: WarmFlat / Mixed / ColdUnique / MAP.
TemperedPhase tempered_forward_phase(const Teacher& t, double gamma);

// Closed-form thresholds exposed for sweeps and tests.
double gamma_inf_reverse(double omega_star);
double gamma_wc_reverse(double omega_star);
double gamma_wc_forward(double omega_star);
double gamma_flat_forward(double omega_star);
double gamma_inf_forward(double omega_star);
double eta0_forward(double omega_star, double gamma);
std::pair<double, double> warm_interval_forward(double omega_star, double gamma);

// Instantaneous KLs along training from a signal-overlap history s_k(t).
// Valid early in training, while the negative phase is weak; `approx_break`
// is the first index where s1^2 > c1/gamma (or npos).
struct DynamicKls {
    std::vector<double> t;
    std::vector<double> forward;
    std::vector<double> reverse;
    std::vector<double> theta1;
    std::size_t approx_break;
};
DynamicKls dynamic_kls(const std::vector<double>& times,
                       const std::vector<std::vector<double>>& s_history, const Teacher& t,
                       const Hyper& h);

// nu-independent early-stopping estimate t* from the closed-form spike target
// theta*. Throws NoFiniteTime when the spike never reaches theta*.
double early_stopping_theta(const Teacher& t, const Hyper& h);
double early_stopping_time(const Teacher& t, const Hyper& h);

// Covariance-matching sampling temperature at spectrum level,
// beta = 1 + gamma sum lambda_k^2 c_k^2 / sum lambda_k (lambda_k - mu') c_k^4.
enum class NormConstraint { Spherical, PerSite };
double beta_tt_cov(const std::vector<double>& lambda, const std::vector<double>& c, double gamma,
                   NormConstraint constraint);

}  // namespace sbmlab::metrics
