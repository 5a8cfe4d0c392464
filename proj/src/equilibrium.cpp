#include "sbmlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sbmlab::equilibrium {

using spectral::SemicircleBulk;

namespace {

constexpr double kTieTol = 1e-12;  // boundary tie-break tolerance
constexpr double kInf = std::numeric_limits<double>::infinity();

// Strictly-decreasing copy of the spectrum; exact ties get a relative jitter.
std::vector<double> jittered(const std::vector<double>& c) {
    std::vector<double> out = c;
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (out[k] >= out[k - 1] * (1.0 - kTieTol))
            out[k] = out[k - 1] * (1.0 - kTieTol * static_cast<double>(k + 1));
    }
    return out;
}

// Coalesced-outlier position of the top d modes, as a Stieltjes value.
double coalesced_g1(const std::vector<double>& c, double trace, int d, double gamma) {
    double tail = 0.0;
    for (std::size_t k = d; k < c.size(); ++k) tail += c[k];
    return (tail + std::sqrt(tail * tail + 4.0 * d * gamma * trace)) / (2.0 * trace);
}

// Uncondensed mode: detached outlier when eta c_k^2 > gamma, edge-pinned else.
void fill_uncondensed(double c_k, const Hyper& h, const SemicircleBulk& bulk, double sqrt_ge,
                      double& lambda, double& g, double& u_sq, double& chi) {
    if (h.eta * c_k * c_k > h.gamma * (1.0 + kTieTol)) {
        lambda = 1.0 / (h.eta * c_k) + c_k / h.gamma;
        g = h.gamma / c_k;
        u_sq = 1.0 - h.gamma / (h.eta * c_k * c_k);
        chi = lambda;
    } else {
        lambda = bulk.edge();
        g = sqrt_ge;
        u_sq = 0.0;
        chi = 1.0 / (h.eta * c_k) + c_k / h.gamma;  // = G^{-1}(eta c_k)
    }
}

}  // namespace

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Edge: return "edge";
        case Phase::Aligned: return "aligned";
        case Phase::RandomCondensed: return "random-condensed";
        case Phase::CondensedEdge: return "condensed-edge";
        case Phase::CondensedOutlier: return "condensed-outlier";
    }
    return "?";
}

bool condensed(Phase p) {
    return p == Phase::RandomCondensed || p == Phase::CondensedEdge ||
           p == Phase::CondensedOutlier;
}

EquilibriumSolution classify_phase(const DataSpectrum& spectrum, const Hyper& hyper) {
    const auto c = jittered(spectrum.c);
    const int K = static_cast<int>(c.size());
    const double T = spectrum.trace;
    const double ge = hyper.gamma * hyper.eta;
    const double sqrt_ge = std::sqrt(ge);
    const SemicircleBulk bulk = SemicircleBulk::from_hyper(hyper);

    EquilibriumSolution sol;
    sol.sigma = bulk.sigma;
    sol.lambda.resize(K);
    sol.g.resize(K);
    sol.u_sq.assign(K, 0.0);
    sol.chi.resize(K);

    auto fill_tail = [&](int d) {
        for (int k = d; k < K; ++k)
            fill_uncondensed(c[k], hyper, bulk, sqrt_ge, sol.lambda[k], sol.g[k], sol.u_sq[k],
                             sol.chi[k]);
    };

    // Condensed aligned phases, scanning d = K..1 (windows are nested; the
    // first accepted d wins and ties prefer the larger d).
    for (int d = K; d >= 1; --d) {
        const double cd = c[d - 1];
        const double cd1 = d < K ? c[d] : 0.0;

        const double g1 = coalesced_g1(c, T, d, hyper.gamma);
        double upper = std::min(1.0, hyper.eta * cd);
        upper = std::min(upper, sqrt_ge);
        if (d < K) upper = std::min(upper, hyper.gamma / cd1);
        if (hyper.gamma / cd < g1 + kTieTol && g1 < upper + kTieTol) {
            sol.phase = Phase::CondensedOutlier;
            sol.d = d;
            sol.g1 = g1;
            sol.h_sq = 1.0 - g1;
            const double lam1 = spectral::inverse_stieltjes(bulk, g1);
            for (int k = 0; k < d; ++k) {
                sol.lambda[k] = lam1;
                sol.g[k] = g1;
                sol.u_sq[k] = 1.0 - g1 / (hyper.eta * c[k]);
                sol.chi[k] = lam1;
            }
            fill_tail(d);
            sol.mu = lam1;
            return sol;
        }

        double sum_d = 0.0;
        for (int k = 0; k < d; ++k) sum_d += c[k];
        const bool edge_window = hyper.eta * cd1 < sqrt_ge + kTieTol &&
                                 sqrt_ge < std::min(1.0, hyper.eta * cd) + kTieTol;
        const bool edge_balance =
            sqrt_ge * (hyper.eta * T - d) + hyper.eta * sum_d < hyper.eta * T + kTieTol;
        if (edge_window && edge_balance) {
            sol.phase = Phase::CondensedEdge;
            sol.d = d;
            sol.g1 = sqrt_ge;
            sol.h_sq = 1.0 - sqrt_ge;
            const double lam1 = bulk.edge();
            for (int k = 0; k < d; ++k) {
                sol.lambda[k] = lam1;
                sol.g[k] = sqrt_ge;
                sol.u_sq[k] = 1.0 - std::sqrt(hyper.gamma / hyper.eta) / c[k];
                sol.chi[k] = lam1;
            }
            fill_tail(d);
            sol.mu = lam1;
            return sol;
        }
    }

    // Condensation along a random direction: eta^2 c1^2 < gamma eta < 1.
    const double e2c2 = hyper.eta * hyper.eta * c[0] * c[0];
    if (e2c2 < ge + kTieTol && ge < 1.0 + kTieTol) {
        sol.phase = Phase::RandomCondensed;
        sol.d = 0;
        sol.g1 = sqrt_ge;
        sol.h_sq = 1.0 - sqrt_ge;
        fill_tail(0);
        sol.mu = bulk.edge();
        return sol;
    }

    // h = 0 phases (require gamma eta >= 1 so that G^{-1}(1) exists).
    if (ge >= 1.0 - kTieTol) {
        int a = 0;
        while (a < K && hyper.eta * c[a] * c[a] > hyper.gamma * (1.0 + kTieTol)) ++a;
        const bool ok = a == 0 ? hyper.gamma >= hyper.eta * c[0] * c[0] * (1.0 - kTieTol)
                               : hyper.gamma >= c[0] * (1.0 - kTieTol);
        if (ok) {
            sol.phase = a == 0 ? Phase::Edge : Phase::Aligned;
            sol.a = a;
            fill_tail(0);
            sol.g1 = sol.g[0];
            sol.h_sq = 0.0;
            sol.mu = spectral::inverse_stieltjes(bulk, 1.0);
            return sol;
        }
    }

    std::ostringstream msg;
    msg << "classify_phase: no phase condition satisfied at gamma=" << hyper.gamma
        << " eta=" << hyper.eta << " (boundary-degenerate input?)";
    throw InconsistentPhase(msg.str());
}

SaddleMu saddle_mu(double g1, double lambda1, const SemicircleBulk& bulk) {
    if (g1 >= 1.0) {
        // needs gamma*eta >= 1; inverse_stieltjes throws otherwise, signalling
        // that the random-condensed branch applies instead
        return {spectral::inverse_stieltjes(bulk, 1.0), 0.0};
    }
    return {lambda1, 1.0 - g1};
}

double log_partition_intensive(const EquilibriumSolution& sol, const Hyper& hyper) {
    const SemicircleBulk bulk(sol.sigma);
    (void)hyper;
    return 0.5 * std::log(2.0 * M_PI) + 0.5 * (sol.mu - spectral::stieltjes_f(bulk, sol.mu));
}

double avg_energy_intensive(const EquilibriumSolution& sol) { return 0.5 * (1.0 - sol.mu); }

double entropy_intensive(const EquilibriumSolution& sol, const Hyper& hyper) {
    const SemicircleBulk bulk(sol.sigma);
    (void)hyper;
    return 0.5 * (std::log(2.0 * M_PI) + 1.0 - spectral::stieltjes_f(bulk, sol.mu));
}

HcizSaddle hciz_saddle(double lambda_k, double c_k, const Hyper& hyper) {
    const SemicircleBulk bulk = SemicircleBulk::from_hyper(hyper);
    const double g_k = spectral::stieltjes_g(bulk, lambda_k);
    const double ec = hyper.eta * c_k;
    if (g_k <= ec) return {lambda_k, 1.0 - g_k / ec};
    return {spectral::inverse_stieltjes(bulk, ec), 0.0};
}

double evidence_phi(const DataSpectrum& spectrum, const Hyper& hyper,
                    const EquilibriumSolution& sol) {
    const auto& c = spectrum.c;
    const int K = static_cast<int>(c.size());
    const double ge = hyper.gamma * hyper.eta;
    const SemicircleBulk bulk(sol.sigma);

    double phi = 0.5 * K * std::log(ge);
    phi -= 0.5 * hyper.eta * (sol.mu - spectral::stieltjes_f(bulk, sol.mu)) * spectrum.trace;
    const double g1 = sol.g1;
    for (int k = 0; k < K; ++k) {
        if (k < sol.d) {
            phi += -0.5 - 0.25 * ge / (g1 * g1) + 0.5 * c[k] * g1 / hyper.gamma +
                   0.5 * hyper.eta * c[k] / g1 - 0.5 * std::log(g1 * hyper.eta * c[k]);
        } else {
            phi += 0.25 * hyper.eta * c[k] * c[k] / hyper.gamma - 0.5 * std::log(ge);
        }
    }
    return phi;
}

double evidence_phi(const DataSpectrum& spectrum, const Hyper& hyper) {
    return evidence_phi(spectrum, hyper, classify_phase(spectrum, hyper));
}

std::vector<double> weight_mean_coefficients(const DataSpectrum& spectrum, const Hyper& hyper) {
    const auto sol = classify_phase(spectrum, hyper);
    std::vector<double> w(spectrum.size());
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = sol.chi[k] - 1.0 / (hyper.eta * spectrum.c[k]);
    return w;
}

std::vector<double> sample_second_moment_coefficients(const DataSpectrum& spectrum,
                                                      const Hyper& hyper) {
    auto w = weight_mean_coefficients(spectrum, hyper);
    for (auto& v : w) v *= hyper.gamma;
    return w;
}

double gaussian_baseline_kl(double omega_star, const Hyper& hyper) {
    return 0.5 * (omega_star - 1.0 - std::log(omega_star)) + 0.25 / (hyper.gamma * hyper.eta);
}

}  // namespace sbmlab::equilibrium
