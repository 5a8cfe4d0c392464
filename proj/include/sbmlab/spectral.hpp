#pragma once

#include <cmath>

#include "sbmlab/types.hpp"

namespace sbmlab::spectral {

// Wigner semicircle bulk of half-width 2*sigma. For a model trained at
// (gamma, eta) the bulk parameter is sigma = 1/sqrt(gamma*eta).
struct SemicircleBulk {
    double sigma;

    explicit SemicircleBulk(double sigma_) : sigma(sigma_) {
        if (!(sigma > 0)) throw std::invalid_argument("SemicircleBulk: sigma > 0 required");
    }
    static SemicircleBulk from_hyper(const Hyper& h) {
        return SemicircleBulk(1.0 / std::sqrt(h.gamma * h.eta));
    }
    double edge() const { return 2.0 * sigma; }
};

// rho(lambda) = sqrt(4 sigma^2 - lambda^2) / (2 pi sigma^2) on [-2s, 2s], else 0.
double density(const SemicircleBulk& bulk, double lambda);

// Principal-branch Stieltjes transform G(z) for z >= 2*sigma; G(2s) = 1/s,
// G ~ 1/z at large z. Throws std::domain_error below the edge.
double stieltjes_g(const SemicircleBulk& bulk, double z);

// F(z) = integral of rho(l) ln(z-l) = sigma^2 G^2/2 - ln G, with F' = G.
double stieltjes_f(const SemicircleBulk& bulk, double z);

// B(z) = integral of l rho(l)/(z-l) = z G(z) - 1.
double stieltjes_b(const SemicircleBulk& bulk, double z);

// Unique z >= 2*sigma with G(z) = a, closed form z = 1/a + sigma^2 a.
// Domain: 0 < a <= 1/sigma (no root above the bulk otherwise).
double inverse_stieltjes(const SemicircleBulk& bulk, double a);

}  // namespace sbmlab::spectral
