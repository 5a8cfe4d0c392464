#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbmlab {

// Hyperparameters of the trained model. gamma: weight decay, eta: inverse
// learning temperature, nu: persistent-chain sampling rate (dynamics only),
// beta: inverse sampling temperature.
struct Hyper {
    double gamma;
    double eta;
    double nu = 1.0;
    double beta = 1.0;

    Hyper(double gamma_, double eta_, double nu_ = 1.0, double beta_ = 1.0)
        : gamma(gamma_), eta(eta_), nu(nu_), beta(beta_) {
        if (!(gamma > 0) || !(eta > 0) || !(nu >= 0) || !(beta > 0))
            throw std::invalid_argument("Hyper: gamma, eta, beta must be > 0 and nu >= 0");
    }
};

// Ordered eigenvalues c_1 > ... > c_K > 0 of the empirical data covariance.
// `trace` defaults to sum(c); the usual data normalization has trace == K.
struct DataSpectrum {
    std::vector<double> c;
    double trace;

    explicit DataSpectrum(std::vector<double> eigenvalues)
        : c(std::move(eigenvalues)),
          trace(std::accumulate(c.begin(), c.end(), 0.0)) {
        if (c.empty()) throw std::invalid_argument("DataSpectrum: K >= 1 required");
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (!(c[k] > 0)) throw std::invalid_argument("DataSpectrum: eigenvalues must be positive");
            if (k > 0 && !(c[k - 1] >= c[k]))
                throw std::invalid_argument("DataSpectrum: eigenvalues must be non-increasing");
        }
    }

    std::size_t size() const { return c.size(); }
};

struct InconsistentPhase : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StabilityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CubicDegeneracy : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoFiniteTime : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RootBracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sbmlab
