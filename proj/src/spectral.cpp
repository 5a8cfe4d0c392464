#include "sbmlab/spectral.hpp"

#include <cmath>

namespace sbmlab::spectral {

namespace {
constexpr double kEdgeSlack = 1e-12;  // absorbs roundoff at z = 2*sigma
}

double density(const SemicircleBulk& bulk, double lambda) {
    const double s2 = bulk.sigma * bulk.sigma;
    const double disc = 4.0 * s2 - lambda * lambda;
    if (disc <= 0.0) return 0.0;
    return std::sqrt(disc) / (2.0 * M_PI * s2);
}

double stieltjes_g(const SemicircleBulk& bulk, double z) {
    const double s = bulk.sigma;
    const double x = z / s;
    if (x < 2.0 - kEdgeSlack)
        throw std::domain_error("stieltjes_g: z below the bulk edge 2*sigma");
    const double r = x < 2.0 ? 0.0 : std::sqrt((x - 2.0) * (x + 2.0));
    return 2.0 / (s * (x + r));  // rationalized; stable for large x
}

double stieltjes_f(const SemicircleBulk& bulk, double z) {
    const double g = stieltjes_g(bulk, z);
    return 0.5 * bulk.sigma * bulk.sigma * g * g - std::log(g);
}

double stieltjes_b(const SemicircleBulk& bulk, double z) {
    return z * stieltjes_g(bulk, z) - 1.0;
}

double inverse_stieltjes(const SemicircleBulk& bulk, double a) {
    if (!(a > 0.0) || a > 1.0 / bulk.sigma + kEdgeSlack)
        throw std::domain_error("inverse_stieltjes: a outside (0, 1/sigma]");
    return 1.0 / a + bulk.sigma * bulk.sigma * a;
}

}  // namespace sbmlab::spectral
