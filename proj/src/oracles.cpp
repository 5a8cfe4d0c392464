#include "sbmlab/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

namespace sbmlab::oracles {

double semicircle_expectation(double sigma, const std::function<double(double)>& f, int panels) {
    // lambda = 2 sigma sin(theta): rho dlambda = (2/pi) cos^2(theta) dtheta
    const int n = 2 * panels;  // Simpson needs an even count
    const double a = -0.5 * M_PI, b = 0.5 * M_PI;
    const double h = (b - a) / n;
    auto g = [&](double th) {
        const double ct = std::cos(th);
        return (2.0 / M_PI) * ct * ct * f(2.0 * sigma * std::sin(th));
    };
    double acc = g(a) + g(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
    return acc * h / 3.0;
}

std::vector<double> semicircle_quantiles(double sigma, int m) {
    auto cdf = [&](double lam) {
        const double x = std::clamp(lam / (2.0 * sigma), -1.0, 1.0);
        return 0.5 + (x * std::sqrt(1.0 - x * x) + std::asin(x)) / M_PI;
    };
    std::vector<double> q(m);
    for (int i = 0; i < m; ++i) {
        const double p = (i + 0.5) / m;
        double lo = -2.0 * sigma, hi = 2.0 * sigma;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid) < p ? lo : hi) = mid;
        }
        q[i] = 0.5 * (lo + hi);
    }
    return q;
}

double log_partition_contour(const std::vector<double>& eigenvalues) {
    const int N = static_cast<int>(eigenvalues.size());
    const double lmax = *std::max_element(eigenvalues.begin(), eigenvalues.end());

    auto gsum = [&](double mu) {
        double acc = 0.0;
        for (double l : eigenvalues) acc += 1.0 / (mu - l);
        return acc / N;
    };
    double lo = lmax + 1e-12, hi = lmax + 1.0;
    while (gsum(hi) > 1.0) hi = lmax + 2.0 * (hi - lmax);
    while (gsum(lo) < 1.0) lo = lmax + 0.5 * (lo - lmax);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gsum(mid) > 1.0 ? lo : hi) = mid;
    }
    const double mu = 0.5 * (lo + hi);

    auto S = [&](std::complex<double> z) {
        std::complex<double> acc = z;
        for (double l : eigenvalues) acc -= std::log(z - l) / static_cast<double>(N);
        return acc;
    };
    const double S0 = S(mu).real();
    double spp = 0.0;  // S''(mu) = (1/N) sum (mu - l)^{-2}
    for (double l : eigenvalues) spp += 1.0 / ((mu - l) * (mu - l));
    spp /= N;
    const double yscale = 1.0 / std::sqrt(0.5 * N * spp);

    // Simpson along mu + i y until the integrand is negligible
    const double Y = 14.0 * yscale;
    const int n = 4000;
    const double h = 2.0 * Y / n;
    auto integrand = [&](double y) {
        const std::complex<double> ds = S(std::complex<double>(mu, y)) - S0;
        return std::exp(0.5 * N * ds).real();
    };
    double acc = integrand(-Y) + integrand(Y);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(-Y + i * h);
    const double integral = acc * h / 3.0;

    return 0.5 * std::log(2.0 * M_PI) + 0.5 * S0 +
           std::log(integral / (4.0 * M_PI)) / static_cast<double>(N);
}

std::array<double, 3> companion_cubic_roots(double p2, double p1, double p0) {
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(1, 0) = comp(2, 1) = 1.0;
    comp(0, 2) = -p0;
    comp(1, 2) = -p1;
    comp(2, 2) = -p2;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
    std::array<double, 3> out{es.eigenvalues()(0).real(), es.eigenvalues()(1).real(),
                              es.eigenvalues()(2).real()};
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double replica_phi_outlier(const DataSpectrum& spectrum, const Hyper& hyper, int d, double g1) {
    const auto& c = spectrum.c;
    const int K = static_cast<int>(c.size());
    const double gamma = hyper.gamma, eta = hyper.eta;
    double phi = 0.0;
    for (int k = d; k < K; ++k) phi += 0.25 * eta * c[k] * c[k] / gamma;
    phi += 0.25 * d * gamma * eta / (g1 * g1);
    phi -= 0.25 * K * g1 * g1 / gamma;
    for (int k = 0; k < d; ++k) phi += 0.5 * std::log(gamma / c[k]);
    phi -= 0.5 * (K * eta + d) * std::log(g1);
    phi -= 0.5 * K * eta;
    return phi;
}

std::array<double, 2> hciz_grid_extremize(double lambda_k, double c_k, const Hyper& hyper) {
    // sup over u^2 of the inf over chi of the exponent
    // J(u^2, chi) = eta c (lambda u^2 + chi (1 - u^2)) - F(chi) - ln(eta c)
    const double sigma = 1.0 / std::sqrt(hyper.gamma * hyper.eta);
    const double ec = hyper.eta * c_k;
    auto fval = [&](double chi) {
        const double x = chi / sigma;
        const double r = std::sqrt(std::max(0.0, (x - 2.0) * (x + 2.0)));
        const double g = 2.0 / (sigma * (x + r));
        return 0.5 * sigma * sigma * g * g - std::log(g);
    };
    const double chi_lo = 2.0 * sigma;
    const double chi_hi = std::max({40.0 * sigma, 20.0 * lambda_k, 40.0 / ec});
    auto inner = [&](double usq, double& chi_star) {
        // the inner objective is convex in chi (its slope ec(1-u^2) - G(chi)
        // is increasing), so golden-section is exact enough
        auto f = [&](double ch) { return ec * ch * (1.0 - usq) - fval(ch); };
        double a = chi_lo, b = chi_hi;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = f(x1), f2 = f(x2);
        while (b - a > 1e-10 * chi_hi) {
            if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = f(x1); }
            else { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = f(x2); }
        }
        chi_star = 0.5 * (a + b);
        return f(chi_star) + ec * lambda_k * usq;
    };
    double bu = 0.0, bc = chi_lo, best = -1e300;
    double ulo = 0.0, uhi = 1.0 - 1e-9;
    for (int pass = 0; pass < 4; ++pass) {
        const int nu = 200;
        for (int i = 0; i <= nu; ++i) {
            const double u = ulo + (uhi - ulo) * i / nu;
            double cs;
            const double v = inner(u, cs);
            if (v > best) { best = v; bu = u; bc = cs; }
        }
        const double du = (uhi - ulo) * 2.0 / nu;
        ulo = std::max(0.0, bu - du);
        uhi = std::min(1.0 - 1e-9, bu + du);
    }
    double cs;
    inner(bu, cs);
    return {cs, bu};
}

GridMin eta_grid_minimize(const std::function<double(double)>& f, double eta_lo, double eta_hi,
                          int n) {
    auto scan = [&](double lo, double hi, int pts, double& best_eta, double& best_f) {
        for (int i = 0; i <= pts; ++i) {
            const double eta = lo * std::pow(hi / lo, static_cast<double>(i) / pts);
            double v;
            try {
                v = f(eta);
            } catch (...) {
                continue;
            }
            if (v < best_f) { best_f = v; best_eta = eta; }
        }
    };
    double be = eta_lo, bf = 1e300;
    scan(eta_lo, eta_hi, n, be, bf);
    const double step = std::pow(eta_hi / eta_lo, 1.0 / n);
    scan(be / step, be * step, 200, be, bf);
    double edge = 1e300;
    try {
        edge = f(eta_hi);
    } catch (...) {
    }
    return {be, bf, edge};
}

}  // namespace sbmlab::oracles
