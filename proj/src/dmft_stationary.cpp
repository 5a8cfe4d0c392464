#include <algorithm>
#include <cmath>

#include "sbmlab/dmft.hpp"

namespace sbmlab::dmft {

namespace {

struct Bath {
    std::vector<double> Q, R;
    double kappa = 0.0;
    double chi = 0.0;    // integrated response
    double m0 = 0.0;     // integrated memory kernel
    double plateau = 0.0;
    int iters = 0;
};

// Stationary time-translation-invariant solve at fixed persistent plateau q
// (q = s1^2; the trivial bath is q = 0). Kernel tails beyond the grid are
// folded in analytically with Q -> q, R -> 0, which keeps the grid length set
// by the decay of the connected parts rather than by the kernel range 2/gamma.
Bath bath_solve(int K, double c1, const Hyper& h, double q, const StationaryOptions& opts,
                const Bath* warm = nullptr) {
    const int m = static_cast<int>(std::ceil(opts.tau_max / opts.dtau));
    const double dt = opts.dtau;
    const double nu = h.nu, gamma = h.gamma;
    const double namp = nu * nu / (h.eta * gamma);

    std::vector<double> ek(m + 1);
    for (int j = 0; j <= m; ++j) ek[j] = std::exp(-0.5 * gamma * j * dt);

    Bath b;
    if (warm && static_cast<int>(warm->Q.size()) == m + 1) {
        b = *warm;
    } else {
        b.Q.resize(m + 1);
        b.R.resize(m + 1);
        for (int j = 0; j <= m; ++j) {
            const double e = std::exp(-j * dt);
            b.Q[j] = q + (1.0 - q) * e;
            b.R[j] = e;
        }
        b.kappa = nu;
    }

    std::vector<double> Mk(m + 1), Dk(m + 1), Qn(m + 1), Rn(m + 1);
    auto trapz = [&](auto&& f) {
        double acc = 0.5 * (f(0) + f(m));
        for (int j = 1; j < m; ++j) acc += f(j);
        return acc * dt;
    };

    const double S = (nu / gamma) * c1 * q;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        for (int j = 0; j <= m; ++j) {
            Mk[j] = ek[j] * (-0.5 * K * nu * b.Q[j] + namp * b.R[j]);
            Dk[j] = ek[j] * namp * b.Q[j];
        }
        const double tail_exp = (2.0 / gamma) * ek[m];  // int_{tau_m}^inf e^{-gamma s/2} ds
        b.m0 = trapz([&](int j) { return Mk[j]; }) - 0.5 * K * nu * q * tail_exp;
        const double imq =
            trapz([&](int j) { return Mk[j] * b.Q[j]; }) - 0.5 * K * nu * q * q * tail_exp;
        const double idr = trapz([&](int j) { return Dk[j] * b.R[j]; });
        const double kappa_new = nu + S + imq + idr;
        const double kappa = b.kappa + opts.relax * (kappa_new - b.kappa);

        // response march: dR/dtau = -kappa R + (M * R)(tau)
        Rn[0] = 1.0;
        double f_prev = -kappa + 0.5 * dt * Mk[0];  // f(0) with the j=0 conv term
        for (int i = 1; i <= m; ++i) {
            double conv = 0.5 * Mk[i] * Rn[0];
            for (int j = 1; j < i; ++j) conv += Mk[j] * Rn[i - j];
            conv *= dt;
            const double coef = 1.0 + 0.5 * dt * kappa - 0.25 * dt * dt * Mk[0];
            Rn[i] = (Rn[i - 1] + 0.5 * dt * (f_prev + conv)) / coef;
            f_prev = -kappa * Rn[i] + conv + 0.5 * dt * Mk[0] * Rn[i];
        }

        // correlation march with the forward-memory and noise lag integrals
        const double tail_tm = -(K * nu * q * q / gamma) * ek[m];
        std::vector<double> TMTD(m + 1, 0.0);
        for (int i = 0; i <= m; ++i) {
            double acc = 0.0;
            const int top = m - i;
            for (int j = 0; j <= top; ++j) {
                const double w = (j == 0 || j == top) ? 0.5 : 1.0;
                acc += w * (Mk[i + j] * b.Q[j] + Dk[i + j] * b.R[j]);
            }
            TMTD[i] = acc * dt + tail_tm;
        }
        Qn[0] = 1.0;
        f_prev = S - kappa + 0.5 * dt * Mk[0] + TMTD[0];
        for (int i = 1; i <= m; ++i) {
            double conv = 0.5 * Mk[i] * Qn[0];
            for (int j = 1; j < i; ++j) conv += Mk[j] * Qn[i - j];
            conv *= dt;
            const double coef = 1.0 + 0.5 * dt * kappa - 0.25 * dt * dt * Mk[0];
            Qn[i] = (Qn[i - 1] + 0.5 * dt * (f_prev + S + conv + TMTD[i])) / coef;
            f_prev = S - kappa * Qn[i] + conv + 0.5 * dt * Mk[0] * Qn[i] + TMTD[i];
        }

        double delta = std::abs(kappa - b.kappa);
        for (int j = 0; j <= m; ++j)
            delta = std::max({delta, std::abs(Qn[j] - b.Q[j]), std::abs(Rn[j] - b.R[j])});
        b.kappa = kappa;
        b.Q = Qn;
        b.R = Rn;
        if (delta < opts.tol) break;
    }
    if (it >= opts.max_iter)
        throw NonConvergence("stationary bath: fixed point did not reach tolerance");
    b.iters = it + 1;
    b.chi = trapz([&](int j) { return b.R[j]; });
    // plateau of Q over the last tenth of the grid
    double acc = 0.0;
    int cnt = 0;
    for (int j = m - m / 10; j <= m; ++j, ++cnt) acc += b.Q[j];
    b.plateau = acc / cnt;
    return b;
}

}  // namespace

StationaryState stationary_solve(const DataSpectrum& spectrum, const Hyper& hyper,
                                 const StationaryOptions& opts) {
    if (hyper.nu * opts.dtau >= 0.6)
        throw StepTooLarge("stationary_solve: nu*dtau exceeds the convergence guard");
    const int K = static_cast<int>(spectrum.size());
    const double c1 = spectrum.c[0];

    StationaryState st;
    Bath bath = bath_solve(K, c1, hyper, 0.0, opts);
    st.kappa_P = bath.kappa;
    st.chi_P = bath.chi;
    st.nu_c = hyper.gamma / (c1 * bath.chi);
    st.tau.resize(bath.Q.size());
    for (std::size_t j = 0; j < st.tau.size(); ++j) st.tau[j] = j * opts.dtau;
    st.Q = bath.Q;
    st.R = bath.R;
    st.kappa = bath.kappa;
    st.iters = bath.iters;

    if (!opts.want_condensed || hyper.nu <= st.nu_c) return st;

    // condensed branch: root of plateau(q) - q = 0 on (0, 1)
    Bath warm = bath;
    auto residual = [&](double q) {
        warm = bath_solve(K, c1, hyper, q, opts, &warm);
        return warm.plateau - q;
    };
    double lo = 1e-4, hi = 1.0 - 1e-10;
    double flo = residual(lo);
    if (flo <= 0.0) return st;  // supercriticality too weak to resolve on this grid
    double fhi = residual(hi);
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if (fm > 0.0) { lo = mid; flo = fm; } else { hi = mid; fhi = fm; }
    }
    const double q = 0.5 * (lo + hi);
    warm = bath_solve(K, c1, hyper, q, opts, &warm);
    st.condensed = true;
    st.q = q;
    st.s1 = std::sqrt(q);
    st.Q = warm.Q;
    st.R = warm.R;
    st.kappa = warm.kappa;
    st.iters = warm.iters;
    return st;
}

double critical_nu(const DataSpectrum& spectrum, const Hyper& hyper,
                   const StationaryOptions& opts) {
    StationaryOptions o = opts;
    o.want_condensed = false;
    const auto st = stationary_solve(spectrum, hyper, o);
    return st.nu_c;
}

std::optional<double> find_critical_nu(const DataSpectrum& spectrum, const Hyper& hyper,
                                       const StationaryOptions& opts, double nu_lo,
                                       double nu_hi) {
    if (nu_hi <= 0.0) nu_hi = 0.5 / opts.dtau;  // guard nu*dtau < 0.6 with margin
    auto excess = [&](double nu) {
        Hyper h(hyper.gamma, hyper.eta, nu, hyper.beta);
        StationaryOptions o = opts;
        o.want_condensed = false;
        const auto st = stationary_solve(spectrum, h, o);
        return nu * spectrum.c[0] * st.chi_P / hyper.gamma - 1.0;
    };
    // ascending log scan; keep the topmost uncondensed->condensed crossing
    const int n = 25;
    double prev_nu = nu_lo, prev_f = excess(nu_lo);
    double blo = 0.0, bhi = 0.0;
    bool found = false;
    for (int i = 1; i <= n; ++i) {
        const double nu = nu_lo * std::pow(nu_hi / nu_lo, static_cast<double>(i) / n);
        const double f = excess(nu);
        if (prev_f < 0.0 && f >= 0.0) {
            blo = prev_nu;
            bhi = nu;
            found = true;
        }
        prev_nu = nu;
        prev_f = f;
    }
    if (!found) return std::nullopt;
    for (int it = 0; it < 40 && bhi / blo > 1.0 + 1e-6; ++it) {
        const double mid = std::sqrt(blo * bhi);
        (excess(mid) < 0.0 ? blo : bhi) = mid;
    }
    return std::sqrt(blo * bhi);
}

namespace {

// MAP bath response integral at nu = 1, c1 = 1, kernel rate g; multiplying
// back, nu c1 chi_P depends on (gamma, nu) only through g = gamma/nu.
double map_chi(double g, const StationaryOptions& opts) {
    StationaryOptions o = opts;
    o.want_condensed = false;
    Hyper h(g, 1e14, 1.0);
    const auto st = stationary_solve(DataSpectrum({1.0}), h, o);
    return st.chi_P;
}

}  // namespace

double map_gamma_min(const StationaryOptions& opts) {
    // coarse log scan + golden refinement of min_g X(g)
    double best = 1e300, gbest = 1.0;
    const double glo = 0.2, ghi = 40.0;
    const int n = 28;
    for (int i = 0; i <= n; ++i) {
        const double g = glo * std::pow(ghi / glo, static_cast<double>(i) / n);
        const double x = map_chi(g, opts);
        if (x < best) { best = x; gbest = g; }
    }
    double a = gbest / std::pow(ghi / glo, 1.0 / n), b = gbest * std::pow(ghi / glo, 1.0 / n);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = map_chi(x1, opts), f2 = map_chi(x2, opts);
    while (b - a > 1e-3 * a) {
        if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = map_chi(x1, opts); }
        else { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = map_chi(x2, opts); }
    }
    return std::min({best, f1, f2});
}

bool map_condensation_boundary(double gamma, const StationaryOptions& opts) {
    if (gamma > 1.0) return false;  // LHS of the MAP balance is nonnegative
    return gamma > map_gamma_min(opts);
}

}  // namespace sbmlab::dmft
