#include "sbmlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace sbmlab::metrics {

using equilibrium::classify_phase;
using equilibrium::EquilibriumSolution;
using spectral::SemicircleBulk;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double omega0() { return 1.0 + 1.0 / std::sqrt(2.0); }
double omega2() { return 0.5 * (3.0 + std::sqrt(3.0)); }
double g_map(double w) { return (2.0 * w - 1.0) / (2.0 * w * (w - 1.0)); }

// (1/N) <E(x; W*)>_pp, the teacher energy of posterior-predictive samples.
double teacher_energy_pp(const Teacher& t, const Hyper& h, const EquilibriumSolution& sol) {
    const double w = t.omega_star;
    const double r = w * w / ((2.0 * w - 1.0) * (2.0 * w - 1.0));
    const double ec_chi = h.eta * t.c1() * sol.chi[0];
    return ((h.gamma / h.eta) * r * (ec_chi - 1.0) - 1.0) * 0.5 * (w - 1.0);
}

// (1/N) <<E(x; W)>_{x ~ P*}>, the forward cross-energy of a typical student.
double forward_energy(const Teacher& t, const Hyper& h, const EquilibriumSolution& sol) {
    const double w = t.omega_star;
    const double r = (w - 1.0) * (w - 1.0) / ((2.0 * w - 1.0) * (2.0 * w - 1.0));
    return -(t.c1() * sol.chi[0] - 1.0 / h.eta) * r;
}

// Monic cubic roots, all real. Trigonometric form with a Cardano/Newton
// fallback near the degenerate discriminant.
std::array<double, 3> cubic_roots(double p2, double p1, double p0) {
    const double q = (3.0 * p1 - p2 * p2) / 9.0;
    const double r = (9.0 * p2 * p1 - 27.0 * p0 - 2.0 * p2 * p2 * p2) / 54.0;
    const double d = q * q * q + r * r;
    std::array<double, 3> x{};
    if (d <= 0.0) {
        const double m = std::sqrt(std::max(0.0, -q));
        double cosarg = m > 0 ? r / (m * m * m) : 0.0;
        cosarg = std::clamp(cosarg, -1.0, 1.0);
        const double th = std::acos(cosarg);
        for (int i = 0; i < 3; ++i)
            x[i] = 2.0 * m * std::cos((th + 2.0 * M_PI * i) / 3.0) - p2 / 3.0;
    } else {
        // one real root analytically, the remaining pair from the deflated
        // quadratic (complex parts are roundoff here)
        const double s = std::cbrt(r + std::sqrt(d));
        const double u = std::cbrt(r - std::sqrt(d));
        const double x0 = s + u - p2 / 3.0;
        const double b = p2 + x0;
        const double c = p1 + b * x0;
        const double disc = std::max(0.0, b * b - 4.0 * c);
        x = {x0, 0.5 * (-b + std::sqrt(disc)), 0.5 * (-b - std::sqrt(disc))};
    }
    std::sort(x.begin(), x.end(), std::greater<>());
    // polish by Newton (the closed forms lose digits for spread-out roots)
    for (auto& root : x) {
        for (int it = 0; it < 3; ++it) {
            const double f = ((root + p2) * root + p1) * root + p0;
            const double fp = (3.0 * root + 2.0 * p2) * root + p1;
            if (fp != 0.0) root -= f / fp;
        }
    }
    std::sort(x.begin(), x.end(), std::greater<>());
    return x;
}

std::array<double, 3> perturbed_roots(const Teacher& t, const Hyper& h, double m1_sq,
                                      double m2_sq) {
    const double c1 = t.c1(), c2 = t.c2();
    const double a3 = -h.eta;
    const double a2 = h.eta * (c1 + c2) + 1.0;
    const double a1 =
        -m1_sq * c2 - m2_sq * c1 - (1.0 - m1_sq - m2_sq) * (c1 + c2) - h.eta * c1 * c2;
    const double a0 = (1.0 - m1_sq - m2_sq) * c1 * c2;
    return cubic_roots(a2 / a3, a1 / a3, a0 / a3);
}

DataSpectrum sorted_spectrum(std::array<double, 3> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return DataSpectrum({v[0], v[1], v[2]});
}

double phi_of(const DataSpectrum& s, const Hyper& h) { return equilibrium::evidence_phi(s, h); }

// ln Z(beta W)/N for the trained model with top Stieltjes value g1 and top
// eigenvalue lambda1; the rescaled model condenses iff beta > g1.
double log_partition_scaled(double beta, double g1, double lambda1, double sigma) {
    const double s2 = sigma * sigma;
    double val;
    if (beta >= g1) {
        val = 0.5 * (beta * lambda1 - 0.5 * s2 * g1 * g1 + std::log(g1) - std::log(beta));
    } else {
        val = 0.5 + 0.25 * s2 * beta * beta;
    }
    return 0.5 * std::log(2.0 * M_PI) + val;
}

}  // namespace

double Teacher::log_partition() const {
    return 0.5 * std::log(2.0 * M_PI) + 0.5 +
           0.5 * (omega_star - 1.0 - std::log(omega_star));
}
double Teacher::entropy() const {
    return 0.5 * std::log(2.0 * M_PI) + 0.5 - 0.5 * std::log(omega_star);
}

double kl_reverse_typical(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    const SemicircleBulk bulk(sol.sigma);
    return teacher_energy_pp(t, h, sol) +
           0.5 * (t.omega_star - 1.0 - std::log(t.omega_star) +
                  spectral::stieltjes_f(bulk, sol.mu));
}

double kl_forward_typical(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    const SemicircleBulk bulk(sol.sigma);
    return forward_energy(t, h, sol) +
           0.5 * (sol.mu - spectral::stieltjes_f(bulk, sol.mu)) -
           0.5 * (1.0 - std::log(t.omega_star));
}

PerturbedSpectrum pp_perturbed_spectrum(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    const double c[2] = {t.c1(), t.c2()};
    double m_sq[2];
    for (int k = 0; k < 2; ++k)
        m_sq[k] = std::max(0.0, 0.5 * c[k] - 0.5 * h.gamma * (sol.chi[k] - 1.0 / (h.eta * c[k])));
    const auto roots = perturbed_roots(t, h, m_sq[0], m_sq[1]);
    const double scale = std::max({1.0, roots[0]});
    if (roots[0] - roots[1] < 1e-11 * scale || roots[1] - roots[2] < 1e-11 * scale)
        throw CubicDegeneracy("pp_perturbed_spectrum: perturbed eigenvalues coalesce");
    return {m_sq[0], m_sq[1], roots};
}

std::array<double, 3> teacher_perturbed_eigenvalues(const Teacher& t, const Hyper& h) {
    const double c1 = t.c1(), c2 = t.c2();
    const double gap = c1 - c2;
    const double disc =
        std::sqrt((c1 - 1.0 / h.eta) * (c1 - 1.0 / h.eta) + 2.0 / h.eta * gap * gap);
    const double lp = 0.5 * (c1 + 1.0 / h.eta + disc);
    const double lm = 0.5 * (c1 + 1.0 / h.eta - disc);
    return {lp, lm, c2};
}

double kl_reverse_pp(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    const double c[2] = {t.c1(), t.c2()};
    double m_sq[2];
    for (int k = 0; k < 2; ++k)
        m_sq[k] = std::max(0.0, 0.5 * c[k] - 0.5 * h.gamma * (sol.chi[k] - 1.0 / (h.eta * c[k])));
    const auto roots = perturbed_roots(t, h, m_sq[0], m_sq[1]);
    return teacher_energy_pp(t, h, sol) +
           0.5 * (t.omega_star - std::log(t.omega_star)) +
           phi_of(sorted_spectrum(roots), h) - phi_of(t.spectrum(), h);
}

double kl_forward_pp(const Teacher& t, const Hyper& h) {
    const auto lam = teacher_perturbed_eigenvalues(t, h);
    return -0.5 * (1.0 - std::log(t.omega_star)) - phi_of(sorted_spectrum(lam), h) +
           phi_of(t.spectrum(), h);
}

double pp_entropy(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    const double c[2] = {t.c1(), t.c2()};
    double m_sq[2];
    for (int k = 0; k < 2; ++k)
        m_sq[k] = std::max(0.0, 0.5 * c[k] - 0.5 * h.gamma * (sol.chi[k] - 1.0 / (h.eta * c[k])));
    const auto roots = perturbed_roots(t, h, m_sq[0], m_sq[1]);
    // the perturbed source has trace larger by 1/eta; the sample-space base
    // measure contributes the extra (1/2) ln(2 pi) to the honest entropy
    return 0.5 * std::log(2.0 * M_PI) + phi_of(t.spectrum(), h) -
           phi_of(sorted_spectrum(roots), h);
}

KlReport kl_report(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    KlReport r;
    r.reverse_typical = kl_reverse_typical(t, h);
    r.reverse_pp = kl_reverse_pp(t, h);
    r.forward_typical = kl_forward_typical(t, h);
    r.forward_pp = kl_forward_pp(t, h);
    r.pp_entropy = pp_entropy(t, h);
    r.student_entropy = equilibrium::entropy_intensive(sol, h);
    r.teacher_entropy = t.entropy();
    r.phase = sol.phase;
    r.h_sq = sol.h_sq;
    r.u1_sq = sol.u_sq[0];
    return r;
}

double beta_tt_derivative_at_one(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    return 0.5 * (sol.mu - 1.0) + forward_energy(t, h, sol);
}

TemperatureTuning beta_tt(const Teacher& t, const Hyper& h) {
    const auto sol = classify_phase(t.spectrum(), h);
    const double ef = forward_energy(t, h, sol);
    const double g1 = sol.g[0];
    const double lam1 = sol.lambda[0];
    auto objective = [&](double beta) {
        return beta * ef + 0.5 * std::log(t.omega_star) - 0.5 - 0.5 * std::log(2.0 * M_PI) +
               log_partition_scaled(beta, g1, lam1, sol.sigma);
    };
    // golden-section on [1e-3, 1e2]; the objective is convex in beta
    double a = 1e-3, b = 1e2;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > 1e-8) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = objective(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = objective(x2);
        }
    }
    const double beta_opt = 0.5 * (a + b);
    return {beta_opt, beta_opt > g1, sol.u_sq[0] > 0.0};
}

// ---- double descent ---------------------------------------------------------

double dd_reverse_kl_condensed(double w, double eta, double g1) {
    const double t1 = 0.5 * (w - 1.0 - std::log(w * g1));
    const double t2 = -(w * (w - 1.0) * (1.0 - g1) / (2.0 * w - 1.0)) *
                      (1.0 - w * g1 / (eta * (2.0 * w - 1.0)));
    const double t3 = w * g1 / (4.0 * eta * (2.0 * w * g1 - 1.0));
    return t1 + t2 + t3;
}

double dd_reverse_kl_condensed_derivative(double w, double eta, double g1) {
    const double gm = g_map(w);
    const double a = w * (w - 1.0) * (g1 - gm) / (g1 * (2.0 * w - 1.0));
    const double b = w * w * (w - 1.0) * (1.0 - 2.0 * g1) / ((2.0 * w - 1.0) * (2.0 * w - 1.0)) -
                     w / (4.0 * (2.0 * w * g1 - 1.0) * (2.0 * w * g1 - 1.0));
    return a + b / eta;
}

double eta_dd(double w) {
    if (w <= omega0()) return kInf;
    const double gm = g_map(w);
    auto candidate = [&](double g) {
        const double eta_f = w * g / (2.0 * w * g - 1.0);
        const double pref = (2.0 * w * g - 1.0) / ((2.0 * w - 1.0) * (g - gm));
        const double bracket = (2.0 * g - 1.0) + (2.0 * w - 1.0) * (2.0 * w - 1.0) /
                                                     (4.0 * w * (w - 1.0) * (2.0 * w * g - 1.0) *
                                                      (2.0 * w * g - 1.0));
        return eta_f * std::max(1.0, pref * bracket);
    };
    const int n = 20000;
    double best = kInf, gbest = 0.0;
    for (int i = 1; i < n; ++i) {
        const double g = gm + (1.0 - gm) * i / n;
        const double v = candidate(g);
        if (v < best) { best = v; gbest = g; }
    }
    // golden refine around the grid minimum
    double a = std::max(gm * (1.0 + 1e-12), gbest - (1.0 - gm) / n);
    double b = std::min(1.0, gbest + (1.0 - gm) / n);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = candidate(x1), f2 = candidate(x2);
    while (b - a > 1e-12) {
        if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = candidate(x1); }
        else { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = candidate(x2); }
    }
    return std::min(best, candidate(0.5 * (a + b)));
}

// ---- tempered-posterior classifiers -----------------------------------------

const char* tempered_label_name(TemperedLabel l) {
    switch (l) {
        case TemperedLabel::Warm: return "warm";
        case TemperedLabel::Cold: return "cold";
        case TemperedLabel::MAP: return "map";
        case TemperedLabel::Deg: return "deg";
        case TemperedLabel::WarmDeg: return "warm-deg";
        case TemperedLabel::WarmFlat: return "warm-flat";
        case TemperedLabel::Mixed: return "mixed";
        case TemperedLabel::ColdUnique: return "cold-unique";
    }
    return "?";
}

double gamma_inf_reverse(double w) { return (2.0 * w - 1.0) / (2.0 * w * (w - 1.0) * (w - 1.0)); }

namespace {

double gamma_wc_reverse_d1(double w) {
    const double c1 = 2.0 - 1.0 / w, c2 = 1.0 / w;
    const double s = c2 + 3.0 * c1;
    const double disc = s * s - 16.0 * c1 * g_map(w);
    if (disc < 0.0) throw RootBracketFailure("gamma_wc_reverse: negative discriminant");
    const double g_wc = 0.25 * (s - std::sqrt(disc));
    return 2.0 * g_wc * g_wc - c2 * g_wc;
}

double gamma_wc_reverse_d2(double w) {
    const double c1 = 2.0 - 1.0 / w, c2 = 1.0 / w;
    const double gm = g_map(w);
    auto f = [&](double al) {
        return al * (c1 - al) * (2.0 * c1 * c2 - al) - 2.0 * c1 * gm * (c1 * c2 - al);
    };
    double lo = 1e-14, hi = c2 * (1.0 - 1e-14);
    if (f(lo) * f(hi) > 0.0)
        throw RootBracketFailure("gamma_wc_reverse: no root in (0, c2), falling back to d=1");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
    }
    const double al = 0.5 * (lo + hi);
    return al * al;
}

// eta at which the d=1 condensed branch hits the optimal overlap m1^2 = 1 - g_map
std::optional<double> eta_opt_reverse_d1(double w, double gamma) {
    const double c1 = 2.0 - 1.0 / w, c2 = 1.0 / w;
    const double g1 = 0.25 * (c2 + std::sqrt(c2 * c2 + 8.0 * gamma));
    const double denom = c1 - gamma / g1 - 2.0 * (1.0 - g_map(w));
    if (denom == 0.0) return std::nullopt;
    const double eta = (g1 - gamma / c1) / denom;
    if (!(eta > 0.0) || !std::isfinite(eta)) return std::nullopt;
    return eta;
}

}  // namespace

double gamma_wc_reverse(double w) {
    if (w > omega2()) {
        try {
            return gamma_wc_reverse_d2(w);
        } catch (const RootBracketFailure&) {
            return gamma_wc_reverse_d1(w);
        }
    }
    return gamma_wc_reverse_d1(w);
}

TemperedPhase tempered_reverse_phase(const Teacher& t, double gamma) {
    const double w = t.omega_star;
    TemperedPhase out;
    if (w <= omega0()) {
        if (gamma < t.c1()) {
            out.label = TemperedLabel::WarmDeg;
            out.eta_interval = {0.0, gamma / (t.c1() * t.c1())};
        } else {
            out.label = TemperedLabel::Deg;
        }
        return out;
    }
    const double gwc = gamma_wc_reverse(w);
    const double ginf = gamma_inf_reverse(w);
    if (gamma >= ginf) {
        out.label = TemperedLabel::MAP;
        return out;
    }
    out.label = gamma < gwc ? TemperedLabel::Warm : TemperedLabel::Cold;
    out.eta_opt = eta_opt_reverse_d1(w, gamma);
    return out;
}

double gamma_wc_forward(double w) { return 1.0 / (w * w); }

double gamma_flat_forward(double w) {
    const double c1 = 2.0 - 1.0 / w, c2 = 1.0 / w;
    const double r = std::sqrt(c1) - (c1 - c2) / std::sqrt(2.0);
    return r * r;
}

double gamma_inf_forward(double w) {
    return (3.0 * w - 2.0) * (4.0 * w - 3.0) / (w * w * (2.0 * w - 1.0) * (2.0 * w - 1.0));
}

double eta0_forward(double w, double gamma) {
    const double c1 = 2.0 - 1.0 / w, c2 = 1.0 / w;
    const double g1 = 0.25 * (c2 + std::sqrt(c2 * c2 + 8.0 * gamma));
    const double denom = c1 * (1.0 - g1) - 0.5 * (c1 - c2) * (c1 - c2);
    return g1 * (1.0 - g1) / denom;
}

std::pair<double, double> warm_interval_forward(double w, double gamma) {
    const double c1 = 2.0 - 1.0 / w, c2 = 1.0 / w;
    const double A = gamma + c1 - 0.5 * (c1 - c2) * (c1 - c2);
    const double disc = A * A - 4.0 * gamma * c1;
    if (disc < 0.0) throw RootBracketFailure("warm_interval_forward: no real warm interval");
    const double lo = 4.0 * gamma / ((A + std::sqrt(disc)) * (A + std::sqrt(disc)));
    const double hi = 4.0 * gamma / ((A - std::sqrt(disc)) * (A - std::sqrt(disc)));
    return {lo, hi};
}

TemperedPhase tempered_forward_phase(const Teacher& t, double gamma) {
    const double w = t.omega_star;
    TemperedPhase out;
    const double gwc = gamma_wc_forward(w), gflat = gamma_flat_forward(w),
                 ginf = gamma_inf_forward(w);
    if (gamma >= ginf) {
        out.label = TemperedLabel::MAP;
        return out;
    }
    if (gamma > gflat) {
        out.label = TemperedLabel::ColdUnique;
        out.eta_opt = eta0_forward(w, gamma);
        return out;
    }
    auto iw = warm_interval_forward(w, gamma);
    const double hi = std::min(1.0, iw.second);
    if (iw.first > 1.0) {
        // open case: the warm interval sits entirely above eta = 1; report it
        // as empty and classify by the smooth branch
        out.label = TemperedLabel::ColdUnique;
        out.eta_opt = eta0_forward(w, gamma);
        return out;
    }
    if (gamma < gwc) {
        out.label = TemperedLabel::WarmFlat;
        out.eta_interval = {iw.first, hi};
        out.eta_opt = eta0_forward(w, gamma);
    } else {
        out.label = TemperedLabel::Mixed;
        out.eta_interval = {iw.first, hi};
        out.eta_opt = eta0_forward(w, gamma);
    }
    return out;
}

double beta_tt_cov(const std::vector<double>& lambda, const std::vector<double>& c, double gamma,
                   NormConstraint constraint) {
    if (lambda.size() != c.size() || lambda.empty())
        throw std::invalid_argument("beta_tt_cov: equal-length nonempty spectra required");
    double mu_prime = 0.0;
    if (constraint == NormConstraint::Spherical) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            num += lambda[k] * c[k] * c[k];
            den += c[k] * c[k];
        }
        mu_prime = num / den;
    }
    double num = 0.0, den = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double c2 = c[k] * c[k];
        num += lambda[k] * lambda[k] * c2;
        den += lambda[k] * (lambda[k] - mu_prime) * c2 * c2;
        scale += std::abs(lambda[k]) * (std::abs(lambda[k]) + std::abs(mu_prime)) * c2 * c2;
    }
    if (std::abs(den) <= 1e-12 * std::max(scale, 1e-300))
        throw DegenerateDenominator("beta_tt_cov: projection denominator vanishes");
    return 1.0 + gamma * num / den;
}

}  // namespace sbmlab::metrics
