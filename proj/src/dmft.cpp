#include "sbmlab/dmft.hpp"

#include <algorithm>
#include <cmath>

#include "sbmlab/spectral.hpp"

namespace sbmlab::dmft {

namespace {

// Trapezoid weight for node u on [0, i] (dt factored out).
inline double tw(int u, int i) { return (u == 0 || u == i) ? 0.5 : 1.0; }

}  // namespace

DmftSolution solve_dmft(const DataSpectrum& spectrum, const Hyper& hyper,
                        const std::vector<double>& s0, const TimeGrid& grid,
                        const SolveOptions& opts) {
    const int K = static_cast<int>(spectrum.size());
    if (static_cast<int>(s0.size()) != K)
        throw std::invalid_argument("solve_dmft: s0 must have one seed per mode");
    for (double v : s0)
        if (!(std::abs(v) < 1.0)) throw std::invalid_argument("solve_dmft: |s0_k| < 1 required");
    if (hyper.nu * grid.dt >= opts.nu_dt_guard)
        throw StepTooLarge("solve_dmft: nu*dt exceeds the stability guard");
    if (grid.n > opts.n_cap)
        throw std::invalid_argument("solve_dmft: grid exceeds n_cap (override explicitly)");

    const int n = grid.n;
    const double dt = grid.dt;
    const double nu = hyper.nu, gamma = hyper.gamma;
    const double noise_amp = nu * nu / (hyper.eta * gamma);

    DmftSolution sol{grid,
                     std::vector<std::vector<double>>(K, std::vector<double>(n + 1, 0.0)),
                     std::vector<double>(n + 1, 0.0),
                     TwoTime(n, 1.0),
                     TwoTime(n, 1.0),
                     spectrum.c,
                     0};

    std::vector<double> ker(n + 1);
    for (int d = 0; d <= n; ++d) ker[d] = std::exp(-0.5 * gamma * d * dt);
    std::vector<double> drive(n + 1);
    for (int i = 0; i <= n; ++i) drive[i] = (nu / gamma) * (1.0 - std::exp(-0.5 * gamma * i * dt));

    for (int k = 0; k < K; ++k) sol.s[k][0] = s0[k];
    sol.kappa[0] = nu;  // equal-time balance at t=0: drive and memory vanish

    auto& Q = sol.Q;
    auto& R = sol.R;
    const auto& c = spectrum.c;

    // M(i,u) and smooth D(i,u) for a row i
    std::vector<double> Mrow(n + 1), Drow(n + 1);
    auto fill_kernels = [&](int i, std::vector<double>& M, std::vector<double>& D) {
        const double* qr = Q.row(i);
        const double* rr = R.row(i);
        for (int u = 0; u <= i; ++u) {
            const double e = ker[i - u];
            M[u] = e * (-0.5 * K * nu * qr[u] + noise_amp * rr[u]);
            D[u] = e * noise_amp * qr[u];
        }
    };

    // RHS caches for the previous row
    std::vector<double> fq_prev(n + 1), fr_prev(n + 1);
    std::vector<double> fs_prev(K);
    std::vector<double> imq(n + 1), idr(n + 1), imr(n + 1);
    std::vector<double> Mprev(n + 1), Dprev(n + 1);

    auto row_rhs = [&](int i, const std::vector<double>& M, const std::vector<double>& D,
                       std::vector<double>& fq, std::vector<double>& fr,
                       std::vector<double>& fs, double& kappa_i, bool solve_kappa) {
        // IM_Q(j) = int_0^{t_i} M(t_i,u) Q(u,t_j) du, streamed over rows u
        std::fill(imq.begin(), imq.begin() + i + 1, 0.0);
        for (int u = 0; u <= i; ++u) {
            const double m = M[u] * tw(u, i) * dt;
            if (m == 0.0) continue;
            const double* qu = Q.row(u);
            for (int j = 0; j <= i; ++j) imq[j] += m * qu[j];
        }
        // ID(j) = int_0^{t_j} D(t_i,u) R(t_j,u) du
        for (int j = 0; j <= i; ++j) {
            const double* rj = R.row(j);
            double acc = 0.0;
            for (int u = 0; u <= j; ++u) acc += tw(u, j) * D[u] * rj[u];
            idr[j] = acc * dt;
        }
        // IM_R(j) = int_{t_j}^{t_i} M(t_i,u) R(u,t_j) du
        std::fill(imr.begin(), imr.begin() + i + 1, 0.0);
        for (int u = 0; u <= i; ++u) {
            const double m = M[u] * dt;
            if (m == 0.0) continue;
            const double* ru = R.row(u);
            for (int j = 0; j <= u; ++j) {
                const double w = (j == u || u == i) ? 0.5 : 1.0;  // trapezoid on [t_j, t_i]
                imr[j] += w * m * ru[j];
            }
        }

        double ss = 0.0;
        for (int k = 0; k < K; ++k) ss += c[k] * sol.s[k][i] * sol.s[k][i];
        if (solve_kappa) kappa_i = nu + drive[i] * ss + imq[i] + idr[i];

        const double* qi = Q.row(i);
        const double* ri = R.row(i);
        for (int j = 0; j <= i; ++j) {
            double sss = 0.0;
            for (int k = 0; k < K; ++k) sss += c[k] * sol.s[k][i] * sol.s[k][j];
            fq[j] = drive[i] * sss - kappa_i * qi[j] + imq[j] + idr[j];
            fr[j] = -kappa_i * ri[j] + imr[j];
        }
        for (int k = 0; k < K; ++k) {
            double mem = 0.0;
            for (int u = 0; u <= i; ++u) mem += tw(u, i) * M[u] * sol.s[k][u];
            fs[k] = (-kappa_i + drive[i] * c[k]) * sol.s[k][i] + mem * dt;
        }
    };

    std::vector<double> fq_cur(n + 1), fr_cur(n + 1), fs_cur(K);

    // RHS of row 0 (kappa[0] known)
    fill_kernels(0, Mprev, Dprev);
    {
        double k0 = sol.kappa[0];
        row_rhs(0, Mprev, Dprev, fq_prev, fr_prev, fs_prev, k0, false);
    }

    for (int i = 1; i <= n; ++i) {
        // predictor: copy row i-1
        for (int j = 0; j < i; ++j) {
            Q.at(i, j) = Q.at(i - 1, j);
            R.at(i, j) = R.at(i - 1, j);
        }
        Q.at(i, i) = 1.0;
        R.at(i, i) = 1.0;
        for (int k = 0; k < K; ++k) sol.s[k][i] = sol.s[k][i - 1];
        sol.kappa[i] = sol.kappa[i - 1];

        int it = 0;
        for (; it < opts.corrector_cap; ++it) {
            fill_kernels(i, Mrow, Drow);
            double kappa_i = sol.kappa[i];
            row_rhs(i, Mrow, Drow, fq_cur, fr_cur, fs_cur, kappa_i, true);

            double delta = std::abs(kappa_i - sol.kappa[i]);
            sol.kappa[i] = kappa_i;
            for (int j = 0; j < i; ++j) {
                const double qn = Q.at(i - 1, j) + 0.5 * dt * (fq_prev[j] + fq_cur[j]);
                const double rn = R.at(i - 1, j) + 0.5 * dt * (fr_prev[j] + fr_cur[j]);
                delta = std::max({delta, std::abs(qn - Q.at(i, j)), std::abs(rn - R.at(i, j))});
                Q.at(i, j) = qn;
                R.at(i, j) = rn;
            }
            for (int k = 0; k < K; ++k) {
                const double sn = sol.s[k][i - 1] + 0.5 * dt * (fs_prev[k] + fs_cur[k]);
                delta = std::max(delta, std::abs(sn - sol.s[k][i]));
                sol.s[k][i] = sn;
            }
            if (delta < opts.corrector_tol) break;
        }
        if (it >= opts.corrector_cap)
            throw NonConvergence("solve_dmft: corrector did not reach tolerance");
        sol.corrector_max_iters = std::max(sol.corrector_max_iters, it + 1);

        // mirror the symmetric entries so later column sweeps stream rows
        for (int j = 0; j < i; ++j) Q.at(j, i) = Q.at(i, j);

        fill_kernels(i, Mprev, Dprev);
        double ki = sol.kappa[i];
        row_rhs(i, Mprev, Dprev, fq_prev, fr_prev, fs_prev, ki, false);
    }
    return sol;
}

double early_outlier_trajectory(int k, double t, const DataSpectrum& spectrum,
                                const Hyper& hyper) {
    const auto bulk = spectral::SemicircleBulk::from_hyper(hyper);
    const auto tout = detachment_time(k, spectrum, hyper);
    if (!tout || t <= *tout) return bulk.edge();
    const double ck = spectrum.c[k];
    const double g = hyper.gamma / (ck * (1.0 - std::exp(-0.5 * hyper.gamma * t)));
    return 1.0 / g + g / (hyper.gamma * hyper.eta);
}

std::optional<double> detachment_time(int k, const DataSpectrum& spectrum, const Hyper& hyper) {
    const double arg = 1.0 - std::sqrt(hyper.gamma / hyper.eta) / spectrum.c[k];
    if (arg <= 0.0) return std::nullopt;
    return -2.0 / hyper.gamma * std::log(arg);
}

std::optional<double> condensation_onset_time(const DmftSolution& sol, double threshold) {
    const auto& s = sol.s[0];
    const int n = static_cast<int>(s.size()) - 1;
    if (std::abs(s[0]) <= threshold) return 0.0;
    int imin = 0;
    for (int i = 1; i <= n; ++i)
        if (std::abs(s[i]) < std::abs(s[imin])) imin = i;
    if (std::abs(s[imin]) > threshold) return std::nullopt;
    const double regrow = std::max(1e-3, 0.2 * std::abs(s[0]));
    for (int i = imin + 1; i <= n; ++i)
        if (std::abs(s[i]) > std::abs(s[imin]) + regrow) return sol.grid.t(imin);
    return std::nullopt;
}

DynParams to_invariant(const DynParams& bare, int K, int Kprime) {
    const double r = static_cast<double>(Kprime) / K;
    DynParams out;
    out.t = bare.t / r;
    out.gamma = bare.gamma * r;
    out.eta = bare.eta / r;
    out.nu = bare.nu * r;
    out.c = bare.c;
    for (auto& v : out.c) v *= r;
    return out;
}

DynParams to_bare(const DynParams& inv, int K, int Kprime) {
    const double r = static_cast<double>(Kprime) / K;
    DynParams out;
    out.t = inv.t * r;
    out.gamma = inv.gamma / r;
    out.eta = inv.eta * r;
    out.nu = inv.nu / r;
    out.c = inv.c;
    for (auto& v : out.c) v /= r;
    return out;
}

LargeKStationary large_k_stationary(double c_tilde_max, double gamma) {
    return {std::min(1.0, c_tilde_max), std::max(0.0, c_tilde_max - 1.0) / gamma};
}

}  // namespace sbmlab::dmft
