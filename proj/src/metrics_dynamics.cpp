#include <Eigen/Dense>
#include <cmath>

#include "sbmlab/metrics.hpp"

namespace sbmlab::metrics {

DynamicKls dynamic_kls(const std::vector<double>& times,
                       const std::vector<std::vector<double>>& s_history, const Teacher& t,
                       const Hyper& h) {
    const std::size_t K = s_history.size();
    const std::size_t n = times.size();
    if (K == 0 || s_history[0].size() != n)
        throw std::invalid_argument("dynamic_kls: s_history must be K x len(times)");
    const double w = t.omega_star;
    const double c1 = t.c1();
    std::vector<double> c(K);
    {
        const auto sp = t.spectrum();
        for (std::size_t k = 0; k < K && k < sp.size(); ++k) c[k] = sp.c[k];
    }
    const double ge = h.gamma * h.eta;
    const double theta_c = std::max(1.0, 1.0 / std::sqrt(ge));
    const double ovl = t.overlap_sq();

    DynamicKls out;
    out.t = times;
    out.forward.resize(n);
    out.reverse.resize(n);
    out.theta1.resize(n);
    out.approx_break = static_cast<std::size_t>(-1);

    // A_kj(t) = int_0^t e^{-gamma (t-u)/2} s_k(u) s_j(u) du, marched with the
    // exact exponential damping and trapezoidal increments
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
    Eigen::MatrixXd F_prev = Eigen::MatrixXd::Zero(K, K);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < K; ++j) F_prev(k, j) = s_history[k][0] * s_history[j][0];

    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double dt = times[i] - times[i - 1];
            const double damp = std::exp(-0.5 * h.gamma * dt);
            Eigen::MatrixXd F(K, K);
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t j = 0; j < K; ++j) F(k, j) = s_history[k][i] * s_history[j][i];
            A = damp * A + 0.5 * dt * (damp * F_prev + F);
            F_prev = F;
        }
        const double spike = (1.0 - std::exp(-0.5 * h.gamma * times[i])) / h.gamma;
        Eigen::MatrixXd T = -A;
        for (std::size_t k = 0; k < K; ++k) T(k, k) += spike * c[k];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double th1 = es.eigenvalues()(K - 1);
        const double tvec_c1 = es.eigenvectors()(0, K - 1);
        out.theta1[i] = th1;

        double g_t, mu_t;
        if (th1 <= theta_c) {
            g_t = std::min(1.0, std::sqrt(ge));
        } else {
            g_t = 1.0 / th1;
        }
        mu_t = g_t / ge + 1.0 / g_t;
        const double h_sq = std::max(0.0, 1.0 - g_t);

        out.forward[i] = 0.5 * std::log(w) - 0.5 +
                         0.5 * (mu_t + std::log(g_t) - 0.5 * g_t * g_t / ge) -
                         0.5 * (1.0 - 1.0 / w) * ovl * (spike * c1 - A(0, 0));
        const double usq = std::max(0.0, 1.0 - 1.0 / (ge * th1 * th1));
        out.reverse[i] = 0.5 * (w - 1.0 - std::log(w)) - 0.5 * std::log(g_t) +
                         0.25 * g_t * g_t / ge -
                         0.5 * w * h_sq * usq * ovl * tvec_c1 * tvec_c1;

        if (out.approx_break == static_cast<std::size_t>(-1) &&
            s_history[0][i] * s_history[0][i] > c1 / h.gamma)
            out.approx_break = i;
    }
    return out;
}

double early_stopping_theta(const Teacher& t, const Hyper& h) {
    const double w = t.omega_star;
    const double m = w * (1.0 - 1.0 / (2.0 * w - 1.0));
    return 0.5 * (m + std::sqrt(m * m + 4.0 / (h.gamma * h.eta)));
}

double early_stopping_time(const Teacher& t, const Hyper& h) {
    const double th = early_stopping_theta(t, h);
    const double arg = 1.0 - h.gamma * th / t.c1();
    if (arg <= 0.0)
        throw NoFiniteTime("early_stopping_time: spike never reaches theta*");
    return -2.0 / h.gamma * std::log(arg);
}

}  // namespace sbmlab::metrics
