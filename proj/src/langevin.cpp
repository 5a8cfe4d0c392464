#include "sbmlab/langevin.hpp"

#include <algorithm>
#include <cmath>

#include "sbmlab/rng.hpp"

namespace sbmlab::langevin {

Eigen::MatrixXd data_directions(int N, int K) {
    // fixed-seed Gaussian block, modified Gram-Schmidt, columns scaled to sqrt(N)
    Philox rng(0x0ddc0ffeeULL, 7);
    Eigen::MatrixXd M(N, K);
    for (int j = 0; j < K; ++j)
        for (int i = 0; i < N; ++i) M(i, j) = rng.next_normal();
    for (int j = 0; j < K; ++j) {
        for (int l = 0; l < j; ++l) M.col(j) -= M.col(l).dot(M.col(j)) * M.col(l);
        M.col(j).normalize();
    }
    return std::sqrt(static_cast<double>(N)) * M;
}

TopEigs top_eigs(const Eigen::MatrixXd& A, int k) {
    const int N = static_cast<int>(A.rows());
    if (N <= 400) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        TopEigs out;
        out.vectors.resize(N, k);
        for (int j = 0; j < k; ++j) {
            out.values.push_back(es.eigenvalues()(N - 1 - j));
            out.vectors.col(j) = es.eigenvectors().col(N - 1 - j);
        }
        return out;
    }
    const int m = std::min(N, std::max(2 * k + 30, 60));
    Eigen::MatrixXd V(N, m);
    Eigen::VectorXd alpha(m), beta(m);
    Philox rng(0x1a2b3c4dULL, 11);
    Eigen::VectorXd v(N);
    for (int i = 0; i < N; ++i) v(i) = rng.next_normal();
    v.normalize();
    V.col(0) = v;
    Eigen::VectorXd w(N);
    for (int j = 0; j < m; ++j) {
        w.noalias() = A * V.col(j);
        alpha(j) = V.col(j).dot(w);
        w -= alpha(j) * V.col(j);
        if (j > 0) w -= beta(j - 1) * V.col(j - 1);
        // full reorthogonalization, twice
        for (int rep = 0; rep < 2; ++rep)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        beta(j) = w.norm();
        if (j + 1 < m) {
            if (beta(j) < 1e-12) {  // invariant subspace; pad with a random direction
                for (int i = 0; i < N; ++i) w(i) = rng.next_normal();
                w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
                w.normalize();
                beta(j) = 0.0;
                V.col(j + 1) = w;
            } else {
                V.col(j + 1) = w / beta(j);
            }
        }
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        T(j, j) = alpha(j);
        if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    TopEigs out;
    out.vectors.resize(N, k);
    for (int j = 0; j < k; ++j) {
        out.values.push_back(es.eigenvalues()(m - 1 - j));
        out.vectors.col(j).noalias() = V * es.eigenvectors().col(m - 1 - j);
    }
    return out;
}

Trajectory simulate(const SimConfig& cfg) {
    const int N = cfg.N;
    const int K = static_cast<int>(cfg.spectrum.size());
    const double dt = cfg.dt, gamma = cfg.hyper.gamma, eta = cfg.hyper.eta, nu = cfg.hyper.nu;
    const double sigma = 1.0 / std::sqrt(gamma * eta);
    const double guard = dt * std::max({nu, gamma, nu * (2.0 * sigma + 3.0)});
    if (guard >= 0.6) throw StabilityViolation("simulate: dt too large for (nu, gamma, spectrum)");

    const int steps = static_cast<int>(std::ceil(cfg.t_max / dt - 1e-12));
    const int rec_stride = std::max(1, static_cast<int>(std::llround(cfg.record_every / dt)));

    Trajectory tr;
    tr.sigma = sigma;
    tr.data_dirs = data_directions(N, K);
    const Eigen::MatrixXd& Cdir = tr.data_dirs;

    Philox rng(cfg.seed, 1);

    // W(0) from the stationary prior: GOE with off-diagonal variance
    // 1/(N gamma eta) and doubled diagonal variance
    const double w_od = 1.0 / std::sqrt(static_cast<double>(N) * gamma * eta);
    Eigen::MatrixXd W(N, N);
    for (int i = 0; i < N; ++i) {
        W(i, i) = std::sqrt(2.0) * w_od * rng.next_normal();
        for (int j = i + 1; j < N; ++j) W(i, j) = W(j, i) = w_od * rng.next_normal();
    }
    if (cfg.track_goe) tr.W_goe = W;

    // x(0) with prescribed seed overlaps and isotropic remainder
    Eigen::VectorXd x(N);
    {
        Philox xr(cfg.seed, 2);
        for (int i = 0; i < N; ++i) x(i) = xr.next_normal();
        x -= Cdir * (Cdir.transpose() * x) / static_cast<double>(N);
        double ssq = 0.0;
        for (int k = 0; k < K; ++k) ssq += cfg.s0[k] * cfg.s0[k];
        if (ssq >= 1.0) throw std::invalid_argument("simulate: sum s0^2 must be < 1");
        x *= std::sqrt(N * (1.0 - ssq)) / x.norm();
        for (int k = 0; k < K; ++k) x += cfg.s0[k] * Cdir.col(k);
    }

    const double damp = std::exp(-0.5 * gamma * dt);
    const double drift_w = (1.0 - damp) / gamma;  // ZOH weight of (C - K xx^T/N)
    const double noise_w = std::sqrt(dt) / std::sqrt(eta * static_cast<double>(N));
    const double xnoise_w = std::sqrt(2.0 * nu * dt);
    const double eps = cfg.outlier_eps_factor;

    Eigen::VectorXd Wx(N);
    Wx.noalias() = W.selfadjointView<Eigen::Lower>() * x;

    auto record = [&](double t) {
        tr.times.push_back(t);
        if (tr.s.empty()) {
            tr.s.assign(K, {});
            tr.u_sq.assign(K, {});
            tr.lambda_top.assign(K + 1, {});
        }
        const Eigen::VectorXd ov = Cdir.transpose() * x / static_cast<double>(N);
        for (int k = 0; k < K; ++k) tr.s[k].push_back(ov(k));
        tr.kappa.push_back(nu * (1.0 + x.dot(Wx) / N));
        if (cfg.track_spectrum) {
            const Eigen::MatrixXd Ws = W.selfadjointView<Eigen::Lower>();
            const auto eig = top_eigs(Ws, K + 3);
            for (int k = 0; k <= K; ++k) tr.lambda_top[k].push_back(eig.values[k]);
            int cnt = 0;
            for (double v : eig.values)
                if (v > 2.0 * sigma * (1.0 + eps)) ++cnt;
            tr.outlier_count.push_back(cnt);
            for (int k = 0; k < K; ++k) {
                double best = 0.0;
                for (int j = 0; j <= K; ++j) {
                    const double o = eig.vectors.col(j).dot(Cdir.col(k)) / N;
                    best = std::max(best, o * o);
                }
                tr.u_sq[k].push_back(best);
            }
            if (std::abs(eig.values[0]) * nu * dt >= 0.6)
                throw StabilityViolation("simulate: eigenvalue step exceeds the guard");
        }
    };

    if (cfg.track_goe) tr.x_history.push_back(x);
    record(0.0);

    Philox xr(cfg.seed, 3);
    for (int n = 1; n <= steps; ++n) {
        // weight step: exact damping, ZOH drift, symmetric noise
        W *= damp;
        for (int k = 0; k < K; ++k)
            W.selfadjointView<Eigen::Lower>().rankUpdate(
                Cdir.col(k), 0.5 * drift_w * cfg.spectrum.c[k] / N);
        W.selfadjointView<Eigen::Lower>().rankUpdate(x, -0.5 * drift_w * K / N);
        if (cfg.track_goe) tr.W_goe *= damp;
        for (int i = 0; i < N; ++i) {
            const double di = std::sqrt(2.0) * noise_w * rng.next_normal();
            W(i, i) += di;
            if (cfg.track_goe) tr.W_goe(i, i) += di;
            for (int j = i + 1; j < N; ++j) {
                const double o = noise_w * rng.next_normal();
                W(i, j) += o;
                W(j, i) += o;
                if (cfg.track_goe) {
                    tr.W_goe(i, j) += o;
                    tr.W_goe(j, i) += o;
                }
            }
        }
        // chain step + exact renormalization
        Wx.noalias() = W.selfadjointView<Eigen::Lower>() * x;
        if (nu > 0.0) {
            for (int i = 0; i < N; ++i) x(i) += dt * nu * Wx(i) + xnoise_w * xr.next_normal();
            x *= std::sqrt(static_cast<double>(N)) / x.norm();
            Wx.noalias() = W.selfadjointView<Eigen::Lower>() * x;
        }
        if (cfg.track_goe) tr.x_history.push_back(x);
        if (n % rec_stride == 0 || n == steps) record(n * dt);
    }

    // lower triangle was authoritative for the rank updates; symmetrize
    W = W.selfadjointView<Eigen::Lower>();
    tr.W = std::move(W);
    tr.x = std::move(x);
    return tr;
}

IntegratedFormReport integrated_form_check(const Trajectory& traj, const SimConfig& cfg) {
    if (traj.x_history.empty())
        throw std::invalid_argument("integrated_form_check: run simulate with track_goe");
    const int N = cfg.N;
    const int K = static_cast<int>(cfg.spectrum.size());
    const double gamma = cfg.hyper.gamma, dt = cfg.dt;
    const double tfin = (static_cast<int>(traj.x_history.size()) - 1) * dt;

    // spike term, exact; negative phase by trapezoid with exact damping
    Eigen::MatrixXd What = traj.W_goe;
    for (int k = 0; k < K; ++k)
        What.selfadjointView<Eigen::Lower>().rankUpdate(
            traj.data_dirs.col(k),
            (1.0 - std::exp(-0.5 * gamma * tfin)) / gamma * cfg.spectrum.c[k] / N);
    const int n = static_cast<int>(traj.x_history.size()) - 1;
    for (int j = 0; j <= n; ++j) {
        const double w = (j == 0 || j == n) ? 0.5 : 1.0;
        const double damp = std::exp(-0.5 * gamma * (tfin - j * dt));
        What.selfadjointView<Eigen::Lower>().rankUpdate(traj.x_history[j],
                                                        -0.5 * K * dt * w * damp / N);
    }
    What = What.selfadjointView<Eigen::Lower>();
    IntegratedFormReport rep;
    rep.max_abs_dev = (What - traj.W).cwiseAbs().maxCoeff();
    const auto e1 = top_eigs(traj.W, 1);
    const auto e2 = top_eigs(What, 1);
    rep.lambda_top_dev = std::abs(e1.values[0] - e2.values[0]);
    return rep;
}

}  // namespace sbmlab::langevin
