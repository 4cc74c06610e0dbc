#include "fhc/covariance.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace fhc::cov {

DriftOperator::DriftOperator(const ModelParams& params) : n_(params.n) {
    const int n = n_;
    const double g = params.gamma, gt = params.gamma_tilde;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(8 * n);
    // r rows: -(div p)_x = -(p_x - p_{x-1}), r-index x = 1..n at row x-1
    for (int x = 1; x <= n; ++x) {
        trip.emplace_back(x - 1, n + x, -1.0);
        trip.emplace_back(x - 1, n + x - 1, 1.0);
    }
    // p rows: -(grad r)_x with zero padding
    for (int x = 0; x <= n; ++x) {
        const int row = n + x;
        if (x < n) trip.emplace_back(row, x, -1.0);        // -r_{x+1}
        if (x >= 1) trip.emplace_back(row, x - 1, 1.0);    // +r_x
    }
    // p rows: -gamma Lap_N + gamma_tilde E
    for (int x = 0; x <= n; ++x) {
        const int row = n + x;
        const double diag = (x == 0 || x == n) ? 1.0 : 2.0;
        trip.emplace_back(row, n + x, g * diag);
        if (x > 0) trip.emplace_back(row, n + x - 1, -g);
        if (x < n) trip.emplace_back(row, n + x + 1, -g);
    }
    trip.emplace_back(n, n, gt);
    trip.emplace_back(2 * n, 2 * n, gt);

    A_.resize(2 * n + 1, 2 * n + 1);
    A_.setFromTriplets(trip.begin(), trip.end());
    A_.makeCompressed();

    norm1_ = 0.0;
    MatrixXd Ad(A_);
    for (int c = 0; c < Ad.cols(); ++c) norm1_ = std::max(norm1_, Ad.col(c).cwiseAbs().sum());
}

VectorXd exchange_variances(const CovarianceState& st) {
    const int n = st.n;
    auto Spp = st.S_pp();
    VectorXd x(n);
    for (int y = 1; y <= n; ++y)
        x[y - 1] = Spp(y, y) + Spp(y - 1, y - 1) - 2.0 * Spp(y, y - 1);
    return x;
}

MatrixXd noise_matrix(const VectorXd& x, const ModelParams& params) {
    const int n = params.n;
    if (x.size() != n) throw lattice::DimensionError("noise_matrix: x must have length n");
    const int d = 2 * n + 1;
    MatrixXd S2 = MatrixXd::Zero(d, d);
    auto pp = S2.bottomRightCorner(n + 1, n + 1);
    const double g = params.gamma;
    for (int y = 1; y <= n; ++y) {
        const double v = g * x[y - 1];
        pp(y - 1, y - 1) += v;
        pp(y, y) += v;
        pp(y - 1, y) -= v;
        pp(y, y - 1) -= v;
    }
    pp(0, 0) += 2.0 * params.gamma_tilde * params.T_L;
    pp(n, n) += 2.0 * params.gamma_tilde * params.T_R;
    return S2;
}

MatrixXd covariance_rhs(const CovarianceState& st, const ModelParams& params,
                        const DriftOperator& A) {
    if (st.S.rows() != 2 * st.n + 1 || st.S.cols() != st.S.rows())
        throw lattice::DimensionError("covariance_rhs: S must be (2n+1) x (2n+1)");
    MatrixXd P = A.sparse() * st.S;
    MatrixXd rhs = -P - P.transpose() + noise_matrix(exchange_variances(st), params);
    return rhs;
}

EvolveResult evolve_covariance(const CovarianceState& S0, const ModelParams& params,
                               double t_macro, const std::vector<double>& record_times,
                               const EvolveOptions& opts) {
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        throw ParameterError("evolve_covariance: record_times must be sorted");
    if (!record_times.empty() &&
        (record_times.front() < 0.0 || record_times.back() > t_macro + 1e-12))
        throw ParameterError("evolve_covariance: record_times must lie in [0, t_macro]");

    const DriftOperator A(params);
    const int n = params.n;
    const double ts = params.time_scale();
    const double dt = (opts.dt > 0.0) ? opts.dt : 0.25 / A.norm_1();
    const double trace_cap = 1e9 * std::max(1.0, S0.S.trace());

    EvolveResult res;
    res.S_initial = S0.S;

    MatrixXd S = S0.S;
    MatrixXd Q = MatrixXd::Zero(S.rows(), S.cols());
    double tau = 0.0;

    auto rhs = [&](const MatrixXd& M) {
        CovarianceState tmp{M, 0.0, n};
        return covariance_rhs(tmp, params, A);
    };

    auto record = [&](double t_k) {
        CovarianceState snap{S, t_k, n};
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()),
                                                   Eigen::EigenvaluesOnly);
        const double ratio = es.eigenvalues().minCoeff() / std::max(1e-300, S.trace());
        res.min_eig_ratio = std::min(res.min_eig_ratio, ratio);
        if (ratio < -opts.psd_tol)
            throw IntegratorError("evolve_covariance: PSD violated at record time");
        res.snapshots.push_back(std::move(snap));
        res.quadrature.push_back(Q);
    };

    std::size_t k = 0;
    while (k < record_times.size() && ts * record_times[k] <= tau + 1e-12) {
        record(record_times[k]);
        ++k;
    }
    const double tau_end = ts * t_macro;
    MatrixXd k1, k2, k3, k4, tmp;
    while (tau < tau_end - 1e-12) {
        double step = std::min(dt, tau_end - tau);
        if (k < record_times.size()) step = std::min(step, ts * record_times[k] - tau);

        k1 = rhs(S);
        tmp = S + (0.5 * step) * k1;
        k2 = rhs(tmp);
        MatrixXd q2 = tmp;                      // dQ/dtau stage values
        tmp = S + (0.5 * step) * k2;
        k3 = rhs(tmp);
        MatrixXd q3 = tmp;
        tmp = S + step * k3;
        k4 = rhs(tmp);
        if (opts.with_quadrature)
            Q += (step / 6.0) * (S + 2.0 * q2 + 2.0 * q3 + tmp);
        S += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau += step;

        if (!(S.trace() < trace_cap))
            throw IntegratorError("evolve_covariance: trace blow-up, step too large (tau=" +
                                  std::to_string(tau) + ")");
        while (k < record_times.size() && ts * record_times[k] <= tau + 1e-9) {
            record(record_times[k]);
            ++k;
        }
    }
    while (k < record_times.size()) { record(record_times[k]); ++k; }
    return res;
}

EnergyProfile energy_profile_from_covariance(const CovarianceState& st) {
    const int n = st.n;
    EnergyProfile prof;
    prof.t = st.t;
    prof.e.resize(n + 1);
    prof.stderr_ = VectorXd::Zero(n + 1);
    prof.stderr_defined = false;
    auto rr = st.S_rr();
    auto pp = st.S_pp();
    for (int x = 0; x <= n; ++x) {
        const double r2 = (x == 0) ? 0.0 : rr(x - 1, x - 1);
        prof.e[x] = 0.5 * (pp(x, x) + r2);
    }
    return prof;
}

CurrentRecord currents_from_quadrature(const MatrixXd& Q, const ModelParams& params, double t) {
    const int n = params.n;
    const double ts = params.time_scale();
    const double tau_end = ts * t;
    auto Qrp = Q.topRightCorner(n, n + 1);
    auto Qpp = Q.bottomRightCorner(n + 1, n + 1);
    CurrentRecord cr;
    cr.t = t;
    cr.mech.resize(n);
    cr.noise.resize(n);
    for (int x = 0; x < n; ++x) {
        cr.mech[x] = -Qrp(x, x) / ts;   // -int E[p_x r_{x+1}]
        cr.noise[x] = -0.5 * params.gamma * (Qpp(x + 1, x + 1) - Qpp(x, x)) / ts;
    }
    cr.left = params.gamma_tilde * (params.T_L * tau_end - Qpp(0, 0)) / ts;
    cr.right = params.gamma_tilde * (Qpp(n, n) - params.T_R * tau_end) / ts;
    return cr;
}

double equipartition_statistic(const MatrixXd& Q, const ModelParams& params, double t,
                               const std::function<double(double)>& phi) {
    const int n = params.n;
    const double ts = params.time_scale();
    auto Qrr = Q.topLeftCorner(n, n);
    auto Qpp = Q.bottomRightCorner(n + 1, n + 1);
    double acc = 0.0;
    for (int x = 0; x <= n; ++x) {
        const double qr = (x == 0) ? 0.0 : Qrr(x - 1, x - 1);
        acc += phi(static_cast<double>(x) / (n + 1)) * (Qpp(x, x) - qr);
    }
    return acc / ((n + 1) * ts * t);
}

FourierSystemData build_fourier_data(const MatrixXd& S_begin, const MatrixXd& S_end,
                                     const MatrixXd& Q, const ModelParams& params, double t,
                                     const lattice::NeumannBasis& nb,
                                     const lattice::DirichletBasis& db) {
    const int n = params.n;
    const double ts = params.time_scale();
    const MatrixXd& Phi = db.vectors();       // n x n, col j-1 = phi_j
    const MatrixXd& Psi = nb.vectors();       // (n+1) x (n+1), col j = psi_j

    auto Irr = Q.topLeftCorner(n, n) / ts;    // <S^{(r)}>_t etc.
    auto Irp = Q.topRightCorner(n, n + 1) / ts;
    auto Ipp = Q.bottomRightCorner(n + 1, n + 1) / ts;

    FourierSystemData d;
    // transforms restricted to 1..n in both indices (stored 0-based)
    d.Sr = Phi.transpose() * Irr * Phi;
    MatrixXd Srp_full = Phi.transpose() * Irp * Psi;   // n x (n+1), cols = Neumann j'
    d.Srp = Srp_full.rightCols(n);
    d.Spr = d.Srp.transpose();

    MatrixXd Sp_full = Psi.transpose() * Ipp * Psi;
    d.Sp = Sp_full.block(1, 1, n, n);

    // F_{j,j'} = gamma gamma_j gamma_j' sum_y phi_j(y) phi_j'(y) <(div p)_y^2>_t
    VectorXd xq(n);
    for (int y = 1; y <= n; ++y)
        xq[y - 1] = (Ipp(y, y) + Ipp(y - 1, y - 1) - 2.0 * Ipp(y, y - 1));
    MatrixXd Fcore = Phi.transpose() * xq.asDiagonal() * Phi;
    d.F.resize(n, n);
    for (int j = 1; j <= n; ++j)
        for (int jp = 1; jp <= n; ++jp)
            d.F(j - 1, jp - 1) = params.gamma * nb.gamma(j) * nb.gamma(jp) * Fcore(j - 1, jp - 1);

    // boundary couplings
    MatrixXd M1 = Phi.transpose() * Irp;               // <r~_j p_x>, n x (n+1)
    MatrixXd M2 = Psi.transpose() * Ipp;               // <p~_j p_x>, (n+1) x (n+1)
    d.B_pr.resize(n, n);
    d.B_p.resize(n, n);
    for (int j = 1; j <= n; ++j) {
        for (int jp = 1; jp <= n; ++jp) {
            d.B_pr(j - 1, jp - 1) =
                nb.psi(j, 0) * M1(jp - 1, 0) + nb.psi(j, n) * M1(jp - 1, n);
            d.B_p(j - 1, jp - 1) =
                2.0 * t * (params.T_L * nb.psi(j, 0) * nb.psi(jp, 0) +
                           params.T_R * nb.psi(j, n) * nb.psi(jp, n)) -
                (nb.psi(j, 0) * M2(jp, 0) + nb.psi(j, n) * M2(jp, n) +
                 nb.psi(jp, 0) * M2(j, 0) + nb.psi(jp, n) * M2(j, n));
        }
    }
    d.B_rp = d.B_pr.transpose();

    // time-boundary terms (1/n^{3/2}) [S~(0) - S~(t)]
    auto dblock = [&](const MatrixXd& M) { return MatrixXd(M / ts); };
    MatrixXd D = S_begin - S_end;
    MatrixXd Drr = Phi.transpose() * D.topLeftCorner(n, n) * Phi;
    MatrixXd Drp = Phi.transpose() * D.topRightCorner(n, n + 1) * Psi;
    MatrixXd Dpp = Psi.transpose() * D.bottomRightCorner(n + 1, n + 1) * Psi;
    d.R_r = dblock(Drr);
    d.R_rp = dblock(Drp.rightCols(n));
    d.R_pr = d.R_rp.transpose();
    d.R_p = dblock(Dpp.block(1, 1, n, n));
    return d;
}

FourierReport verify_fourier_system(const FourierSystemData& d, const ModelParams& params,
                                    const lattice::NeumannBasis& nb) {
    const int n = static_cast<int>(d.Sr.rows());
    const double g = params.gamma, gt = params.gamma_tilde;
    FourierReport rep;
    rep.modes_excluded = 2 * n + 1;   // pairs with j = 0 or j' = 0
    for (int j = 1; j <= n; ++j) {
        const double gj = nb.gamma(j), lj = nb.lambda(j);
        for (int jp = 1; jp <= n; ++jp) {
            const double gjp = nb.gamma(jp), ljp = nb.lambda(jp);
            const int a = j - 1, b = jp - 1;
            const double e1 = gjp * d.Srp(a, b) + gj * d.Spr(a, b) - d.R_r(a, b);
            const double e2 = -gj * d.Sr(a, b) + g * lj * d.Spr(a, b) + gjp * d.Sp(a, b) -
                              (d.R_pr(a, b) - gt * d.B_pr(a, b));
            const double e3 = -gjp * d.Sr(a, b) + g * ljp * d.Srp(a, b) + gj * d.Sp(a, b) -
                              (d.R_rp(a, b) - gt * d.B_rp(a, b));
            const double e4 = -gj * d.Srp(a, b) - gjp * d.Spr(a, b) +
                              g * (lj + ljp) * d.Sp(a, b) -
                              (d.R_p(a, b) + gt * d.B_p(a, b) + d.F(a, b));
            for (double e : {e1, e2, e3, e4})
                rep.max_residual = std::max(rep.max_residual, std::abs(e));
            for (double v : {d.Sp(a, b), d.Sr(a, b), d.F(a, b), d.B_p(a, b)})
                rep.scale = std::max(rep.scale, std::abs(v));
            ++rep.modes_checked;
        }
    }
    return rep;
}

ModePairSolution closed_form_solution_map(double c, double cp, double F, double B_pr,
                                          double B_rp, double B_p, double R_p, double R_pr,
                                          double R_rp, double R_r, const ModelParams& params) {
    const double g = params.gamma, gt = params.gamma_tilde;
    const double th = (c - cp) * (c - cp) + 2.0 * g * g * c * cp * (c + cp);
    if (!(th > 0.0))
        throw ParameterError("closed_form_solution_map: singular mode pair (lambda_j = lambda_j' = 0)");
    const double sc = std::sqrt(c), scp = std::sqrt(cp);

    const double Theta_p = 2.0 * g * c * cp / th;
    const double Theta_pr = (c - cp) * scp / th;
    const double Theta_r = g * (c + cp) * sc * scp / th;

    // Xi^{(iota)}_{iota'}; B has no r-component (Pi^{(.)}_r = 0)
    const double Xi_p_pr = scp * (cp - c) / th;
    const double Xi_p_rp = sc * (c - cp) / th;
    const double Xi_p_r = g * sc * scp * (c + cp) / th;
    const double Xi_pr_pr = g * cp * (c + cp) / th;
    const double Xi_pr_rp = -g * sc * scp * (c + cp) / th;
    const double Xi_pr_r = sc * (c - cp + g * g * cp * (c + cp)) / th;
    const double Xi_r_pr = sc * (cp - c - g * g * cp * (c + cp)) / th;
    const double Xi_r_rp = scp * (c - cp - g * g * c * (c + cp)) / th;
    const double Xi_r_r = g * (c * c + cp * cp + g * g * c * cp * (c + cp)) / th;

    ModePairSolution out;
    out.Sp = Theta_p * (F + gt * B_p + R_p) + Xi_p_pr * (R_pr - gt * B_pr) +
             Xi_p_rp * (R_rp - gt * B_rp) + Xi_p_r * R_r;
    out.Spr = Theta_pr * (F + gt * B_p + R_p) + Xi_pr_pr * (R_pr - gt * B_pr) +
              Xi_pr_rp * (R_rp - gt * B_rp) + Xi_pr_r * R_r;
    out.Sr = Theta_r * (F + gt * B_p + R_p) + Xi_r_pr * (R_pr - gt * B_pr) +
             Xi_r_rp * (R_rp - gt * B_rp) + Xi_r_r * R_r;

    // S^{(rp)}(j,j') = S^{(pr)}(j',j): same formulas with (c,c') swapped and
    // the pr/rp components of B and R exchanged.
    {
        const double c2 = cp, cp2 = c;
        const double sc2 = scp, scp2 = sc;
        const double Theta_pr2 = (c2 - cp2) * scp2 / th;
        const double Xi_pr_pr2 = g * cp2 * (c2 + cp2) / th;
        const double Xi_pr_rp2 = -g * sc2 * scp2 * (c2 + cp2) / th;
        const double Xi_pr_r2 = sc2 * (c2 - cp2 + g * g * cp2 * (c2 + cp2)) / th;
        out.Srp = Theta_pr2 * (F + gt * B_p + R_p) + Xi_pr_pr2 * (R_rp - gt * B_rp) +
                  Xi_pr_rp2 * (R_pr - gt * B_pr) + Xi_pr_r2 * R_r;
    }
    return out;
}

double gaussian_relative_entropy(const MatrixXd& S, double T) {
    if (!(T > 0.0)) throw ParameterError("gaussian_relative_entropy: T must be positive");
    const int d = static_cast<int>(S.rows());
    Eigen::LLT<MatrixXd> llt(0.5 * (S + S.transpose()));
    if (llt.info() != Eigen::Success)
        throw std::domain_error("gaussian_relative_entropy: S must be positive definite");
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return 0.5 * (S.trace() / T - d - (logdet - d * std::log(T)));
}

}  // namespace fhc::cov
