#include "fhc/pde.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "fhc/quadrature.hpp"
#include "fhc/rng.hpp"

namespace fhc::pde {

double cosine_basis(int l, double u) {
    return (l == 0) ? 1.0 : std::sqrt(2.0) * std::cos(M_PI * l * u);
}

double SpectralTemperature::value(double u) const {
    double s = a[0];
    const double sq2 = std::sqrt(2.0);
    for (int l = 1; l < a.size(); ++l) s += a[l] * sq2 * std::cos(M_PI * l * u);
    return s;
}

VectorXd SpectralTemperature::values(const VectorXd& grid) const {
    VectorXd out(grid.size());
    for (int i = 0; i < grid.size(); ++i) out[i] = value(grid[i]);
    return out;
}

double SpectralTemperature::even_constraint() const {
    double s = a[0];
    for (int l = 2; l < a.size(); l += 2) s += a[l] * std::sqrt(2.0);
    return s;
}

double SpectralTemperature::odd_constraint() const {
    double s = 0.0;
    for (int l = 1; l < a.size(); l += 2) s += a[l] * std::sqrt(2.0);
    return s;
}

double SpectralTemperature::h34_norm_sq() const {
    double s = 0.0;
    for (int l = 1; l < a.size(); ++l) s += std::pow(M_PI * l, 1.5) * a[l] * a[l];
    return s;
}

SpectralTemperature spectral_from_profile(const std::function<double(double)>& profile, int N,
                                          double T_L, double T_R, int quad_panels) {
    SpectralTemperature T;
    T.T_L = T_L;
    T.T_R = T_R;
    T.a.resize(N + 1);
    for (int l = 0; l <= N; ++l)
        T.a[l] = quad::gl_panels([&](double u) { return profile(u) * cosine_basis(l, u); }, 0.0,
                                 1.0, quad_panels);
    // project the truncation residual of the two constraints out, sector-wise
    const double sq2 = std::sqrt(2.0);
    {
        double viol = 0.5 * (T_L + T_R) - T.even_constraint();
        double norm2 = 1.0;
        for (int l = 2; l <= N; l += 2) norm2 += 2.0;
        T.a[0] += viol * 1.0 / norm2;
        for (int l = 2; l <= N; l += 2) T.a[l] += viol * sq2 / norm2;
    }
    {
        double viol = 0.5 * (T_L - T_R) - T.odd_constraint();
        double norm2 = 0.0;
        for (int l = 1; l <= N; l += 2) norm2 += 2.0;
        for (int l = 1; l <= N; l += 2) T.a[l] += viol * sq2 / norm2;
    }
    return T;
}

double khat_unit(int l, int lp) {
    const double a = M_PI * l, b = M_PI * lp;
    if (l < 1 || lp < 1) return 0.0;
    const double sab = std::sqrt(a * b);
    return sab * (a + b + sab) / ((std::sqrt(a) + std::sqrt(b)) * (a + b));
}

GalerkinSystem build_galerkin(const ModelParams& params, int N) {
    if (N < 8 || N % 2 != 0) throw ParameterError("build_galerkin: N must be even and >= 8");
    GalerkinSystem sys;
    sys.N = N;
    sys.params = params;
    const double cb = params.c_bulk();
    const double bd = std::pow(2.0, 2.5) * M_PI * params.c_bd();
    const int ne = N / 2 + 1, no = N / 2;

    sys.M_even.setZero(ne, ne);
    sys.delta_even.resize(ne);
    for (int i = 0; i < ne; ++i) {
        const int m = 2 * i;
        sys.delta_even[i] = cosine_basis(m, 0.0);
        for (int j = 0; j < ne; ++j) {
            const int mp = 2 * j;
            double v = (m >= 1 && mp >= 1) ? bd * khat_unit(m, mp) : 0.0;
            if (i == j && m >= 1) v += cb * std::pow(M_PI * m, 1.5);
            sys.M_even(i, j) = v;
        }
    }
    sys.M_odd.setZero(no, no);
    sys.delta_odd.resize(no);
    for (int i = 0; i < no; ++i) {
        const int m = 2 * i + 1;
        sys.delta_odd[i] = cosine_basis(m, 0.0);
        for (int j = 0; j < no; ++j) {
            const int mp = 2 * j + 1;
            double v = bd * khat_unit(m, mp);
            if (i == j) v += cb * std::pow(M_PI * m, 1.5);
            sys.M_odd(i, j) = v;
        }
    }
    return sys;
}

StationaryProfile stationary_profile(const GalerkinSystem& sys, double T_L, double T_R) {
    StationaryProfile sp;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sys.M_odd);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("stationary_profile: odd-sector eigen-solve failed");
    sp.odd_eigenvalues = es.eigenvalues();
    sp.odd_eigenvectors = es.eigenvectors();

    // theta_s = M_o^{-1} delta_o assembled from the eigenpairs
    const int no = sys.odd_size();
    VectorXd theta_s = VectorXd::Zero(no);
    for (int m = 0; m < no; ++m) {
        const double proj = sp.odd_eigenvectors.col(m).dot(sys.delta_odd);
        theta_s += (proj / sp.odd_eigenvalues[m]) * sp.odd_eigenvectors.col(m);
    }
    const double dth = sys.delta_odd.dot(theta_s);   // delta_theta_s / 2
    sp.delta_theta_s = 2.0 * dth;

    sp.T_s.T_L = T_L;
    sp.T_s.T_R = T_R;
    sp.T_s.a = VectorXd::Zero(sys.N + 1);
    sp.T_s.a[0] = 0.5 * (T_L + T_R);
    const double scale = 0.5 * (T_L - T_R) / dth;
    for (int i = 0; i < no; ++i) sp.T_s.a[2 * i + 1] = scale * theta_s[i];
    return sp;
}

namespace {

struct SectorStepper {
    const MatrixXd& M;
    const VectorXd& delta;
    double target;
    double dt_cached = -1.0;
    Eigen::LLT<MatrixXd> llt;
    VectorXd Binv_delta;

    SectorStepper(const MatrixXd& M_, const VectorXd& d_, double tgt) : M(M_), delta(d_), target(tgt) {}

    void refactor(double dt) {
        if (dt == dt_cached) return;
        const int n = static_cast<int>(M.rows());
        MatrixXd B = MatrixXd::Identity(n, n) + 0.5 * dt * M;
        llt.compute(B);
        Binv_delta = llt.solve(delta);
        dt_cached = dt;
    }

    void step(VectorXd& a, double dt) {
        refactor(dt);
        VectorXd rhs = a - 0.5 * dt * (M * a);
        VectorXd y = llt.solve(rhs);
        const double c = (target - delta.dot(y)) / (dt * delta.dot(Binv_delta));
        a = y + dt * c * Binv_delta;
    }
};

}  // namespace

PdeTrajectory solve_evolution(const SpectralTemperature& ini, const GalerkinSystem& sys,
                              double t_end, const std::vector<double>& record_times,
                              const EvolveOptions& opts) {
    if (ini.cutoff() != sys.N)
        throw ParameterError("solve_evolution: coefficient cutoff does not match the system");
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        throw ParameterError("solve_evolution: record_times must be sorted");
    const double tgt_e = 0.5 * (ini.T_L + ini.T_R), tgt_o = 0.5 * (ini.T_L - ini.T_R);
    if (std::abs(ini.even_constraint() - tgt_e) > opts.constraint_tol ||
        std::abs(ini.odd_constraint() - tgt_o) > opts.constraint_tol)
        throw ParameterError("solve_evolution: initial data violates the boundary constraints");

    const int N = sys.N;
    VectorXd ae(sys.even_size()), ao(sys.odd_size());
    for (int i = 0; i < ae.size(); ++i) ae[i] = ini.a[2 * i];
    for (int i = 0; i < ao.size(); ++i) ao[i] = ini.a[2 * i + 1];

    SectorStepper se(sys.M_even, sys.delta_even, tgt_e);
    SectorStepper so(sys.M_odd, sys.delta_odd, tgt_o);

    const double lam_max = sys.params.c_bulk() * std::pow(M_PI * N, 1.5);
    double dt = (opts.dt0 > 0) ? opts.dt0 : 1e-3 / lam_max;
    const double dt_max = (opts.dt_max > 0) ? opts.dt_max : 0.05;

    PdeTrajectory out;
    auto assemble = [&](double t) {
        SpectralTemperature s;
        s.T_L = ini.T_L;
        s.T_R = ini.T_R;
        s.a = VectorXd::Zero(N + 1);
        for (int i = 0; i < ae.size(); ++i) s.a[2 * i] = ae[i];
        for (int i = 0; i < ao.size(); ++i) s.a[2 * i + 1] = ao[i];
        out.times.push_back(t);
        out.states.push_back(std::move(s));
    };

    double t = 0.0;
    std::size_t k = 0;
    while (k < record_times.size() && record_times[k] <= 1e-15) { assemble(0.0); ++k; }
    while (t < t_end - 1e-14) {
        double step = std::min(dt, t_end - t);
        if (k < record_times.size()) step = std::min(step, record_times[k] - t);
        if (step > 1e-16) {
            se.step(ae, step);
            so.step(ao, step);
            t += step;
        }
        while (k < record_times.size() && record_times[k] <= t + 1e-12) { assemble(record_times[k]); ++k; }
        dt = std::min(dt * opts.growth, dt_max);
    }
    while (k < record_times.size()) { assemble(record_times[k]); ++k; }
    return out;
}

EigenScalingReport eigen_scaling_report(const GalerkinSystem& sys) {
    EigenScalingReport rep;
    Eigen::SelfAdjointEigenSolver<MatrixXd> ee(sys.M_even), eo(sys.M_odd);
    rep.even_eigenvalues = ee.eigenvalues();
    rep.odd_eigenvalues = eo.eigenvalues();
    rep.odd_lambda1 = eo.eigenvalues()[0];

    const double tol = 1e-12 * rep.even_eigenvalues.maxCoeff();
    for (int i = 0; i < rep.even_eigenvalues.size(); ++i)
        if (rep.even_eigenvalues[i] < tol) ++rep.even_near_zero;

    auto fit = [&](const VectorXd& lam, int skip_zero) {
        // least squares on (log m, log lambda_m), m in [4, N/4]
        const int lo = 4, hi = std::max(lo + 3, sys.N / 4);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (int m = lo; m <= hi && m + skip_zero <= lam.size(); ++m) {
            const double x = std::log(static_cast<double>(m));
            const double y = std::log(lam[m - 1 + skip_zero]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++cnt;
        }
        return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    };
    rep.even_exponent = fit(rep.even_eigenvalues, rep.even_near_zero);
    rep.odd_exponent = fit(rep.odd_eigenvalues, 0);
    return rep;
}

PointwiseReconstruction reconstruct_pointwise(const SpectralTemperature& T, const VectorXd& grid) {
    PointwiseReconstruction rec;
    rec.values = T.values(grid);
    // decay fit |a_l| ~ C l^{-p} over the top quarter of the spectrum
    const int N = T.cutoff();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int l = std::max(2, 3 * N / 4); l <= N; ++l) {
        const double al = std::abs(T.a[l]);
        if (al < 1e-300) continue;
        const double x = std::log(static_cast<double>(l)), y = std::log(al);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt >= 3) {
        const double p = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        const double logC = (sy + p * sx) / cnt;
        if (p > 1.0)
            rec.tail_bound = std::sqrt(2.0) * std::exp(logC) * std::pow(N + 1.0, 1.0 - p) / (p - 1.0);
        else
            rec.tail_bound = std::numeric_limits<double>::infinity();
    }
    return rec;
}

double quartic_integral(double A) {
    const double L = 10.0 * std::pow(A, 0.25) + 1.0;
    double v = quad::gl_panels([&](double s) { return 1.0 / (s * s * s * s + A); }, 0.0, L,
                               std::max(16, static_cast<int>(L)));
    double mult = 1.0;
    for (int k = 0; k < 40; ++k) {
        const double term = mult / ((4 * k + 3) * std::pow(L, 4 * k + 3));
        v += (k % 2 == 0 ? term : -term);
        mult *= A;
        if (term < 1e-22) break;
    }
    return v;
}

double quartic_integral2(double A) {
    const double L = 10.0 * std::pow(A, 0.25) + 1.0;
    double v = quad::gl_panels(
        [&](double s) {
            const double d = s * s * s * s + A;
            return 1.0 / (d * d);
        },
        0.0, L, std::max(16, static_cast<int>(L)));
    double mult = 1.0;
    for (int k = 0; k < 40; ++k) {
        const double term = (k + 1.0) * mult / ((4 * k + 7) * std::pow(L, 4 * k + 7));
        v += (k % 2 == 0 ? term : -term);
        mult *= A;
        if (term < 1e-22) break;
    }
    return v;
}

namespace {
double cached_quartic(int l) {
    static std::vector<double> cache;
    if (l >= static_cast<int>(cache.size())) {
        const int old = static_cast<int>(cache.size());
        cache.resize(l + 1);
        for (int i = old; i <= l; ++i)
            cache[i] = (i == 0) ? 0.0 : quartic_integral(std::pow(M_PI * i, 2));
    }
    return cache[l];
}
}  // namespace

double boundary_pair_integral(int l, int lp) {
    if (l < 1 || lp < 1) return 0.0;
    const double A = std::pow(M_PI * l, 2), B = std::pow(M_PI * lp, 2);
    if (l == lp) return 4.0 * A * A * quartic_integral2(A);
    return 4.0 * A * B * (cached_quartic(l) - cached_quartic(lp)) / (B - A);
}

double weak_form_residual(const SpectralTemperature& T, const ModelParams& params,
                          const VectorXd& phi_hat) {
    const int Np = static_cast<int>(phi_hat.size()) - 1;
    double p0 = 0.0, p1 = 0.0;
    for (int l = 0; l <= Np; ++l) {
        p0 += phi_hat[l] * cosine_basis(l, 0.0);
        p1 += phi_hat[l] * cosine_basis(l, 1.0);
    }
    if (std::abs(p0) > 1e-9 || std::abs(p1) > 1e-9)
        throw ParameterError("weak_form_residual: test function must vanish at the boundary");

    const int NT = T.cutoff();
    double bulk = 0.0;
    for (int l = 1; l <= std::min(Np, NT); ++l)
        bulk += std::pow(M_PI * l, 1.5) * phi_hat[l] * T.a[l];

    double boundary = 0.0;
    for (int v = 0; v <= 1; ++v) {
        for (int l = 1; l <= Np; ++l) {
            if (phi_hat[l] == 0.0) continue;
            const double cl = cosine_basis(l, static_cast<double>(v));
            for (int lp = 1; lp <= NT; ++lp) {
                if (T.a[lp] == 0.0) continue;
                const double clp = cosine_basis(lp, static_cast<double>(v));
                boundary += phi_hat[l] * cl * T.a[lp] * clp * boundary_pair_integral(l, lp);
            }
        }
    }
    return -params.c_bulk() * bulk - params.c_bd() * boundary;
}

// ---------------------------------------------------------------------------
// jump-process Monte Carlo
// ---------------------------------------------------------------------------

namespace {

// Walker alias table for O(1) discrete sampling
struct AliasTable {
    std::vector<double> prob;
    std::vector<int> alias;

    void build(const std::vector<double>& w) {
        const int n = static_cast<int>(w.size());
        prob.assign(n, 0.0);
        alias.assign(n, 0);
        double total = 0.0;
        for (double x : w) total += x;
        std::vector<double> scaled(n);
        for (int i = 0; i < n; ++i) scaled[i] = w[i] * n / total;
        std::vector<int> small, large;
        for (int i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
        while (!small.empty() && !large.empty()) {
            const int s = small.back(); small.pop_back();
            const int l = large.back(); large.pop_back();
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] = scaled[l] + scaled[s] - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (int i : small) prob[i] = 1.0;
        for (int i : large) prob[i] = 1.0;
    }

    int sample(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const int n = static_cast<int>(prob.size());
        const double u = unif(rng) * n;
        const int i = std::min(n - 1, static_cast<int>(u));
        return (u - i < prob[i]) ? i : alias[i];
    }
};

// exact antiderivative of |w|^{-5/2} (valid away from 0)
double anti_m52(double w) {
    return (w > 0) ? -(2.0 / 3.0) / (w * std::sqrt(w)) : (2.0 / 3.0) / (-w * std::sqrt(-w));
}

}  // namespace

JumpMCResult jump_mc_profile(const ModelParams& params, double t,
                             const std::function<double(double)>& T_ini,
                             const kernels::KernelTable& table, const JumpMCOptions& opts) {
    JumpMCResult res;
    res.t = t;

    auto gate = kernels::rate_sign_report(params, opts.sign_grid);
    res.gate_passed = gate.all_nonnegative;
    {
        std::ostringstream ss;
        ss << "rate sign gate: min r = " << gate.min_value << " at (u,u') = (" << gate.min_u
           << "," << gate.min_up << ") on a " << opts.sign_grid << "^2 grid";
        res.gate_report = ss.str();
    }
    if (!res.gate_passed && !opts.force) return res;

    const int C = opts.cells;
    const double du = 1.0 / C;
    res.centers.resize(C);
    for (int i = 0; i < C; ++i) res.centers[i] = (i + 0.5) * du;

    // per-cell integrated jump rates: exact q part, table-interpolated g part
    const double cb = params.c_bulk(), cd = params.c_bd();
    const int M_img = 16;
    std::vector<AliasTable> alias(C);
    std::vector<double> jump_rate(C), kill_rate(C);
    std::vector<double> row(C);
    const double q_norm = 3.0 / (std::pow(2.0, 2.5) * std::sqrt(M_PI));
    for (int i = 0; i < C; ++i) {
        const double ui = res.centers[i];
        double tot = 0.0;
        for (int j = 0; j < C; ++j) {
            if (j == i) { row[j] = 0.0; continue; }
            const double lo = j * du, hi = (j + 1) * du;
            double qint = 0.0;
            for (int m = -M_img; m <= M_img; ++m) {
                qint += anti_m52(ui + hi + 2 * m) - anti_m52(ui + lo + 2 * m);
                qint += anti_m52(ui - lo + 2 * m) - anti_m52(ui - hi + 2 * m);
            }
            double rate = cb * q_norm * qint -
                          cd * (table.interp_g(ui, res.centers[j], 0) +
                                table.interp_g(ui, res.centers[j], 1)) * du;
            row[j] = std::max(0.0, rate);
            tot += row[j];
        }
        jump_rate[i] = tot;
        kill_rate[i] = cd * (kernels::absorption_integral(ui, 0) +
                             kernels::absorption_integral(ui, 1));
        alias[i].build(row);
    }

    // birth list: initial particles plus Poisson creation over (0, t]
    const double kappa = static_cast<double>(opts.particles);
    struct Birth { int cell; double time; };
    std::vector<Birth> births;
    for (int i = 0; i < C; ++i) {
        auto rng = make_stream(opts.seed ^ 0x5eedc0deULL, static_cast<std::uint64_t>(i));
        std::poisson_distribution<long> pois_ini(kappa * du * T_ini(res.centers[i]));
        const long n0 = pois_ini(rng);
        for (long k = 0; k < n0; ++k) births.push_back({i, 0.0});
        const double crate = kappa * du * cd *
                             (kernels::absorption_integral(res.centers[i], 0) * params.T_L +
                              kernels::absorption_integral(res.centers[i], 1) * params.T_R);
        std::poisson_distribution<long> pois_new(crate * t);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const long nc = pois_new(rng);
        for (long k = 0; k < nc; ++k) births.push_back({i, t * unif(rng)});
    }

    // simulate independently; counts reduced per thread then summed (order-free: integers)
    const std::size_t P = births.size();
    int threads = opts.threads > 0 ? opts.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, threads);
    std::vector<std::vector<long>> counts(threads, std::vector<long>(C, 0));
    std::atomic<std::size_t> next{0};
    auto worker = [&](int tid) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::exponential_distribution<double> expo(1.0);
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= P) break;
            auto rng = make_stream(opts.seed, static_cast<std::uint64_t>(k) + 0x9000000ULL);
            int cell = births[k].cell;
            double now = births[k].time;
            bool alive = true;
            while (alive) {
                const double lam = jump_rate[cell] + kill_rate[cell];
                now += expo(rng) / lam;
                if (now >= t) break;
                if (unif(rng) * lam < kill_rate[cell]) {
                    alive = false;
                } else {
                    cell = alias[cell].sample(rng);
                }
            }
            if (alive) ++counts[tid][cell];
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker, i);
    for (auto& th : pool) th.join();

    res.density.resize(C);
    res.stderr_.resize(C);
    for (int i = 0; i < C; ++i) {
        long c = 0;
        for (int tid = 0; tid < threads; ++tid) c += counts[tid][i];
        res.density[i] = c / (kappa * du);
        res.stderr_[i] = std::sqrt(static_cast<double>(std::max(1L, c))) / (kappa * du);
    }
    res.ran = true;
    return res;
}

}  // namespace fhc::pde
