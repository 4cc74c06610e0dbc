#include "fhc/chain_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "fhc/rng.hpp"

namespace fhc::micro {

double default_step(const ModelParams& params) {
    return std::min({0.05 / params.gamma, 0.05 / params.gamma_tilde, 0.1});
}

ChainState sample_initial_state(const ModelParams& params, const InitialEnsemble& ens,
                                std::mt19937_64& rng) {
    const int n = params.n;
    ChainState s;
    s.r.resize(n);
    s.p.resize(n + 1);
    s.tau = 0.0;
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto var_at = [&](int x) {
        const double T = ens.profile(static_cast<double>(x) / (n + 1));
        if (!(T > 0.0)) throw ParameterError("InitialEnsemble: profile must be positive");
        return T;
    };
    for (int x = 1; x <= n; ++x) s.r[x - 1] = std::sqrt(var_at(x)) * gauss(rng);
    for (int x = 0; x <= n; ++x) s.p[x] = std::sqrt(var_at(x)) * gauss(rng);
    return s;
}

std::vector<ChainState> init_ensemble(const ModelParams& params, const InitialEnsemble& ens,
                                      std::uint64_t seed, int m) {
    if (m < 1) throw ParameterError("init_ensemble: m must be >= 1");
    std::vector<ChainState> out;
    out.reserve(m);
    for (int k = 0; k < m; ++k) {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(k));
        out.push_back(sample_initial_state(params, ens, rng));
    }
    return out;
}

namespace {

inline double bond_current(const ChainState& s, int x) {
    // j^{(a)}_{x,x+1} = -p_x r_{x+1}
    return -s.p[x] * s.r[x];
}

}  // namespace

void step_micro(ChainState& state, const ModelParams& params, double h, std::mt19937_64& rng,
                CurrentTally* tally) {
    if (!(h > 0.0)) throw ParameterError("step_micro: h must be positive");
    if (params.gamma * h > 0.1 + 1e-12 || params.gamma_tilde * h > 0.1 + 1e-12)
        throw ParameterError("step_micro: step-size gate gamma*h <= 0.1 and gamma_tilde*h <= 0.1 violated");

    const int n = params.n;
    VectorXd& r = state.r;
    VectorXd& p = state.p;

    if (tally)
        for (int x = 0; x < n; ++x) tally->mech[x] += 0.5 * h * bond_current(state, x);

    // half-kick: p += (h/2) grad r  (r_0 = r_{n+1} = 0)
    const double hh = 0.5 * h;
    p[0] += hh * r[0];
    for (int x = 1; x < n; ++x) p[x] += hh * (r[x] - r[x - 1]);
    p[n] += -hh * r[n - 1];

    // drift: r += h div p
    for (int x = 0; x < n; ++x) r[x] += h * (p[x + 1] - p[x]);

    // half-kick
    p[0] += hh * r[0];
    for (int x = 1; x < n; ++x) p[x] += hh * (r[x] - r[x - 1]);
    p[n] += -hh * r[n - 1];

    if (tally)
        for (int x = 0; x < n; ++x) tally->mech[x] += 0.5 * h * bond_current(state, x);

    // exact OU at the boundaries
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double decay = std::exp(-params.gamma_tilde * h);
    const double drive = -std::expm1(-2.0 * params.gamma_tilde * h);   // 1 - e^{-2 g h}
    {
        const double p_old = p[0];
        p[0] = decay * p_old + std::sqrt(params.T_L * drive) * gauss(rng);
        if (tally) tally->ou_left += 0.5 * (p[0] * p[0] - p_old * p_old);
    }
    {
        const double p_old = p[n];
        p[n] = decay * p_old + std::sqrt(params.T_R * drive) * gauss(rng);
        if (tally) tally->ou_right += 0.5 * (p[n] * p[n] - p_old * p_old);
    }

    // momentum exchanges: each bond fires independently with p = 1 - e^{-gamma h}
    const double p_swap = -std::expm1(-params.gamma * h);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int x = 0; x < n; ++x) {
        if (unif(rng) < p_swap) {
            if (tally) tally->exch[x] += -0.5 * (p[x + 1] * p[x + 1] - p[x] * p[x]);
            std::swap(p[x], p[x + 1]);
        }
    }

    state.tau += h;
}

TrajectoryResult run_trajectory(ChainState state, const ModelParams& params, double t_macro,
                                double h, const std::vector<double>& record_times,
                                std::mt19937_64& rng) {
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        throw ParameterError("run_trajectory: record_times must be sorted");
    if (!record_times.empty() &&
        (record_times.front() < 0.0 || record_times.back() > t_macro + 1e-12))
        throw ParameterError("run_trajectory: record_times must lie in [0, t_macro]");

    const int n = params.n;
    const double ts = params.time_scale();
    TrajectoryResult res;
    res.times = record_times;
    CurrentTally tally(n);

    auto snapshot = [&]() {
        VectorXd e(n + 1);
        for (int x = 0; x <= n; ++x) e[x] = state.site_energy(x);
        res.energies.push_back(std::move(e));
        res.currents.push_back(tally);
    };

    std::size_t k = 0;
    while (k < record_times.size() && record_times[k] <= state.tau / ts + 1e-15) {
        snapshot();
        ++k;
    }
    const double tau_end = ts * t_macro;
    while (state.tau < tau_end - 1e-12) {
        double tau_next = std::min(state.tau + h, tau_end);
        if (k < record_times.size()) tau_next = std::min(tau_next, ts * record_times[k]);
        step_micro(state, params, tau_next - state.tau, rng, &tally);
        state.tau = tau_next;   // avoid drift from accumulated rounding
        while (k < record_times.size() && ts * record_times[k] <= state.tau + 1e-9) {
            snapshot();
            ++k;
        }
    }
    while (k < record_times.size()) { snapshot(); ++k; }   // t_macro == 0 case
    res.final_state = std::move(state);
    return res;
}

EnergyProfile ensemble_energy_profile(const std::vector<Eigen::VectorXd>& energies, double t) {
    if (energies.empty()) throw ParameterError("ensemble_energy_profile: empty ensemble");
    const int m = static_cast<int>(energies.size());
    const int len = static_cast<int>(energies.front().size());
    EnergyProfile prof;
    prof.t = t;
    prof.e = VectorXd::Zero(len);
    prof.stderr_ = VectorXd::Zero(len);
    for (const auto& e : energies) prof.e += e;
    prof.e /= m;
    if (m == 1) {
        prof.stderr_defined = false;
        return prof;
    }
    for (const auto& e : energies) prof.stderr_ += (e - prof.e).cwiseAbs2();
    prof.stderr_ = (prof.stderr_ / (static_cast<double>(m) * (m - 1))).cwiseSqrt();
    return prof;
}

EnsembleResult run_ensemble(const ModelParams& params, const InitialEnsemble& ens,
                            std::uint64_t seed, int m, double t_macro, double h,
                            const std::vector<double>& record_times, int threads) {
    if (m < 1) throw ParameterError("run_ensemble: m must be >= 1");
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, m));

    std::vector<TrajectoryResult> traj(m);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= m) break;
            auto rng = make_stream(seed, static_cast<std::uint64_t>(k));
            ChainState s0 = sample_initial_state(params, ens, rng);
            traj[k] = run_trajectory(std::move(s0), params, t_macro, h, record_times, rng);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    const int n = params.n;
    const double ts = params.time_scale();
    EnsembleResult out;
    out.times = record_times;
    for (std::size_t rec = 0; rec < record_times.size(); ++rec) {
        std::vector<Eigen::VectorXd> snap;
        snap.reserve(m);
        for (int k = 0; k < m; ++k) snap.push_back(traj[k].energies[rec]);
        out.profiles.push_back(ensemble_energy_profile(snap, record_times[rec]));

        CurrentRecord cr;
        cr.t = record_times[rec];
        cr.mech = VectorXd::Zero(n);
        cr.noise = VectorXd::Zero(n);
        for (int k = 0; k < m; ++k) {
            const CurrentTally& ct = traj[k].currents[rec];
            cr.mech += ct.mech;
            cr.noise += ct.exch;
            cr.left += ct.ou_left;
            cr.right += -ct.ou_right;
        }
        const double norm = 1.0 / (static_cast<double>(m) * ts);
        cr.mech *= norm;
        cr.noise *= norm;
        cr.left *= norm;
        cr.right *= norm;
        out.currents.push_back(std::move(cr));
    }
    return out;
}

}  // namespace fhc::micro
