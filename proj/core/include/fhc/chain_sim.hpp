#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fhc/model.hpp"

namespace fhc::micro {

/// default micro step: min(0.05/gamma, 0.05/gamma_tilde, 0.1)
double default_step(const ModelParams& params);

/// Pathwise integrated currents along one trajectory, in MICROSCOPIC time.
/// mech: trapezoid quadrature of -p_x r_{x+1} per bond over the deterministic flow;
/// exch: energy transferred by momentum swaps per bond;
/// ou_left/ou_right: energy injected by the boundary Ornstein-Uhlenbeck kicks.
struct CurrentTally {
    Eigen::VectorXd mech;   // length n
    Eigen::VectorXd exch;   // length n
    double ou_left = 0.0;
    double ou_right = 0.0;

    explicit CurrentTally(int n = 0)
        : mech(Eigen::VectorXd::Zero(n)), exch(Eigen::VectorXd::Zero(n)) {}

    /// integrated current through bond (x-1,x), x = 0..n+1, micro time units
    double bond(int x) const {
        const int n = static_cast<int>(mech.size());
        if (x == 0) return ou_left;
        if (x == n + 1) return -ou_right;
        return mech[x - 1] + exch[x - 1];
    }
};

ChainState sample_initial_state(const ModelParams& params, const InitialEnsemble& ens,
                                std::mt19937_64& rng);

/// trajectory k draws from make_stream(seed, k); order-independent across workers
std::vector<ChainState> init_ensemble(const ModelParams& params, const InitialEnsemble& ens,
                                      std::uint64_t seed, int m);

/// One micro step of size h: half-kick / drift / half-kick, exact OU at the
/// boundaries, then per-bond Bernoulli momentum swaps with p = 1 - exp(-gamma h).
/// Requires gamma*h <= 0.1 and gamma_tilde*h <= 0.1.
void step_micro(ChainState& state, const ModelParams& params, double h, std::mt19937_64& rng,
                CurrentTally* tally = nullptr);

struct TrajectoryResult {
    ChainState final_state;
    std::vector<double> times;                  // the record times (macroscopic)
    std::vector<Eigen::VectorXd> energies;      // per-site E_x at each record time
    std::vector<CurrentTally> currents;         // integrated over [0, tau(t_k)]
};

/// Integrates to tau = n^{3/2} t_macro, truncating steps to land exactly on the
/// record times. record_times must be sorted and contained in [0, t_macro].
TrajectoryResult run_trajectory(ChainState state, const ModelParams& params, double t_macro,
                                double h, const std::vector<double>& record_times,
                                std::mt19937_64& rng);

/// mean and standard error over an ensemble of per-site energy vectors
EnergyProfile ensemble_energy_profile(const std::vector<Eigen::VectorXd>& energies, double t);

struct EnsembleResult {
    std::vector<double> times;
    std::vector<EnergyProfile> profiles;
    std::vector<CurrentRecord> currents;   // ensemble means, macroscopic time units
};

/// Runs m independent trajectories (data-parallel over `threads` workers) and
/// reduces in trajectory-index order, so the result does not depend on the
/// worker count.
EnsembleResult run_ensemble(const ModelParams& params, const InitialEnsemble& ens,
                            std::uint64_t seed, int m, double t_macro, double h,
                            const std::vector<double>& record_times, int threads = 0);

}  // namespace fhc::micro
