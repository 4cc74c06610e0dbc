#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fhc {

using Eigen::VectorXd;

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Chain size, noise rates and bath temperatures, with the derived
/// macroscopic constants
///   c_bulk = 1/(2^3 gamma)^{1/2}
///   c_bd   = gamma_tilde / (2 gamma^{1/2} pi [(1+gamma_tilde)^2 + gamma_tilde^2]).
struct ModelParams {
    int n = 32;
    double gamma = 1.0;
    double gamma_tilde = 1.0;
    double T_L = 1.0;
    double T_R = 1.0;

    ModelParams() = default;
    ModelParams(int n_, double gamma_, double gamma_tilde_, double T_L_, double T_R_)
        : n(n_), gamma(gamma_), gamma_tilde(gamma_tilde_), T_L(T_L_), T_R(T_R_) {
        validate();
    }

    void validate() const {
        if (n < 2) throw ParameterError("ModelParams: n must be >= 2");
        if (gamma <= 0 || gamma_tilde <= 0) throw ParameterError("ModelParams: rates must be positive");
        if (T_L <= 0 || T_R <= 0) throw ParameterError("ModelParams: temperatures must be positive");
    }

    double c_bulk() const { return 1.0 / std::sqrt(8.0 * gamma); }
    double c_bd() const {
        const double g = gamma_tilde;
        return g / (2.0 * std::sqrt(gamma) * M_PI * ((1.0 + g) * (1.0 + g) + g * g));
    }
    /// time dilation between macroscopic and microscopic clocks: tau = n^{3/2} t
    double time_scale() const { return std::pow(static_cast<double>(n), 1.5); }
};

/// Phase point of the simulator: stretches r_1..r_n (r_0 == 0 by convention),
/// momenta p_0..p_n, and the microscopic clock.
struct ChainState {
    VectorXd r;   // length n
    VectorXd p;   // length n+1
    double tau = 0.0;

    int n() const { return static_cast<int>(r.size()); }
    /// per-site energy E_x = (p_x^2 + r_x^2)/2 with r_0 = 0
    double site_energy(int x) const {
        const double rx = (x == 0) ? 0.0 : r[x - 1];
        return 0.5 * (p[x] * p[x] + rx * rx);
    }
    double total_energy() const { return 0.5 * (p.squaredNorm() + r.squaredNorm()); }
};

/// Product-Gaussian initial law with zero means and site variance T_ini(u_x).
struct InitialEnsemble {
    std::function<double(double)> profile;   // u in [0,1] -> T_ini(u) > 0

    static InitialEnsemble constant(double T) {
        return InitialEnsemble{[T](double) { return T; }};
    }
    static InitialEnsemble linear(double T0, double T1) {
        return InitialEnsemble{[T0, T1](double u) { return T0 + (T1 - T0) * u; }};
    }
};

/// Ensemble-averaged per-site energies at one macroscopic time.
struct EnergyProfile {
    double t = 0.0;
    VectorXd e;         // length n+1
    VectorXd stderr_;   // length n+1; zero (and flagged) when m == 1
    bool stderr_defined = true;
};

/// Time-integrated currents over [0, t] (macroscopic time):
///   mech[x]  = int E[j^{(a)}_{x,x+1}] ds = -int E[p_x r_{x+1}] ds,  x = 0..n-1
///   noise[x] = int E[j^{(s)}_{x,x+1}] ds = -(gamma/2) int E[p_{x+1}^2 - p_x^2] ds
///   left  = int E[j_{-1,0}] ds  = gamma_tilde int (T_L - E p_0^2) ds
///   right = int E[j_{n,n+1}] ds = gamma_tilde int (E p_n^2 - T_R) ds
struct CurrentRecord {
    double t = 0.0;
    VectorXd mech;
    VectorXd noise;
    double left = 0.0;
    double right = 0.0;

    /// integrated current through bond (x-1, x) for x = 0..n+1 (boundaries included)
    double bond(int x) const {
        const int n = static_cast<int>(mech.size());
        if (x == 0) return left;
        if (x == n + 1) return right;
        return mech[x - 1] + noise[x - 1];
    }
    double sup_bond() const {
        const int n = static_cast<int>(mech.size());
        double s = 0.0;
        for (int x = 0; x <= n + 1; ++x) s = std::max(s, std::abs(bond(x)));
        return s;
    }
};

}  // namespace fhc
