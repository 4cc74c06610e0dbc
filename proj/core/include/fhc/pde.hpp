#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fhc/kernels.hpp"
#include "fhc/model.hpp"

namespace fhc::pde {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// c_0(u) = 1, c_l(u) = sqrt(2) cos(pi l u)
double cosine_basis(int l, double u);

/// Cosine coefficients a_0..a_N of the temperature field plus the bath values.
struct SpectralTemperature {
    VectorXd a;        // length N+1
    double T_L = 1.0, T_R = 1.0;

    int cutoff() const { return static_cast<int>(a.size()) - 1; }
    double value(double u) const;
    VectorXd values(const VectorXd& grid) const;
    /// sum over even modes of a_l c_l(0); must equal (T_L + T_R)/2
    double even_constraint() const;
    /// sum over odd modes of a_l c_l(0); must equal (T_L - T_R)/2
    double odd_constraint() const;
    double h34_norm_sq() const;   // sum (pi l)^{3/2} a_l^2
};

/// Coefficients of a profile function, with the truncation residual of the two
/// boundary constraints projected out (minimal-norm correction per sector).
SpectralTemperature spectral_from_profile(const std::function<double(double)>& profile, int N,
                                          double T_L, double T_R, int quad_panels = 64);

/// K-hat structural factor (no c_l(v) weights):
///   sqrt(pi l pi l') (pi l + pi l' + sqrt(pi l pi l')) / ((sqrt(pi l)+sqrt(pi l'))(pi l + pi l'))
double khat_unit(int l, int lp);

/// Even/odd sector operators in coefficient space:
///   M(l,l') = c_bulk (pi l)^{3/2} delta + 2^{5/2} pi c_bd khat_unit(l,l')
/// restricted to modes of one parity (constraint vectors delta hold c_m(0)).
struct GalerkinSystem {
    int N = 0;
    ModelParams params;
    MatrixXd M_even;        // modes 0,2,...,N
    MatrixXd M_odd;         // modes 1,3,...,N-1
    VectorXd delta_even;
    VectorXd delta_odd;

    int even_size() const { return static_cast<int>(delta_even.size()); }
    int odd_size() const { return static_cast<int>(delta_odd.size()); }
};

GalerkinSystem build_galerkin(const ModelParams& params, int N);

struct StationaryProfile {
    SpectralTemperature T_s;
    VectorXd odd_eigenvalues;      // ascending
    MatrixXd odd_eigenvectors;     // columns, coefficient space
    double delta_theta_s = 0.0;    // 2 delta_o^T M_o^{-1} delta_o (> 0)
};

StationaryProfile stationary_profile(const GalerkinSystem& sys, double T_L, double T_R);

struct EvolveOptions {
    double dt0 = 0.0;        // 0: 1e-3 / (c_bulk (pi N)^{3/2})
    double dt_max = 0.0;     // 0: 0.05
    double growth = 1.05;
    double constraint_tol = 1e-8;
};

struct PdeTrajectory {
    std::vector<double> times;
    std::vector<SpectralTemperature> states;
};

/// Implicit trapezoid with per-step multipliers keeping both boundary
/// constraints exactly; initial data violating them is rejected.
PdeTrajectory solve_evolution(const SpectralTemperature& ini, const GalerkinSystem& sys,
                              double t_end, const std::vector<double>& record_times,
                              const EvolveOptions& opts = {});

struct EigenScalingReport {
    double even_exponent = 0.0;
    double odd_exponent = 0.0;
    double odd_lambda1 = 0.0;      // smallest odd eigenvalue (should be > 0)
    int even_near_zero = 0;        // eigenvalues below tol * max
    VectorXd even_eigenvalues, odd_eigenvalues;
};

/// log-log fit of lambda_m vs m over m in [4, N/4] for both sectors
EigenScalingReport eigen_scaling_report(const GalerkinSystem& sys);

struct PointwiseReconstruction {
    VectorXd values;
    double tail_bound = 0.0;   // estimated |sum_{l>N} a_l c_l| from the coefficient decay
};

PointwiseReconstruction reconstruct_pointwise(const SpectralTemperature& T, const VectorXd& grid);

/// int_0^inf ds / (s^4 + A) and int_0^inf ds / (s^4 + A)^2 by quadrature
double quartic_integral(double A);
double quartic_integral2(double A);

/// 4 (pi l)^2 (pi l')^2 int_0^inf ds / ((s^4 + (pi l)^2)(s^4 + (pi l')^2)),
/// the rho-integral of the resolvent pair in the s = rho^{1/4} variable.
double boundary_pair_integral(int l, int lp);

/// Weak-form residual of a coefficient state against a test function phi
/// (coefficients, must satisfy phi(0) = phi(1) = 0), with the boundary term
/// evaluated by quadrature rather than the K-hat closed form.
double weak_form_residual(const SpectralTemperature& T, const ModelParams& params,
                          const VectorXd& phi_hat);

struct JumpMCOptions {
    int cells = 1024;
    std::int64_t particles = 100000;   // scale kappa: expected particles per unit temperature
    std::uint64_t seed = 1;
    int threads = 0;
    bool force = false;                // run even if the sign gate fails
    int sign_grid = 17;
};

struct JumpMCResult {
    bool gate_passed = false;
    std::string gate_report;
    bool ran = false;
    double t = 0.0;
    VectorXd centers;
    VectorXd density;     // histogram estimate of T(t, u)
    VectorXd stderr_;
};

/// Monte Carlo for the jump process of the limit equation: per-cell integrated
/// jump rates (exact antiderivatives for the q part, kernel-table interpolation
/// for the g part), pointwise killing b(u;0)+b(u;1) and Poisson creation.
JumpMCResult jump_mc_profile(const ModelParams& params, double t,
                             const std::function<double(double)>& T_ini,
                             const kernels::KernelTable& table, const JumpMCOptions& opts);

}  // namespace fhc::pde
