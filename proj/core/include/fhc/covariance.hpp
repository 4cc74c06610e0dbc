#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fhc/lattice.hpp"
#include "fhc/model.hpp"

namespace fhc::cov {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct IntegratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Second-moment matrix of (r_1..r_n, p_0..p_n), ordered r-block first.
struct CovarianceState {
    MatrixXd S;     // (2n+1) x (2n+1), symmetric
    double t = 0.0; // macroscopic time
    int n = 0;

    CovarianceState() = default;
    CovarianceState(MatrixXd S_, double t_, int n_) : S(std::move(S_)), t(t_), n(n_) {}

    auto S_rr() const { return S.topLeftCorner(n, n); }
    auto S_rp() const { return S.topRightCorner(n, n + 1); }
    auto S_pp() const { return S.bottomRightCorner(n + 1, n + 1); }

    static CovarianceState equilibrium(const ModelParams& params, double T) {
        const int d = 2 * params.n + 1;
        return CovarianceState(T * MatrixXd::Identity(d, d), 0.0, params.n);
    }
};

/// Drift matrix A = [[0, -div], [-grad, -gamma*Lap_N + gamma_tilde*E]];
/// the moment flow in microscopic time is dS/dtau = -A S - S A^T + Sigma2(x(S)).
class DriftOperator {
public:
    DriftOperator(const ModelParams& params);
    const Eigen::SparseMatrix<double>& sparse() const { return A_; }
    MatrixXd dense() const { return MatrixXd(A_); }
    double norm_1() const { return norm1_; }
    int n() const { return n_; }

private:
    int n_;
    Eigen::SparseMatrix<double> A_;
    double norm1_;
};

/// x(S)_y = E[(div p)_y^2] read off the momentum block, y = 1..n
VectorXd exchange_variances(const CovarianceState& S);

/// Sigma2(x) = blockdiag(0, gamma D2(x) + 2 gamma_tilde D1); D2(1,...,1) = -Lap_N
MatrixXd noise_matrix(const VectorXd& x, const ModelParams& params);

/// dS/dtau at S (microscopic time), symmetric by construction
MatrixXd covariance_rhs(const CovarianceState& S, const ModelParams& params,
                        const DriftOperator& A);

struct EvolveOptions {
    double dt = 0.0;              // micro step; 0 selects 0.25 / ||A||_1
    bool with_quadrature = true;  // accumulate Q = int S dtau alongside S
    double psd_tol = 1e-8;        // records must satisfy min eig >= -psd_tol * trace
};

struct EvolveResult {
    std::vector<CovarianceState> snapshots;   // at the requested record times
    std::vector<MatrixXd> quadrature;         // int_0^{tau(t_k)} S dtau per record
    MatrixXd S_initial;
    double min_eig_ratio = 0.0;               // most negative (eig/trace) seen at records
};

/// RK4 integration of the moment flow; records land exactly on tau = n^{3/2} t_k.
EvolveResult evolve_covariance(const CovarianceState& S0, const ModelParams& params,
                               double t_macro, const std::vector<double>& record_times,
                               const EvolveOptions& opts = {});

/// E_x = (S_pp[x,x] + S_rr[x,x])/2 with the r_0 = 0 convention at x = 0
EnergyProfile energy_profile_from_covariance(const CovarianceState& S);

/// Integrated currents over [0,t] (macroscopic units) from the quadrature matrix
CurrentRecord currents_from_quadrature(const MatrixXd& Q, const ModelParams& params, double t);

/// (1/(n+1)) sum_x phi(u_x) (1/t) int_0^t (E p_x^2 - E r_x^2) ds from the quadrature
double equipartition_statistic(const MatrixXd& Q, const ModelParams& params, double t,
                               const std::function<double(double)>& phi);

/// Inputs of the mode-pair linear system for the time-integrated transforms.
struct FourierSystemData {
    MatrixXd Sr, Srp, Spr, Sp;      // time-integrated transforms, indices 1..n stored 0-based
    MatrixXd B_pr, B_rp, B_p;       // boundary couplings
    MatrixXd R_r, R_rp, R_pr, R_p;  // time-boundary terms
    MatrixXd F;                     // exchange source
};

FourierSystemData build_fourier_data(const MatrixXd& S_begin, const MatrixXd& S_end,
                                     const MatrixXd& Q, const ModelParams& params, double t,
                                     const lattice::NeumannBasis& nb,
                                     const lattice::DirichletBasis& db);

struct FourierReport {
    double max_residual = 0.0;
    double scale = 0.0;          // largest |entry| among the four RHS/LHS terms
    int modes_checked = 0;
    int modes_excluded = 0;      // j or j' = 0
};

/// Residual of the four transformed block equations over all mode pairs j,j' >= 1
FourierReport verify_fourier_system(const FourierSystemData& d, const ModelParams& params,
                                    const lattice::NeumannBasis& nb);

struct ModePairSolution {
    double Sp, Spr, Srp, Sr;
};

/// Closed-form inverse of the 4x4 mode-pair system. Requires lambda_j, lambda_jp > 0.
ModePairSolution closed_form_solution_map(double lambda_j, double lambda_jp, double F,
                                          double B_pr, double B_rp, double B_p, double R_p,
                                          double R_pr, double R_rp, double R_r,
                                          const ModelParams& params);

/// H(N(0,S) | nu_T) = (tr(S)/T - d - log det(S/T)) / 2; requires S positive definite.
double gaussian_relative_entropy(const MatrixXd& S, double T);

}  // namespace fhc::cov
