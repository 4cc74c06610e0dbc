#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace fhc::lattice {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown on vector/matrix size mismatches in lattice operations.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Grid bookkeeping for a chain of sites 0..n: u_x = x/(n+1), k_j = j/(n+1).
struct LatticeSpec {
    int n;
    explicit LatticeSpec(int n_) : n(n_) {
        if (n < 1) throw std::invalid_argument("LatticeSpec: n must be >= 1");
    }
    double u(int x) const { return static_cast<double>(x) / (n + 1); }
    double k(int j) const { return static_cast<double>(j) / (n + 1); }
};

// divergence: (div f)_x = f_x - f_{x-1}, x = 1..n, maps R^{n+1} -> R^n
VectorXd apply_divergence(const VectorXd& f);

// gradient with the convention f_0 = f_{n+1} = 0, maps R^n -> R^{n+1};
// adjoint to -divergence: <grad f, g> = -<f, div g>
VectorXd apply_gradient(const VectorXd& f);

// second difference with reflecting ends (f_{-1} = f_0, f_{n+1} = f_n); equals grad(div f)
VectorXd apply_neumann_laplacian(const VectorXd& f);

// second difference with absorbing ends (f_0 = f_{n+1} = 0); equals div(grad f)
VectorXd apply_dirichlet_laplacian(const VectorXd& f);

/// Eigenbasis of -neumann_laplacian on R^{n+1}:
///   lambda_j = 4 sin^2(pi j / (2(n+1))),  gamma_j = 2 sin(pi j / (2(n+1))),
///   psi_j(x) = sqrt((2 - delta_{0j})/(n+1)) cos(pi j (2x+1) / (2(n+1))).
/// Vectors are precomputed; transforms are dense matrix products.
class NeumannBasis {
public:
    explicit NeumannBasis(int n);

    int n() const { return n_; }
    double lambda(int j) const { return lambda_[j]; }
    double gamma(int j) const { return gamma_[j]; }
    const VectorXd& lambdas() const { return lambda_; }
    /// column j is psi_j
    const MatrixXd& vectors() const { return psi_; }
    VectorXd vector(int j) const { return psi_.col(j); }
    double psi(int j, int x) const { return psi_(x, j); }

    VectorXd forward(const VectorXd& f) const;   // f_hat_j = sum_x psi_j(x) f_x
    VectorXd inverse(const VectorXd& fhat) const;

private:
    int n_;
    VectorXd lambda_, gamma_;
    MatrixXd psi_;
};

/// Eigenbasis of -dirichlet_laplacian on R^n (same eigenvalues lambda_j, j = 1..n):
///   phi_j(x) = sqrt(2/(n+1)) sin(pi j x / (n+1)), x, j = 1..n.
/// Index j is 1-based to match the Neumann numbering; storage is 0-based (col j-1).
class DirichletBasis {
public:
    explicit DirichletBasis(int n);

    int n() const { return n_; }
    const MatrixXd& vectors() const { return phi_; }
    VectorXd vector(int j) const { return phi_.col(j - 1); }
    double phi(int j, int x) const { return phi_(x - 1, j - 1); }

    VectorXd forward(const VectorXd& f) const;
    VectorXd inverse(const VectorXd& fhat) const;

private:
    int n_;
    MatrixXd phi_;
};

}  // namespace fhc::lattice
