#include "fhc/lattice.hpp"

#include <cmath>

namespace fhc::lattice {

VectorXd apply_divergence(const VectorXd& f) {
    const int n = static_cast<int>(f.size()) - 1;
    if (n < 1) throw DimensionError("apply_divergence: input must have length n+1 >= 2");
    VectorXd out(n);
    for (int x = 1; x <= n; ++x) out[x - 1] = f[x] - f[x - 1];
    return out;
}

VectorXd apply_gradient(const VectorXd& f) {
    const int n = static_cast<int>(f.size());
    if (n < 1) throw DimensionError("apply_gradient: input must have length n >= 1");
    VectorXd out(n + 1);
    out[0] = f[0];                                   // f_1 - f_0 with f_0 = 0
    for (int x = 1; x < n; ++x) out[x] = f[x] - f[x - 1];
    out[n] = -f[n - 1];                              // f_{n+1} - f_n with f_{n+1} = 0
    return out;
}

VectorXd apply_neumann_laplacian(const VectorXd& f) {
    const int m = static_cast<int>(f.size());
    if (m < 2) throw DimensionError("apply_neumann_laplacian: input must have length n+1 >= 2");
    VectorXd out(m);
    out[0] = f[1] - f[0];
    for (int x = 1; x < m - 1; ++x) out[x] = f[x + 1] + f[x - 1] - 2.0 * f[x];
    out[m - 1] = f[m - 2] - f[m - 1];
    return out;
}

VectorXd apply_dirichlet_laplacian(const VectorXd& f) {
    const int n = static_cast<int>(f.size());
    if (n < 1) throw DimensionError("apply_dirichlet_laplacian: input must have length n >= 1");
    VectorXd out(n);
    for (int x = 0; x < n; ++x) {
        const double left = (x > 0) ? f[x - 1] : 0.0;
        const double right = (x < n - 1) ? f[x + 1] : 0.0;
        out[x] = left + right - 2.0 * f[x];
    }
    return out;
}

NeumannBasis::NeumannBasis(int n) : n_(n), lambda_(n + 1), gamma_(n + 1), psi_(n + 1, n + 1) {
    if (n < 1) throw std::invalid_argument("NeumannBasis: n must be >= 1");
    const double denom = 2.0 * (n + 1);
    for (int j = 0; j <= n; ++j) {
        const double s = std::sin(M_PI * j / denom);
        gamma_[j] = 2.0 * s;
        lambda_[j] = 4.0 * s * s;
        const double norm = std::sqrt((j == 0 ? 1.0 : 2.0) / (n + 1));
        for (int x = 0; x <= n; ++x)
            psi_(x, j) = norm * std::cos(M_PI * j * (2.0 * x + 1.0) / denom);
    }
}

VectorXd NeumannBasis::forward(const VectorXd& f) const {
    if (f.size() != n_ + 1) throw DimensionError("NeumannBasis::forward: length must be n+1");
    return psi_.transpose() * f;
}

VectorXd NeumannBasis::inverse(const VectorXd& fhat) const {
    if (fhat.size() != n_ + 1) throw DimensionError("NeumannBasis::inverse: length must be n+1");
    return psi_ * fhat;
}

DirichletBasis::DirichletBasis(int n) : n_(n), phi_(n, n) {
    if (n < 1) throw std::invalid_argument("DirichletBasis: n must be >= 1");
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int j = 1; j <= n; ++j)
        for (int x = 1; x <= n; ++x)
            phi_(x - 1, j - 1) = norm * std::sin(M_PI * j * x / (n + 1.0));
}

VectorXd DirichletBasis::forward(const VectorXd& f) const {
    if (f.size() != n_) throw DimensionError("DirichletBasis::forward: length must be n");
    return phi_.transpose() * f;
}

VectorXd DirichletBasis::inverse(const VectorXd& fhat) const {
    if (fhat.size() != n_) throw DimensionError("DirichletBasis::inverse: length must be n");
    return phi_ * fhat;
}

}  // namespace fhc::lattice
