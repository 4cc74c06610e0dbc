#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhc/model.hpp"

namespace fhc::kernels {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Gauss hypergeometric F(a,b;c;z) for the family used here (c - a - b = 1/2):
/// direct series for z <= 1/2, connection formula at 1-z otherwise.
double gauss_2f1(double a, double b, double c, double z);

enum class GreenMethod { ImageSum, CosineSeries };

/// Green's function of (lambda - Lap_N)^{-1} on [0,1].
/// Image sum: G = sum_m [k(u-v+2m) + k(u+v+2m)], k(w) = e^{-sqrt(lambda)|w|} / (2 sqrt(lambda));
/// closed geometric form when n_img = 0 (exact), truncated partial sum + tail bound otherwise.
/// Cosine series: sum_l c_l(u) c_l(v) / (lambda + (l pi)^2) with three Bernoulli-polynomial
/// layers summed in closed form and an O(l^-8) numerical remainder.
double green_function(double lambda, double u, double v,
                      GreenMethod method = GreenMethod::ImageSum, int n_img = 0);

/// V_rho(u,v) = rho * G_rho(u,v); a probability density in u for each (rho, v)
double resolvent_kernel_V(double rho, double u, double v,
                          GreenMethod method = GreenMethod::ImageSum);

/// int_0^1 V_rho(u,v) du by adaptive quadrature (should be 1)
double v_normalization(double rho, double v, double tol = 1e-10);

/// q(u,u') = 3/(2^{5/2} pi^{1/2}) sum_m [ |u+u'+2m|^{-5/2} + |u-u'+2m|^{-5/2} ],
/// images summed directly with an Euler-Maclaurin tail.
double jump_kernel_q(double u, double up, int n_img = 24);

/// W(a,b) = 5 Gamma(1/4)^2 / (2^5 pi) * int_0^{pi/2} (sin^2 2t / ((a sin t)^2 + (b cos t)^2))^{5/4} dt
double boundary_kernel_W_theta(double a, double b, double tol = 1e-12);
/// same via 3 sqrt(pi)/(2^{7/2} A^{5/2}) F(5/4,7/4;7/2; 1-(B/A)^2), A = max|.|, B = min|.|
double boundary_kernel_W(double a, double b);

/// g(u,u';v) = sum_{m,m'} W(u+v+2m, u'+v+2m'), v in {0,1}; truncated double image
/// sum plus a midpoint-rule tail integral of the homogeneous kernel.
double boundary_kernel_g(double u, double up, int v, int n_img = 64);

/// same kernel through the resolvent product: int_0^inf V_rho(u,v) V_rho(u',v) rho^{-3/4} drho,
/// evaluated with the rho = s^4 substitution on Gauss-Legendre panels.
double boundary_kernel_g_quadrature(double u, double up, int v, double s_max = 40.0,
                                    int panels_per_unit = 4);

/// bare absorption kernel: int_0^1 g(u,u';v) du' = sqrt(pi) sum_m |u+v+2m|^{-3/2}
double absorption_integral(double u, int v, int n_img = 512);

/// one row of the integral-formula self-test
struct FormulaCheck {
    std::string name;
    double computed;
    double reference;
    double abs_error;
};

/// quadrature checks of  int dl/(a^2+b^2 l^4) = pi/((2a)^{3/2} b^{1/2}),
/// the two-factor variant, and (1/2pi) int v^2/(1+v^4) dv = 2^{-3/2}
std::vector<FormulaCheck> integral_formulas_selftest();

/// r(u,u') = c_bulk q(u',u) - c_bd sum_v g(u,u';v) tabulated on a grid
struct RateDecomposition {
    VectorXd grid;        // interior u points
    MatrixXd r;           // r(u_i, u_j); diagonal left NaN
    double min_value;
    double min_u, min_up;
    bool all_nonnegative;
};

RateDecomposition rate_sign_report(const ModelParams& params, int grid_points = 21);

/// absorption rate of the limit equation: b(u;v) = c_bd * absorption_integral
double absorption_rate_b(double u, int v, const ModelParams& params);

/// Tabulated kernels with truncation metadata; serializable to CSV.
struct KernelTable {
    VectorXd u_grid;              // also used for u'
    VectorXd rho_grid;
    MatrixXd V0, V1;              // V_rho(u, v): rows u, cols rho, v = 0 / 1
    MatrixXd q;                   // q(u_i, u_j), NaN on the diagonal
    MatrixXd g0, g1;              // g(u_i, u_j; v)
    MatrixXd W;                   // W(u_i, u_j)
    VectorXd b0, b1;              // bare absorption integrals
    std::map<std::string, std::string> metadata;

    static VectorXd default_u_grid(int m = 65);     // Chebyshev-clustered in (0,1)
    static VectorXd default_rho_grid(int m = 33);   // log-spaced in [1e-2, 1e4]

    static KernelTable build(const VectorXd& u_grid, const VectorXd& rho_grid, int n_img = 64);
    void save_csv(const std::string& path) const;
    static KernelTable load_csv(const std::string& path);

    /// bilinear interpolation of g(u, u'; v) from the table
    double interp_g(double u, double up, int v) const;
};

}  // namespace fhc::kernels
