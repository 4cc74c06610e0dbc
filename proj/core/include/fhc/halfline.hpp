#pragma once

#include <Eigen/Dense>
#include <functional>

namespace fhc::halfline {

using Eigen::VectorXd;

/// Samples of a function on the uniform grid x_i = i*dx over [0, L), with the
/// implied even (for T) or odd (for T*) extension and zero beyond.
struct HalfLineFunction {
    VectorXd samples;
    double dx = 0.0;

    double length() const { return samples.size() * dx; }
    static HalfLineFunction from_function(const std::function<double(double)>& f, double L,
                                          int samples);
};

/// Dawson integral D(x) = e^{-x^2} int_0^x e^{t^2} dt (Rybicki's sampling series)
double dawson(double x);

struct ApplyOptions {
    int pad_factor = 4;     // zero padding of the symmetrized FFT buffer
    int out_factor = 1;     // output domain [0, out_factor * L), <= pad_factor / 2
    bool template_correction = true;
};

struct ApplyResult {
    HalfLineFunction out;
    double aliasing_estimate = 0.0;   // |f| remaining at the grid end, relative
    double tail_coefficient = 0.0;    // c with T f ~ c / rho (= 2 int f) when known
};

/// T f: Fourier multiplier -i pi sign(xi) on the even extension; the nonzero-mean
/// part is handled analytically through a Gaussian template (2 sqrt(pi) Dawson image).
ApplyResult apply_T(const HalfLineFunction& f, const ApplyOptions& opts = {});

/// T* g: multiplier +i pi sign(xi) on the odd extension; the first-moment part is
/// handled through an odd Gaussian template. If tail_coeff != 0 the input is
/// treated as having the analytic tail tail_coeff / rho beyond the grid and the
/// exact correction (c/rho) log((P+rho)/(P-rho)) is added.
ApplyResult apply_T_star(const HalfLineFunction& g, const ApplyOptions& opts = {},
                         double tail_coeff = 0.0);

struct TstarTReport {
    double residual_vs_paper = 0.0;   // || T*T f - 2 pi^2 f || / || f ||
    double residual_vs_pi2 = 0.0;     // || T*T f - pi^2 f || / || f ||
    double best_fit_constant = 0.0;   // <T*T f, f> / <f, f>
};

/// Composes apply_T and apply_T_star (intermediate kept on an extended domain
/// with its analytic 1/rho tail passed through) and reports the residuals.
TstarTReport verify_TstarT(const HalfLineFunction& f);

/// spec-facing scalar: residual against the 2 pi^2 constant
double verify_TstarT_residual(const HalfLineFunction& f);

/// principal-value quadrature oracles (symmetric excision of radius eps with the
/// analytic correction of the removed interval; domain truncated at X with the
/// analytic tail for compactly supported inputs)
double T_pv(const std::function<double(double)>& f, double rho, double X, double eps = 1e-6);
double Tstar_pv(const std::function<double(double)>& g, double rho, double X, double eps = 1e-6,
                double tail_coeff = 0.0);

}  // namespace fhc::halfline
