#include "fhc/halfline.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fhc/quadrature.hpp"

namespace fhc::halfline {

HalfLineFunction HalfLineFunction::from_function(const std::function<double(double)>& f,
                                                 double L, int samples) {
    HalfLineFunction h;
    h.dx = L / samples;
    h.samples.resize(samples);
    for (int i = 0; i < samples; ++i) h.samples[i] = f(i * h.dx);
    return h;
}

double dawson(double x) {
    const double ax = std::abs(x);
    if (ax < 0.2) {
        const double x2 = x * x;
        return x * (1.0 + x2 * (-2.0 / 3.0 + x2 * (4.0 / 15.0 + x2 * (-8.0 / 105.0 +
                    x2 * (16.0 / 945.0 - x2 * 32.0 / 10395.0)))));
    }
    // Rybicki's series with h = 0.25; error ~ exp(-(pi/2h)^2) ~ 7e-18
    const double h = 0.25;
    const int n0 = 2 * static_cast<int>(std::floor(0.5 * (ax / h + 1.0))) - 1;  // odd near ax/h
    double sum = 0.0;
    for (int k = -30; k <= 30; k += 2) {
        const int n = n0 + k;
        const double d = ax - n * h;
        sum += std::exp(-d * d) / n;
    }
    const double val = sum / std::sqrt(M_PI);
    return x < 0 ? -val : val;
}

namespace {

std::mutex fftw_mutex;

// multiplier transform on the symmetrized padded buffer; parity = +1 (even
// extension, multiplier -i pi sign) or -1 (odd extension, multiplier +i pi sign)
VectorXd multiplier_transform(const VectorXd& f, int pad_factor, int out_samples, int parity) {
    const int M = static_cast<int>(f.size());
    const int Nfft = 2 * pad_factor * M;
    std::vector<std::complex<double>> buf(Nfft, 0.0), freq(Nfft);
    for (int i = 0; i < M; ++i) buf[i] = f[i];
    for (int i = 1; i < M; ++i) buf[Nfft - i] = parity * f[i];
    if (parity < 0) buf[0] = 0.0;

    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fwd = fftw_plan_dft_1d(Nfft, reinterpret_cast<fftw_complex*>(buf.data()),
                               reinterpret_cast<fftw_complex*>(freq.data()), FFTW_FORWARD,
                               FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(Nfft, reinterpret_cast<fftw_complex*>(freq.data()),
                               reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
                               FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    const std::complex<double> mult(0.0, (parity > 0) ? -M_PI : M_PI);
    freq[0] = 0.0;
    for (int k = 1; k < Nfft; ++k) {
        const double sgn = (k < Nfft / 2) ? 1.0 : (k > Nfft / 2 ? -1.0 : 0.0);
        freq[k] *= mult * sgn;
    }
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    VectorXd out(out_samples);
    for (int i = 0; i < out_samples; ++i) out[i] = buf[i].real() / Nfft;
    return out;
}

double integral_half_line(const VectorXd& f, double dx) {
    double s = 0.5 * f[0];
    for (int i = 1; i < f.size(); ++i) s += f[i];
    return s * dx;
}

double first_moment_half_line(const VectorXd& f, double dx) {
    double s = 0.0;
    for (int i = 1; i < f.size(); ++i) s += i * dx * f[i];
    return s * dx;
}

}  // namespace

ApplyResult apply_T(const HalfLineFunction& f, const ApplyOptions& opts) {
    const int M = static_cast<int>(f.samples.size());
    if (M < 8) throw std::invalid_argument("apply_T: too few samples");
    const double L = f.length();
    ApplyResult res;
    res.aliasing_estimate =
        std::abs(f.samples[M - 1]) / std::max(1e-300, f.samples.cwiseAbs().maxCoeff());

    const int out_samples = std::min(opts.out_factor, opts.pad_factor / 2) * M;
    VectorXd work = f.samples;
    const double integral = integral_half_line(work, f.dx);
    res.tail_coefficient = 2.0 * integral;

    double alpha = 0.0;
    const double sigma = L / 8.0;
    if (opts.template_correction) {
        alpha = integral / (sigma * std::sqrt(M_PI / 2.0));
        for (int i = 0; i < M; ++i) {
            const double x = i * f.dx;
            work[i] -= alpha * std::exp(-x * x / (2.0 * sigma * sigma));
        }
    }
    VectorXd out = multiplier_transform(work, opts.pad_factor, out_samples, +1);
    if (opts.template_correction) {
        const double s2 = std::sqrt(2.0) * sigma;
        for (int i = 0; i < out_samples; ++i)
            out[i] += alpha * 2.0 * std::sqrt(M_PI) * dawson(i * f.dx / s2);
    }
    res.out.samples = std::move(out);
    res.out.dx = f.dx;
    return res;
}

ApplyResult apply_T_star(const HalfLineFunction& g, const ApplyOptions& opts, double tail_coeff) {
    const int M = static_cast<int>(g.samples.size());
    if (M < 8) throw std::invalid_argument("apply_T_star: too few samples");
    const double L = g.length();
    ApplyResult res;
    res.aliasing_estimate =
        std::abs(g.samples[M - 1]) / std::max(1e-300, g.samples.cwiseAbs().maxCoeff());

    const int out_samples = std::min(opts.out_factor, opts.pad_factor / 2) * M;
    VectorXd work = g.samples;

    double beta = 0.0;
    const double sigma = L / 8.0;
    if (opts.template_correction) {
        const double m1 = first_moment_half_line(work, g.dx);
        beta = m1 / (sigma * sigma * sigma * std::sqrt(M_PI / 2.0));
        for (int i = 0; i < M; ++i) {
            const double x = i * g.dx;
            work[i] -= beta * x * std::exp(-x * x / (2.0 * sigma * sigma));
        }
    }
    VectorXd out = multiplier_transform(work, opts.pad_factor, out_samples, -1);
    if (opts.template_correction) {
        // T* [x e^{-x^2/(2 s^2)}] (rho) = s sqrt(2 pi) [1 - (sqrt(2) rho / s) D(rho/(sqrt(2) s))]
        const double s2 = std::sqrt(2.0) * sigma;
        for (int i = 0; i < out_samples; ++i) {
            const double rho = i * g.dx;
            out[i] += beta * sigma * std::sqrt(2.0 * M_PI) *
                      (1.0 - (std::sqrt(2.0) * rho / sigma) * dawson(rho / s2));
        }
    }
    if (tail_coeff != 0.0) {
        // input continues as tail_coeff / rho beyond the sampled domain
        for (int i = 0; i < out_samples; ++i) {
            const double rho = i * g.dx;
            out[i] += (rho > 0.0)
                          ? (tail_coeff / rho) * std::log((L + rho) / (L - rho + 1e-300))
                          : 2.0 * tail_coeff / L;   // limit rho -> 0
            if (i * g.dx >= L) break;                // correction valid below the grid end
        }
    }
    res.out.samples = std::move(out);
    res.out.dx = g.dx;
    res.tail_coefficient = tail_coeff;
    return res;
}

TstarTReport verify_TstarT(const HalfLineFunction& f) {
    ApplyOptions t_opts;
    t_opts.pad_factor = 8;
    t_opts.out_factor = 4;           // keep the slowly decaying intermediate
    ApplyResult Tf = apply_T(f, t_opts);

    ApplyOptions ts_opts;
    ts_opts.pad_factor = 4;
    ts_opts.out_factor = 1;
    ApplyResult TsTf = apply_T_star(Tf.out, ts_opts, Tf.tail_coefficient);

    const int M = static_cast<int>(f.samples.size());
    TstarTReport rep;
    double n_f = 0.0, n_paper = 0.0, n_pi2 = 0.0, dot = 0.0;
    for (int i = 0; i < M; ++i) {
        const double fi = f.samples[i];
        const double gi = TsTf.out.samples[i];
        n_f += fi * fi;
        dot += fi * gi;
        const double d1 = gi - 2.0 * M_PI * M_PI * fi;
        const double d2 = gi - M_PI * M_PI * fi;
        n_paper += d1 * d1;
        n_pi2 += d2 * d2;
    }
    rep.residual_vs_paper = std::sqrt(n_paper / n_f);
    rep.residual_vs_pi2 = std::sqrt(n_pi2 / n_f);
    rep.best_fit_constant = dot / n_f;
    return rep;
}

double verify_TstarT_residual(const HalfLineFunction& f) {
    return verify_TstarT(f).residual_vs_paper;
}

double T_pv(const std::function<double(double)>& f, double rho, double X, double eps) {
    auto integrand = [&](double rp) {
        return (f(rp) - f(rho)) * rho / ((rho - rp) * (rho + rp));
    };
    double v = 0.0;
    if (rho - eps > 0.0) v += quad::adaptive(integrand, 0.0, rho - eps, 1e-12, 44);
    v += quad::adaptive(integrand, rho + eps, X, 1e-12, 44);
    const double h = std::min(eps, 1e-4 * rho + 1e-8);
    const double fprime = (f(rho + h) - f(rho - h)) / (2.0 * h);
    v += -fprime * eps;                 // removed symmetric interval, leading term
    v += f(rho) * rho / X;              // tail for compactly supported f
    return 2.0 * v;
}

double Tstar_pv(const std::function<double(double)>& g, double rho, double X, double eps,
                double tail_coeff) {
    auto integrand = [&](double rp) {
        return (rp * g(rp) - rho * g(rho)) / ((rp - rho) * (rp + rho));
    };
    double v = 0.0;
    if (rho - eps > 0.0) v += quad::adaptive(integrand, 0.0, rho - eps, 1e-12, 44);
    v += quad::adaptive(integrand, rho + eps, X, 1e-12, 44);
    const double h = std::min(eps, 1e-4 * rho + 1e-8);
    const double gprime = (g(rho + h) - g(rho - h)) / (2.0 * h);
    v += eps * (g(rho) + rho * gprime) / rho;   // removed interval, leading term
    const double logf = std::log((X + rho) / (X - rho));
    v += -0.5 * g(rho) * logf / 1.0;            // -rho g(rho) int_X^inf drp/(rp^2-rho^2)
    v *= 2.0;
    if (tail_coeff != 0.0) v += (tail_coeff / rho) * logf;
    return v;
}

}  // namespace fhc::halfline
