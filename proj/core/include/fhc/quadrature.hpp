#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace fhc::quad {

/// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
/// iteration on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int k) : x(k), w(k) {
        for (int i = 0; i < k; ++i) {
            double xi = std::cos(M_PI * (i + 0.75) / (k + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int j = 2; j <= k; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = k * (xi * p1 - p0) / (xi * xi - 1.0);
                const double dx = p1 / dp;
                xi -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = xi;
            for (int j = 2; j <= k; ++j) {
                const double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = k * (xi * p1 - p0) / (xi * xi - 1.0);
            x[i] = xi;
            w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
        }
    }
};

inline const GaussLegendre& gl32() {
    static const GaussLegendre g(32);
    return g;
}

template <class F>
double gl_panel(F&& f, double a, double b) {
    const auto& g = gl32();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(mid + half * g.x[i]);
    return half * s;
}

template <class F>
double gl_panels(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int i = 0; i < panels; ++i) s += gl_panel(f, a + i * h, a + (i + 1) * h);
    return s;
}

namespace detail {
template <class F>
double adaptive_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                     double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// adaptive Simpson with Richardson correction
template <class F>
double adaptive(F&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace fhc::quad
