#include "fhc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fhc/quadrature.hpp"

namespace fhc::kernels {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double pow_m32(double t) { return 1.0 / (t * std::sqrt(t)); }      // t^{-3/2}
double pow_m52(double t) { return 1.0 / (t * t * std::sqrt(t)); }  // t^{-5/2}

// Bernoulli polynomials B_2, B_4, B_6
double bern2(double x) { return x * x - x + 1.0 / 6.0; }
double bern4(double x) {
    const double x2 = x * x;
    return x2 * x2 - 2.0 * x2 * x + x2 - 1.0 / 30.0;
}
double bern6(double x) {
    const double x2 = x * x;
    return x2 * x2 * x2 - 3.0 * x2 * x2 * x + 2.5 * x2 * x2 - 0.5 * x2 + 1.0 / 42.0;
}

// sum_{l>=1} cos(l pi w) / (lambda + (l pi)^2), w in [0,2]
double cosine_sum(double lambda, double w) {
    const double x = 0.5 * std::abs(w);   // in [0,1]
    const double T1 = bern2(x);
    const double T2 = -bern4(x) / 3.0;
    const double T3 = 2.0 * bern6(x) / 45.0;
    // exact split 1/(L+a) = 1/a - L/a^2 + L^2/a^3 - L^3/(a^3(L+a)), a = (l pi)^2
    double rem = 0.0;
    const double l3 = lambda * lambda * lambda;
    for (int l = 1; l <= 40000; ++l) {
        const double a = (l * M_PI) * (l * M_PI);
        const double term = std::cos(l * M_PI * w) / (a * a * a * (lambda + a));
        rem += term;
        if (l > 8 && std::abs(l3 / (a * a * a * (lambda + a))) < 1e-24) break;
    }
    return T1 - lambda * T2 + lambda * lambda * T3 - l3 * rem;
}

}  // namespace

double gauss_2f1(double a, double b, double c, double z) {
    if (z == 1.0) {
        if (c - a - b <= 0.0) throw std::domain_error("gauss_2f1: divergent at z = 1");
        return std::tgamma(c) * std::tgamma(c - a - b) /
               (std::tgamma(c - a) * std::tgamma(c - b));
    }
    if (z > 1.0) throw std::domain_error("gauss_2f1: z must be <= 1");
    auto series = [](double aa, double bb, double cc, double zz) {
        double term = 1.0, sum = 1.0;
        for (int k = 0; k < 4000; ++k) {
            term *= (aa + k) * (bb + k) / ((cc + k) * (k + 1.0)) * zz;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    };
    if (z <= 0.5) return series(a, b, c, z);
    // connection at 1-z (valid for non-integer c-a-b; here c-a-b = 1/2)
    const double s = c - a - b;
    const double g1 = std::tgamma(c) * std::tgamma(s) / (std::tgamma(c - a) * std::tgamma(c - b));
    const double g2 = std::tgamma(c) * std::tgamma(-s) / (std::tgamma(a) * std::tgamma(b));
    const double om = 1.0 - z;
    return g1 * series(a, b, 1.0 - s, om) + g2 * std::pow(om, s) * series(c - a, c - b, 1.0 + s, om);
}

double green_function(double lambda, double u, double v, GreenMethod method, int n_img) {
    if (!(lambda > 0.0)) throw std::domain_error("green_function: lambda must be positive");
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
        throw std::domain_error("green_function: u, v must lie in [0,1]");
    if (method == GreenMethod::CosineSeries) {
        return 1.0 / lambda + cosine_sum(lambda, u - v) + cosine_sum(lambda, u + v);
    }
    const double sq = std::sqrt(lambda);
    if (n_img <= 0) {
        // geometric closed form of the image sum
        const double q = std::exp(-2.0 * sq);
        auto efold = [&](double w) {
            w = std::abs(w);
            if (w > 2.0) w = 4.0 - w;   // u+v <= 2 so one fold suffices
            return std::exp(-sq * w) + std::exp(-sq * (2.0 - w));
        };
        return (efold(u - v) + efold(u + v)) / (2.0 * sq * (1.0 - q));
    }
    auto k = [&](double w) { return std::exp(-sq * std::abs(w)) / (2.0 * sq); };
    double s = 0.0;
    for (int m = -n_img; m <= n_img; ++m) s += k(u - v + 2 * m) + k(u + v + 2 * m);
    return s;
}

double resolvent_kernel_V(double rho, double u, double v, GreenMethod method) {
    return rho * green_function(rho, u, v, method);
}

double v_normalization(double rho, double v, double tol) {
    return quad::adaptive([&](double u) { return resolvent_kernel_V(rho, u, v); }, 0.0, 1.0,
                          tol, 48);
}

namespace {

// sum_{m in Z} |w + 2m|^{-p} for p = 5/2 or 3/2, Euler-Maclaurin tail
template <double (*Pow)(double), int DPOW>
double image_power_sum(double w, int n_img) {
    double s = 0.0;
    for (int m = -n_img; m <= n_img; ++m) {
        const double t = std::abs(w + 2.0 * m);
        if (t == 0.0) throw SingularityError("image sum: argument on the lattice");
        s += Pow(t);
    }
    // midpoint Euler-Maclaurin tails; f(x) = (±w + 2x)^{-p}
    const double x0 = n_img + 0.5;
    for (double ww : {w, -w}) {
        const double t = ww + 2.0 * x0;
        if constexpr (DPOW == 5) {
            s += pow_m32(t) / 3.0;
            s -= (5.0 / 24.0) / (t * t * t * std::sqrt(t));   // f'(x0)/24
        } else {
            s += 1.0 / std::sqrt(t);
            s -= (3.0 / 24.0) * pow_m52(t);
        }
    }
    return s;
}

}  // namespace

double jump_kernel_q(double u, double up, int n_img) {
    if (u < 0.0 || u > 1.0 || up < 0.0 || up > 1.0)
        throw std::domain_error("jump_kernel_q: arguments must lie in [0,1]");
    if (u == up) throw SingularityError("jump_kernel_q: u == u'");
    const double c = 3.0 / (std::pow(2.0, 2.5) * kSqrtPi);
    return c * (image_power_sum<pow_m52, 5>(u + up, n_img) +
                image_power_sum<pow_m52, 5>(u - up, n_img));
}

double boundary_kernel_W_theta(double a, double b, double tol) {
    a = std::abs(a);
    b = std::abs(b);
    if (a == 0.0 && b == 0.0) throw SingularityError("boundary_kernel_W: (0,0)");
    static const double CW = 5.0 * std::pow(std::tgamma(0.25), 2) / (32.0 * M_PI);
    auto f = [&](double th) {
        const double s2 = std::sin(2.0 * th);
        const double den = a * a * std::sin(th) * std::sin(th) + b * b * std::cos(th) * std::cos(th);
        return std::pow(s2 * s2 / den, 1.25);
    };
    return CW * quad::adaptive(f, 0.0, 0.5 * M_PI, tol, 42);
}

namespace {

// Chebyshev interpolant (Clenshaw evaluation) on [a, b]
struct ChebInterp {
    double a = 0.0, b = 1.0;
    std::vector<double> coef;

    template <class F>
    void build(F&& f, double a_, double b_, int n) {
        a = a_;
        b = b_;
        std::vector<double> fx(n);
        for (int k = 0; k < n; ++k) {
            const double x = std::cos(M_PI * (k + 0.5) / n);
            fx[k] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
        }
        coef.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += fx[k] * std::cos(M_PI * j * (k + 0.5) / n);
            coef[j] = 2.0 * s / n;
        }
        coef[0] *= 0.5;
    }

    double eval(double x) const {
        const double t = (2.0 * x - a - b) / (b - a);
        double d = 0.0, dd = 0.0;
        for (int j = static_cast<int>(coef.size()) - 1; j >= 1; --j) {
            const double sv = d;
            d = 2.0 * t * d - dd + coef[j];
            dd = sv;
        }
        return t * d - dd + coef[0];
    }
};

// ratio function of the homogeneous kernel: W(A,B) = prefactor * A^{-5/2} * w(B/A)
struct WRatio {
    ChebInterp lo, hi;
    WRatio() {
        auto f = [](double z) {
            return gauss_2f1(1.25, 1.75, 3.5, std::min(1.0, 1.0 - z * z));
        };
        lo.build(f, 0.0, 0.7, 72);
        hi.build(f, 0.7, 1.0, 72);
    }
    double eval(double z) const { return (z <= 0.7) ? lo.eval(z) : hi.eval(z); }
};

const WRatio& w_ratio() {
    static const WRatio w;
    return w;
}

}  // namespace

double boundary_kernel_W(double a, double b) {
    a = std::abs(a);
    b = std::abs(b);
    const double A = std::max(a, b), B = std::min(a, b);
    if (A == 0.0) throw SingularityError("boundary_kernel_W: (0,0)");
    static const double CH = 3.0 * kSqrtPi / std::pow(2.0, 3.5);
    return CH / (A * A * std::sqrt(A)) * w_ratio().eval(B / A);
}

namespace {

// 1D reductions of W used by the tail integral of the double image sum:
//   c_w      = int_R W(1,t) dt
//   w_tail z = int_z^inf W(1,t) dt
struct WTailHelper {
    double c_half, c_inv;   // int_0^1 W(1,t) dt,  int_0^1 sqrt(s) W(1,s) ds
    WTailHelper() {
        c_half = quad::gl_panels([](double t) { return boundary_kernel_W(1.0, t); }, 0.0, 1.0, 8);
        c_inv = quad::gl_panels([](double s) { return std::sqrt(s) * boundary_kernel_W(1.0, s); },
                                0.0, 1.0, 8);
    }
    double c_w() const { return 2.0 * (c_half + c_inv); }
    double tail(double z) const {
        if (z <= 1.0) {
            return quad::gl_panels([](double t) { return boundary_kernel_W(1.0, t); }, z, 1.0, 4) +
                   c_inv;
        }
        // substitute t = 1/s and use homogeneity W(1,1/s) = s^{5/2} W(s,1)
        return quad::gl_panels(
            [](double s) { return std::sqrt(s) * boundary_kernel_W(1.0, s); }, 0.0, 1.0 / z, 4);
    }
};

const WTailHelper& wtail() {
    static const WTailHelper h;
    return h;
}

}  // namespace

double boundary_kernel_g(double u, double up, int v, int n_img) {
    if (v != 0 && v != 1) throw std::domain_error("boundary_kernel_g: v must be 0 or 1");
    const double alpha = u + v, beta = up + v;
    double total = 0.0;
    for (int m = -n_img; m <= n_img; ++m) {
        const double a = alpha + 2.0 * m;
        for (int mp = -n_img; mp <= n_img; ++mp) {
            const double b = beta + 2.0 * mp;
            if (a == 0.0 && b == 0.0)
                throw SingularityError("boundary_kernel_g: lattice corner singularity");
            total += boundary_kernel_W(a, b);
        }
    }
    // omitted lattice points ~ (1/4) * integral of W over the box complement
    const auto& h = wtail();
    const double X1 = 2.0 * n_img + 1.0 - alpha, X2 = 2.0 * n_img + 1.0 + alpha;
    const double Y1 = 2.0 * n_img + 1.0 - beta, Y2 = 2.0 * n_img + 1.0 + beta;
    double t1 = h.c_w() * 2.0 * (1.0 / std::sqrt(X1) + 1.0 / std::sqrt(X2));
    auto inner = [&](double x) {
        const double ax = std::abs(x);
        if (ax < 1e-12) {
            // finite limit: |x|^{-3/2} w_tail(Y/|x|) -> (2/3) W(1,0)-scale / Y^{3/2}
            return (2.0 / 3.0) * boundary_kernel_W(1.0, 0.0) *
                   (pow_m32(Y1) + pow_m32(Y2));
        }
        return pow_m32(ax) * (h.tail(Y1 / ax) + h.tail(Y2 / ax));
    };
    double t2 = 0.0;
    for (double sign : {-1.0, 1.0}) {
        const double X = (sign < 0) ? X1 : X2;
        double lo = 0.0, hi = 1.0;
        while (lo < X) {
            hi = std::min(hi, X);
            t2 += quad::gl_panel([&](double x) { return inner(sign * x); }, lo, hi);
            lo = hi;
            hi = 2.0 * hi;
        }
    }
    return total + 0.25 * (t1 + t2);
}

double boundary_kernel_g_quadrature(double u, double up, int v, double s_max,
                                    int panels_per_unit) {
    if (v != 0 && v != 1) throw std::domain_error("boundary_kernel_g_quadrature: v must be 0 or 1");
    const double vv = static_cast<double>(v);
    auto f = [&](double s) {
        if (s <= 0.0) return 4.0;
        const double rho = s * s * s * s;
        return 4.0 * resolvent_kernel_V(rho, u, vv) * resolvent_kernel_V(rho, up, vv);
    };
    // integrand decays like exp(-s^2 (dist_u + dist_up)); panels to s_max suffice
    const int panels = std::max(8, static_cast<int>(panels_per_unit * s_max));
    return quad::gl_panels(f, 0.0, s_max, panels);
}

double absorption_integral(double u, int v, int n_img) {
    if (v != 0 && v != 1) throw std::domain_error("absorption_integral: v must be 0 or 1");
    if (u <= 0.0 && v == 0) throw SingularityError("absorption_integral: u -> v singularity");
    if (u >= 1.0 && v == 1) throw SingularityError("absorption_integral: u -> v singularity");
    return kSqrtPi * image_power_sum<pow_m32, 3>(u + v, n_img);
}

std::vector<FormulaCheck> integral_formulas_selftest() {
    std::vector<FormulaCheck> out;

    auto quartic_resolvent = [](double a, double b) {
        // int_0^infty dl / (a^2 + b^2 l^4)
        const double L = 12.0 * std::sqrt(a / b) + 1.0;
        double val = quad::gl_panels([&](double l) { return 1.0 / (a * a + b * b * l * l * l * l); },
                                     0.0, L, 64);
        // alternating tail expansion in a^2/(b^2 L^4)
        double mult = 1.0;
        for (int k = 0; k < 30; ++k) {
            const double term = mult / (b * b * (4 * k + 3) * std::pow(L, 4 * k + 3));
            val += (k % 2 == 0 ? term : -term);
            mult *= (a * a) / (b * b);
            if (term < 1e-20) break;
        }
        return val;
    };

    {
        const double a = 1.0, b = 1.0;
        const double ref = M_PI / (std::pow(2.0 * a, 1.5) * std::sqrt(b));
        const double got = quartic_resolvent(a, b);
        out.push_back({"int dl/(a^2+b^2 l^4), a=b=1", got, ref, std::abs(got - ref)});
    }
    {
        const double a = 2.0, b = 0.5;
        const double ref = M_PI / (std::pow(2.0 * a, 1.5) * std::sqrt(b));
        const double got = quartic_resolvent(a, b);
        out.push_back({"int dl/(a^2+b^2 l^4), a=2 b=1/2", got, ref, std::abs(got - ref)});
    }
    {
        const double a1 = 1.0, b1 = 1.0, a2 = 2.0, b2 = 1.0;
        const double L = 14.0;
        double got = quad::gl_panels(
            [&](double l) {
                const double l4 = l * l * l * l;
                return 1.0 / ((a1 * a1 + b1 * b1 * l4) * (a2 * a2 + b2 * b2 * l4));
            },
            0.0, L, 96);
        // leading tail terms of 1/(b1^2 b2^2 l^8) (1 - (alpha+beta)/l^4 + ...)
        const double alpha = a1 * a1 / (b1 * b1), beta = a2 * a2 / (b2 * b2);
        got += (1.0 / (b1 * b1 * b2 * b2)) *
               (1.0 / (7.0 * std::pow(L, 7)) - (alpha + beta) / (11.0 * std::pow(L, 11)));
        const double ref = M_PI * (a1 * b2 + a2 * b1 + std::sqrt(a1 * b1 * a2 * b2)) /
                           (std::pow(2.0, 1.5) * std::pow(a1 * a2, 1.5) *
                            (std::sqrt(a1 * b2) + std::sqrt(a2 * b1)) * (a1 * b2 + a2 * b1));
        out.push_back({"int dl/((a1^2+b1^2 l^4)(a2^2+b2^2 l^4))", got, ref, std::abs(got - ref)});
    }
    {
        const double L = 50.0;
        double got = quad::gl_panels(
            [](double x) { return x * x / (1.0 + x * x * x * x); }, 0.0, L, 256);
        double mult = 1.0;   // tail of int x^{-2}/(1+x^{-4})
        for (int k = 0; k < 20; ++k) {
            const double term = mult / ((4 * k + 1) * std::pow(L, 4 * k + 1));
            got += (k % 2 == 0 ? term : -term);
            if (term < 1e-20) break;
        }
        got /= M_PI;   // (1/2pi) int_R = (1/pi) int_0^inf
        const double ref = std::pow(2.0, -1.5);
        out.push_back({"(1/2pi) int v^2/(1+v^4) dv", got, ref, std::abs(got - ref)});
    }
    return out;
}

double absorption_rate_b(double u, int v, const ModelParams& params) {
    return params.c_bd() * absorption_integral(u, v);
}

RateDecomposition rate_sign_report(const ModelParams& params, int grid_points) {
    RateDecomposition rep;
    rep.grid.resize(grid_points);
    for (int i = 0; i < grid_points; ++i)
        rep.grid[i] = static_cast<double>(i + 1) / (grid_points + 1);
    rep.r.setConstant(grid_points, grid_points, std::nan(""));
    rep.min_value = std::numeric_limits<double>::infinity();
    rep.min_u = rep.min_up = 0.0;
    const double cb = params.c_bulk(), cd = params.c_bd();
    for (int i = 0; i < grid_points; ++i) {
        for (int j = 0; j < grid_points; ++j) {
            if (i == j) continue;
            const double u = rep.grid[i], up = rep.grid[j];
            const double val = cb * jump_kernel_q(up, u) -
                               cd * (boundary_kernel_g(u, up, 0) + boundary_kernel_g(u, up, 1));
            rep.r(i, j) = val;
            if (val < rep.min_value) {
                rep.min_value = val;
                rep.min_u = u;
                rep.min_up = up;
            }
        }
    }
    rep.all_nonnegative = rep.min_value >= 0.0;
    return rep;
}

VectorXd KernelTable::default_u_grid(int m) {
    VectorXd g(m);
    for (int i = 0; i < m; ++i) g[i] = 0.5 * (1.0 - std::cos(M_PI * (i + 1.0) / (m + 1.0)));
    return g;
}

VectorXd KernelTable::default_rho_grid(int m) {
    VectorXd g(m);
    const double lo = std::log(1e-2), hi = std::log(1e4);
    for (int i = 0; i < m; ++i) g[i] = std::exp(lo + (hi - lo) * i / (m - 1.0));
    return g;
}

KernelTable KernelTable::build(const VectorXd& u_grid, const VectorXd& rho_grid, int n_img) {
    KernelTable t;
    t.u_grid = u_grid;
    t.rho_grid = rho_grid;
    const int mu = static_cast<int>(u_grid.size());
    const int mr = static_cast<int>(rho_grid.size());

    t.V0.resize(mu, mr);
    t.V1.resize(mu, mr);
    for (int i = 0; i < mu; ++i)
        for (int k = 0; k < mr; ++k) {
            t.V0(i, k) = resolvent_kernel_V(rho_grid[k], u_grid[i], 0.0);
            t.V1(i, k) = resolvent_kernel_V(rho_grid[k], u_grid[i], 1.0);
        }

    t.q.setConstant(mu, mu, std::nan(""));
    t.g0.resize(mu, mu);
    t.g1.resize(mu, mu);
    t.W.resize(mu, mu);
    for (int i = 0; i < mu; ++i) {
        for (int j = 0; j < mu; ++j) {
            if (i != j) t.q(i, j) = jump_kernel_q(u_grid[i], u_grid[j]);
            t.g0(i, j) = boundary_kernel_g(u_grid[i], u_grid[j], 0, n_img);
            t.g1(i, j) = boundary_kernel_g(u_grid[i], u_grid[j], 1, n_img);
            t.W(i, j) = boundary_kernel_W(u_grid[i], u_grid[j]);
        }
    }
    t.b0.resize(mu);
    t.b1.resize(mu);
    for (int i = 0; i < mu; ++i) {
        t.b0[i] = absorption_integral(u_grid[i], 0);
        t.b1[i] = absorption_integral(u_grid[i], 1);
    }
    t.metadata["n_img_g"] = std::to_string(n_img);
    t.metadata["u_points"] = std::to_string(mu);
    t.metadata["rho_points"] = std::to_string(mr);
    t.metadata["rho_min"] = std::to_string(rho_grid[0]);
    t.metadata["rho_max"] = std::to_string(rho_grid[mr - 1]);
    return t;
}

namespace {
void write_matrix(std::ostream& os, const std::string& name, const MatrixXd& M) {
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            os << name << ',' << i << ',' << j << ',' << buf << '\n';
        }
}
}  // namespace

void KernelTable::save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("KernelTable::save_csv: cannot open " + path);
    for (const auto& [k, v] : metadata) os << "# " << k << '=' << v << '\n';
    os << "kernel,i,j,value\n";
    write_matrix(os, "u", u_grid);
    write_matrix(os, "rho", rho_grid);
    write_matrix(os, "V0", V0);
    write_matrix(os, "V1", V1);
    write_matrix(os, "q", q);
    write_matrix(os, "g0", g0);
    write_matrix(os, "g1", g1);
    write_matrix(os, "W", W);
    write_matrix(os, "b0", b0);
    write_matrix(os, "b1", b1);
}

KernelTable KernelTable::load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("KernelTable::load_csv: cannot open " + path);
    KernelTable t;
    std::map<std::string, std::vector<std::tuple<int, int, double>>> data;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos)
                t.metadata[line.substr(2, eq - 2)] = line.substr(eq + 1);
            continue;
        }
        if (line.rfind("kernel,", 0) == 0) continue;
        std::istringstream ss(line);
        std::string name, si, sj, sv;
        std::getline(ss, name, ',');
        std::getline(ss, si, ',');
        std::getline(ss, sj, ',');
        std::getline(ss, sv, ',');
        data[name].emplace_back(std::stoi(si), std::stoi(sj), std::stod(sv));
    }
    auto to_matrix = [&](const std::string& name) {
        const auto& v = data.at(name);
        int rows = 0, cols = 0;
        for (const auto& [i, j, val] : v) {
            rows = std::max(rows, i + 1);
            cols = std::max(cols, j + 1);
        }
        MatrixXd M(rows, cols);
        for (const auto& [i, j, val] : v) M(i, j) = val;
        return M;
    };
    t.u_grid = to_matrix("u");
    t.rho_grid = to_matrix("rho");
    t.V0 = to_matrix("V0");
    t.V1 = to_matrix("V1");
    t.q = to_matrix("q");
    t.g0 = to_matrix("g0");
    t.g1 = to_matrix("g1");
    t.W = to_matrix("W");
    t.b0 = to_matrix("b0");
    t.b1 = to_matrix("b1");
    return t;
}

double KernelTable::interp_g(double u, double up, int v) const {
    const MatrixXd& G = (v == 0) ? g0 : g1;
    const int m = static_cast<int>(u_grid.size());
    auto locate = [&](double x) {
        int i = static_cast<int>(std::upper_bound(u_grid.data(), u_grid.data() + m, x) -
                                 u_grid.data()) - 1;
        return std::clamp(i, 0, m - 2);
    };
    const int i = locate(u), j = locate(up);
    const double tx = (u - u_grid[i]) / (u_grid[i + 1] - u_grid[i]);
    const double ty = (up - u_grid[j]) / (u_grid[j + 1] - u_grid[j]);
    return (1 - tx) * (1 - ty) * G(i, j) + tx * (1 - ty) * G(i + 1, j) +
           (1 - tx) * ty * G(i, j + 1) + tx * ty * G(i + 1, j + 1);
}

}  // namespace fhc::kernels
