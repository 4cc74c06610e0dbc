#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fhc/kernels.hpp"
#include "fhc/quadrature.hpp"

using namespace fhc;
using namespace fhc::kernels;

TEST_CASE("green function: methods, symmetry, resolvent mass") {
    SUBCASE("image sum vs cosine series to 1e-8 on a grid") {
        for (double lam : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            for (double u : {0.0, 0.15, 0.5, 0.85, 1.0}) {
                for (double v : {0.0, 0.3, 0.99}) {
                    const double a = green_function(lam, u, v, GreenMethod::ImageSum);
                    const double b = green_function(lam, u, v, GreenMethod::CosineSeries);
                    CHECK(std::abs(a - b) / a < 1e-8);
                }
            }
        }
    }
    SUBCASE("symmetry") {
        CHECK(green_function(3.7, 0.2, 0.7) ==
              doctest::Approx(green_function(3.7, 0.7, 0.2)).epsilon(1e-12));
    }
    SUBCASE("mass: int int G = 1/lambda") {
        for (double lam : {0.5, 4.0}) {
            const double mass = quad::adaptive(
                [&](double u) {
                    return quad::adaptive([&](double v) { return green_function(lam, u, v); },
                                          0.0, 1.0, 1e-12);
                },
                0.0, 1.0, 1e-11);
            CHECK(mass == doctest::Approx(1.0 / lam).epsilon(1e-8));
        }
    }
    SUBCASE("positivity and domain errors") {
        CHECK(green_function(100.0, 0.1, 0.9) > 0.0);
        CHECK_THROWS_AS(green_function(-1.0, 0.5, 0.5), std::domain_error);
    }
    SUBCASE("truncated image sum converges: doubling N_img changes < 1e-9") {
        for (double lam : {0.5, 20.0}) {
            const double a = green_function(lam, 0.3, 0.4, GreenMethod::ImageSum, 60);
            const double b = green_function(lam, 0.3, 0.4, GreenMethod::ImageSum, 120);
            CHECK(std::abs(a - b) < 1e-9);
        }
    }
    SUBCASE("weak resolvent identity: int G_lam (lam phi - phi'') = phi(v)") {
        // smooth Neumann test function phi = cos(pi u): phi'(0) = phi'(1) = 0
        const double lam = 2.0;
        for (double v : {0.25, 0.6}) {
            auto phi = [](double u) { return std::cos(M_PI * u); };
            auto rhs = [&](double u) {
                return (lam + M_PI * M_PI) * phi(u);   // lam phi - phi'' with phi'' = -pi^2 phi
            };
            const double got = quad::adaptive(
                [&](double u) { return green_function(lam, u, v) * rhs(u); }, 0.0, 1.0, 1e-12);
            CHECK(got == doctest::Approx(phi(v)).epsilon(1e-9));
        }
    }
}

TEST_CASE("V_rho: normalization and localization") {
    SUBCASE("int_0^1 V_rho(u,v) du = 1 for tabulated rho, v in {0,1}") {
        const auto rho_grid = KernelTable::default_rho_grid();
        for (int k = 0; k < rho_grid.size(); ++k) {
            CHECK(std::abs(v_normalization(rho_grid[k], 0.0) - 1.0) < 1e-8);
            CHECK(std::abs(v_normalization(rho_grid[k], 1.0) - 1.0) < 1e-8);
        }
    }
    SUBCASE("large rho: mass 1 but localized near u = v") {
        for (double rho : {1e2, 1e4}) {
            const double width = 10.0 / std::sqrt(rho);
            const double near = quad::adaptive(
                [&](double u) { return resolvent_kernel_V(rho, u, 0.0); }, 0.0,
                std::min(1.0, width), 1e-11);
            CHECK(near > 0.99);
        }
    }
}

TEST_CASE("jump kernel q") {
    SUBCASE("symmetry and singularity guard") {
        CHECK(jump_kernel_q(0.3, 0.6) == doctest::Approx(jump_kernel_q(0.6, 0.3)).epsilon(1e-13));
        CHECK_THROWS_AS(jump_kernel_q(0.4, 0.4), SingularityError);
    }
    SUBCASE("near-diagonal exponent -5/2 via log-log slope") {
        const double u = 0.5;
        const double q2 = jump_kernel_q(u, u + 1e-2);
        const double q3 = jump_kernel_q(u, u + 1e-3);
        const double slope = std::log(q3 / q2) / std::log(1e-3 / 1e-2);
        CHECK(slope == doctest::Approx(-2.5).epsilon(0.02));
    }
    SUBCASE("tail robustness: doubling the image count changes < 1e-9 relative") {
        const double a = jump_kernel_q(0.3, 0.7, 24);
        const double b = jump_kernel_q(0.3, 0.7, 48);
        CHECK(std::abs(a - b) / a < 1e-9);
    }
    SUBCASE("fractional Laplacian consistency on cosine modes") {
        // int q(u',u) [phi(u') - phi(u)] du' = -(pi l)^{3/2} phi(u)
        const double u0 = 0.37;
        for (int l : {1, 2}) {
            auto phi = [l](double x) { return std::sqrt(2.0) * std::cos(M_PI * l * x); };
            const double eps = 1e-5;
            auto integrand = [&](double up) { return jump_kernel_q(up, u0) * (phi(up) - phi(u0)); };
            double val = quad::adaptive(integrand, 0.0, u0 - eps, 1e-11, 40) +
                         quad::adaptive(integrand, u0 + eps, 1.0, 1e-11, 40);
            // removed interval: principal value kills the odd term; the quadratic
            // term contributes K phi''(u0) * 2 sqrt(eps)
            const double K = 3.0 / (std::pow(2.0, 2.5) * std::sqrt(M_PI));
            val += K * (-std::pow(M_PI * l, 2) * phi(u0)) * 2.0 * std::sqrt(eps);
            const double target = -std::pow(M_PI * l, 1.5) * phi(u0);
            CHECK(std::abs(val - target) / std::abs(target) < 1e-4);
        }
    }
}

TEST_CASE("boundary kernel W") {
    SUBCASE("symmetry") {
        CHECK(boundary_kernel_W(1.0, 0.4) ==
              doctest::Approx(boundary_kernel_W(0.4, 1.0)).epsilon(1e-14));
    }
    SUBCASE("theta integral vs hypergeometric closed form") {
        for (auto [a, b] : std::vector<std::pair<double, double>>{
                 {1.0, 0.5}, {1.0, 0.4}, {2.3, 1.1}, {1.0, 1.0}, {5.0, 0.1}}) {
            const double wt = boundary_kernel_W_theta(a, b);
            const double wh = boundary_kernel_W(a, b);
            CHECK(std::abs(wt - wh) / wh < 1e-8);
        }
    }
    SUBCASE("homogeneity of degree -5/2") {
        const double w1 = boundary_kernel_W(0.7, 0.3);
        const double w2 = boundary_kernel_W(1.4, 0.6);
        CHECK(w2 == doctest::Approx(w1 * std::pow(2.0, -2.5)).epsilon(1e-12));
    }
    SUBCASE("frozen value at (1.0, 0.5)") {
        // independent oracle: adaptive theta-integral evaluated once and frozen
        CHECK(boundary_kernel_W(1.0, 0.5) == doctest::Approx(0.96480167273793).epsilon(1e-10));
    }
}

TEST_CASE("boundary kernel g: image sum vs resolvent quadrature") {
    for (auto [u, up, v] : std::vector<std::tuple<double, double, int>>{
             {0.3, 0.6, 0}, {0.5, 0.25, 0}, {0.3, 0.6, 1}, {0.8, 0.9, 1}}) {
        const double gi = boundary_kernel_g(u, up, v);
        const double gq = boundary_kernel_g_quadrature(u, up, v);
        CHECK(std::abs(gi - gq) / gq < 1e-4);
    }
    SUBCASE("frozen cross-check value g(0.3, 0.6; 0)") {
        // rho-quadrature oracle computed at tolerance 1e-10 and frozen
        CHECK(boundary_kernel_g(0.3, 0.6, 0) == doctest::Approx(7.8767339).epsilon(2e-6));
    }
    SUBCASE("symmetry in (u, u')") {
        CHECK(boundary_kernel_g(0.3, 0.6, 0) ==
              doctest::Approx(boundary_kernel_g(0.6, 0.3, 0)).epsilon(1e-10));
    }
}

TEST_CASE("absorption kernel b") {
    SUBCASE("closed form vs direct u'-quadrature of g at u = 0.4") {
        const double closed = absorption_integral(0.4, 0);
        const double direct = quad::gl_panels(
            [&](double up) { return boundary_kernel_g(0.4, up, 0, 48); }, 0.0, 1.0, 12);
        CHECK(std::abs(closed - direct) / closed < 1e-4);
    }
    SUBCASE("boundary divergence: b(u;0) u^{3/2} -> sqrt(pi)") {
        const double u = 1e-3;
        const double val = absorption_integral(u, 0) * std::pow(u, 1.5);
        CHECK(std::abs(val - std::sqrt(M_PI)) / std::sqrt(M_PI) < 1e-2);
    }
    SUBCASE("reflection symmetry b(u;0) = b(1-u;1)") {
        for (double u : {0.2, 0.5, 0.9})
            CHECK(absorption_integral(u, 0) ==
                  doctest::Approx(absorption_integral(1.0 - u, 1)).epsilon(1e-12));
    }
    SUBCASE("singularity guard") {
        CHECK_THROWS_AS(absorption_integral(0.0, 0), SingularityError);
    }
}

TEST_CASE("integral formulas selftest ([PAPER] constants)") {
    const auto checks = integral_formulas_selftest();
    REQUIRE(checks.size() == 4);
    for (const auto& c : checks) {
        INFO(c.name);
        CHECK(c.abs_error < 1e-10);
    }
    // the Levy constant (1/2pi) int v^2/(1+v^4) dv = 2^{-3/2} ~ 0.353553
    CHECK(checks.back().reference == doctest::Approx(0.35355339059327373).epsilon(1e-15));
}

TEST_CASE("rate decomposition and sign report") {
    ModelParams params(32, 1.0, 1.0, 1.0, 1.0);
    const auto rep = rate_sign_report(params, 9);

    SUBCASE("symmetry r(u,u') = r(u',u)") {
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < i; ++j)
                CHECK(rep.r(i, j) == doctest::Approx(rep.r(j, i)).epsilon(1e-9));
    }
    SUBCASE("near-diagonal positivity (q singularity dominates)") {
        for (int i = 0; i + 1 < 9; ++i) CHECK(rep.r(i, i + 1) > 0.0);
    }
    SUBCASE("report carries the minimum and its location") {
        CHECK(rep.min_value <= rep.r(0, 8));
        CHECK(rep.min_u > 0.0);
        CHECK(rep.min_up > 0.0);
    }
    SUBCASE("golden regression at gamma = gamma_tilde = 1") {
        // regression only, not ground truth
        std::ifstream is(std::string(FHC_TEST_DATA) + "/rate_golden_gamma1.csv");
        REQUIRE(is.good());
        std::string header;
        std::getline(is, header);
        int i, j;
        char comma;
        double value;
        while (is >> i >> comma >> j >> comma >> value) {
            CHECK(rep.r(i, j) == doctest::Approx(value).epsilon(1e-9));
        }
    }
}

TEST_CASE("kernel table build, serialize, interpolate") {
    const auto u_grid = KernelTable::default_u_grid(17);
    const auto rho_grid = KernelTable::default_rho_grid(9);
    const auto table = KernelTable::build(u_grid, rho_grid, 32);

    SUBCASE("round trip through CSV") {
        const std::string path = "kernel_table_test.csv";
        table.save_csv(path);
        const auto loaded = KernelTable::load_csv(path);
        CHECK((loaded.u_grid - table.u_grid).cwiseAbs().maxCoeff() == 0.0);
        CHECK((loaded.g0 - table.g0).cwiseAbs().maxCoeff() == 0.0);
        CHECK((loaded.V1 - table.V1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(loaded.metadata.at("n_img_g") == "32");
        std::remove(path.c_str());
    }
    SUBCASE("interpolation reproduces nodes and is accurate between them") {
        const double at_node = table.interp_g(u_grid[5], u_grid[7], 0);
        CHECK(at_node == doctest::Approx(table.g0(5, 7)).epsilon(1e-12));
        const double mid_u = 0.5 * (u_grid[5] + u_grid[6]);
        const double mid = table.interp_g(mid_u, u_grid[7], 0);
        const double exact = boundary_kernel_g(mid_u, u_grid[7], 0, 32);
        CHECK(std::abs(mid - exact) / exact < 5e-3);
    }
    SUBCASE("grids cluster near the endpoints") {
        CHECK(u_grid[1] - u_grid[0] < u_grid[9] - u_grid[8]);
    }
}
