#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "splap/errors.hpp"
#include "splap/plap.hpp"
#include "test_helpers.hpp"

using namespace splap;

TEST_CASE("apply_plap reproduces the radial torsion profile") {
    // -Delta_p of (p-1)/p N^{-1/(p-1)} (1 - r^{p/(p-1)}) is identically 1
    const auto g = build_grid(1024, 1.0, 3);
    const Field u = testing::torsion_exact(g, 3.0);
    const Field a = apply_plap(u, 3.0);
    for (int j = 0; j < g->m(); ++j) CHECK(a[j] == doctest::Approx(1.0).epsilon(1e-3));
    // the slope-corrected flux form is exact up to roundoff, not just 1e-3
    double worst = 0;
    for (int j = 0; j < g->m(); ++j) worst = std::max(worst, std::fabs(a[j] - 1.0));
    CHECK(worst < 1e-10);
}

TEST_CASE("apply_plap of zero is zero") {
    const auto g = build_grid(64, 2.0, 4);
    Field zero(g);
    const Field a = apply_plap(zero, 2.5);
    CHECK(sup_norm(a) == 0.0);
}

TEST_CASE("apply_plap matches the first Laplace eigenfunction") {
    // u = sin(pi r)/(pi r) satisfies -Delta u = pi^2 u on the ball (N=3)
    const auto g = build_grid(1024, 1.0, 3);
    Field u(g);
    for (int i = 0; i <= g->m(); ++i) {
        const double r = g->nodes[i];
        u[i] = (r == 0.0) ? 1.0 : std::sin(std::numbers::pi * r) / (std::numbers::pi * r);
    }
    u[g->m()] = 0.0;
    const Field a = apply_plap(u, 2.0);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int j = 0; j < g->m(); ++j)
        CHECK(a[j] == doctest::Approx(pi2 * u[j]).epsilon(1e-3));
}

TEST_CASE("homogeneity of degree p-1") {
    const auto g = build_grid(128, 2.0, 3);
    std::mt19937 rng(5);
    const Field u = testing::random_perturbation(g, rng);
    for (double p : {1.5, 2.0, 3.2}) {
        const double t = 2.37;
        Field tu = u;
        for (auto& v : tu.values) v *= t;
        const Field a = apply_plap(u, p);
        const Field b = apply_plap(tu, p);
        const double factor = std::pow(t, p - 1.0);
        for (int j = 0; j < g->m(); ++j)
            CHECK(b[j] == doctest::Approx(factor * a[j]).epsilon(1e-12));
    }
}

TEST_CASE("energy examples") {
    const auto g = build_grid(256, 1.0, 3);
    Field zero(g), one(g, 1.0);
    CHECK(energy(zero, one, 2.0) == 0.0);

    std::mt19937 rng(9);
    const Field u = testing::random_perturbation(g, rng);
    CHECK(energy(u, zero, 2.0) >= 0.0);
    CHECK(energy(u, zero, 2.0) == doctest::Approx(seminorm_p(u, 2.0) / 2).epsilon(1e-14));
}

TEST_CASE("torsion solution strictly minimizes the energy") {
    const auto g = build_grid(256, 1.0, 3);
    const Field u = testing::torsion_exact(g, 2.0);
    Field rhs(g, 1.0);
    const double E0 = energy(u, rhs, 2.0);
    std::mt19937 rng(17);
    for (int k = 0; k < 10; ++k) {
        const Field phi = testing::random_perturbation(g, rng, 1e-2);
        Field v = u;
        for (int i = 0; i <= g->m(); ++i) v[i] += phi[i];
        CHECK(energy(v, rhs, 2.0) > E0);
    }
}

TEST_CASE("variational consistency: operator equals the energy gradient") {
    const auto g = build_grid(96, 2.0, 3);
    std::mt19937 rng(23);
    const Field u = testing::random_interior_field(g, rng);
    Field rhs(g);
    for (int i = 0; i <= g->m(); ++i) rhs[i] = 0.5 + 0.25 * g->nodes[i];
    for (double p : {2.0, 2.8}) {
        const Field a = apply_plap(u, p);
        const double h = 1e-6;
        for (int j : {0, 5, 31, 60, 94, 95}) {
            Field up = u, um = u;
            up[j] += h;
            um[j] -= h;
            const double fd = (energy(up, rhs, p) - energy(um, rhs, p)) / (2 * h);
            const double grad = g->omega * g->cv_mass[j] * (a[j] - rhs[j]);
            CHECK(fd == doctest::Approx(grad).epsilon(1e-6));
            CHECK(std::fabs(fd - grad) <=
                  1e-10 + 1e-7 * std::max(std::fabs(fd), 1.0));  // absolute guard
        }
    }
}

TEST_CASE("residual worked examples") {
    const auto g = build_grid(512, 1.0, 3);
    const Field u = testing::torsion_exact(g, 2.0);
    ProblemParams pr = testing::reference_params();
    pr.p = 2.0;
    pr.lambda = 0.0;
    // at lambda = 0 the residual is apply(u) - u^q = 1 - u^q nodewise
    const Field res = residual(u, pr);
    for (int j = 0; j < g->m(); ++j)
        CHECK(res[j] == doctest::Approx(1.0 - std::pow(u[j], pr.q)).epsilon(1e-3));
}

TEST_CASE("limit residual rejects nonpositive interior values") {
    const auto g = build_grid(64, 1.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.reg_index = kLimit;
    Field u(g, 0.5);
    u[10] = 0.0;
    u[g->m()] = 0.0;
    CHECK_THROWS_AS(residual(u, pr), Error);
    try {
        residual(u, pr);
    } catch (const Error& e) {
        CHECK(e.code() == std::string(errc::NonpositiveInterior));
    }
}

TEST_CASE("linearize: p=2 reduces to the fixed Laplacian stencil") {
    const auto g = build_grid(64, 1.0, 3);
    std::mt19937 rng(31);
    const Field u = testing::random_interior_field(g, rng);
    const Field v = testing::random_interior_field(g, rng, 2.0);
    ProblemParams pr = testing::reference_params();
    pr.p = 2.0;
    pr.lambda = 0.0;
    pr.q_enabled = false;
    OperatorConfig cfg{0.0, 2.0};
    const Tridiagonal Ju = linearize(u, pr, cfg);
    const Tridiagonal Jv = linearize(v, pr, cfg);
    // diffusion coefficient == 1 regardless of the state
    for (std::size_t i = 0; i < Ju.size(); ++i) {
        CHECK(Ju.diag[i] == Jv.diag[i]);
        CHECK(Ju.upper[i] == Jv.upper[i]);
        CHECK(Ju.lower[i] == Jv.lower[i]);
    }
}

TEST_CASE("linearize matches finite differences of the residual") {
    const auto g = build_grid(128, 1.0, 3);
    std::mt19937 rng(37);
    ProblemParams pr = testing::reference_params();
    pr.reg_index = 10;
    pr.lambda = 0.7;
    for (int trial = 0; trial < 5; ++trial) {
        const Field u = testing::random_interior_field(g, rng, 1.0 + trial * 0.3);
        const Field v = testing::random_perturbation(g, rng);
        const Tridiagonal J = linearize(u, pr, OperatorConfig{1e-8, pr.p});
        const Field r0 = residual(u, pr);
        const auto Jv = J.apply(std::span<const double>(v.values.data(), J.size()));
        double err[2];
        int k = 0;
        for (double h : {1e-4, 1e-5}) {
            Field uh = u;
            for (int i = 0; i <= g->m(); ++i) uh[i] += h * v[i];
            const Field rh = residual(uh, pr);
            double worst = 0;
            for (std::size_t j = 0; j < J.size(); ++j)
                worst = std::max(worst, std::fabs((rh[j] - r0[j]) / h - Jv[j]));
            err[k++] = worst;
        }
        const double order = std::log10(err[0] / err[1]);
        CHECK(order >= 0.9);
    }
}

TEST_CASE("linearize stays finite at interior critical points for p < 2") {
    const auto g = build_grid(128, 1.0, 3);
    Field u(g);
    for (int i = 0; i <= g->m(); ++i) {
        const double r = g->nodes[i];
        u[i] = 16.0 * r * r * (1.0 - r) * (1.0 - r);  // u' = 0 at r = 1/2
    }
    u[g->m()] = 0.0;
    ProblemParams pr = testing::reference_params();
    pr.p = 1.5;
    pr.q = 1.2;  // inside (p-1, p_*-1) for p=1.5, N=3
    pr.lambda = 0.3;
    pr.reg_index = 10;
    const Tridiagonal J = linearize(u, pr, OperatorConfig{1e-8, pr.p});
    for (std::size_t i = 0; i < J.size(); ++i) {
        CHECK(std::isfinite(J.diag[i]));
        CHECK(std::isfinite(J.lower[i]));
        CHECK(std::isfinite(J.upper[i]));
    }
}

TEST_CASE("tridiagonal solve round trip") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> d(0.1, 1.0);
    const std::size_t n = 257;
    Tridiagonal T;
    T.lower.assign(n, 0.0);
    T.diag.assign(n, 0.0);
    T.upper.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) T.lower[i] = -d(rng);
        if (i + 1 < n) T.upper[i] = -d(rng);
        T.diag[i] = 2.5 + d(rng);
    }
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng) - 0.5;
    const auto b = T.apply(x);
    const auto y = T.solve(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-11));
}
