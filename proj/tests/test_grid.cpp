#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "splap/errors.hpp"
#include "splap/grid.hpp"
#include "test_helpers.hpp"

using namespace splap;

namespace {
// brute-force quadrature oracle: \int_0^1 f(r) r^{N-1} dr on 10^6 uniform cells
double brute_force_radial(int dim_N, const std::function<double(double)>& f) {
    const int K = 1'000'000;
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
        const double r = (k + 0.5) / K;
        acc += f(r) * std::pow(r, dim_N - 1);
    }
    return acc / K;
}
}  // namespace

TEST_CASE("grid mass equals the ball volume") {
    {
        const auto g = build_grid(100, 1.0, 3);
        double sum = 0;
        for (double w : g->quad_weights) sum += w;
        CHECK(sum == doctest::Approx(4 * std::numbers::pi / 3).epsilon(1e-12));
        // uniform nodes under grading 1
        CHECK(g->nodes[50] == doctest::Approx(0.5).epsilon(1e-14));
    }
    {
        const auto g = build_grid(100, 2.0, 2);
        double sum = 0;
        for (double w : g->quad_weights) sum += w;
        CHECK(sum == doctest::Approx(std::numbers::pi).epsilon(1e-12));
        // grading compresses spacing toward r = 1
        CHECK(g->h.back() < 0.3 * g->h.front());
    }
    {
        const auto g = build_grid(16, 3.0, 5);
        Field one(g, 1.0);
        const double oracle = g->omega * brute_force_radial(5, [](double) { return 1.0; });
        CHECK(integrate(one) == doctest::Approx(oracle).epsilon(1e-6));
        CHECK(integrate(one) == doctest::Approx(8 * std::numbers::pi * std::numbers::pi / 15)
                                    .epsilon(1e-12));
    }
}

TEST_CASE("build_grid rejects coarse meshes") {
    CHECK_THROWS_AS(build_grid(15, 1.0, 3), Error);
    try {
        build_grid(8, 1.0, 3);
    } catch (const Error& e) {
        CHECK(e.code() == std::string(errc::TooCoarse));
    }
}

TEST_CASE("integrate worked examples") {
    const auto g3 = build_grid(256, 1.0, 3);
    Field one(g3, 1.0);
    CHECK(integrate(one) == doctest::Approx(4 * std::numbers::pi / 3).epsilon(1e-12));

    const auto g2 = build_grid(1024, 1.0, 2);
    Field r2(g2);
    for (int i = 0; i <= g2->m(); ++i) r2[i] = g2->nodes[i] * g2->nodes[i];
    // \int r^2 2 pi r dr = pi/2
    CHECK(integrate(r2) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));

    Field zero(g3);
    CHECK(integrate(zero) == 0.0);
}

TEST_CASE("integrate is linear") {
    const auto g = build_grid(200, 2.0, 3);
    std::mt19937 rng(11);
    const Field f = testing::random_interior_field(g, rng);
    const Field h = testing::random_perturbation(g, rng);
    const double a = 2.75, b = -1.5;
    Field comb(g);
    for (int i = 0; i <= g->m(); ++i) comb[i] = a * f[i] + b * h[i];
    const double lhs = integrate(comb);
    const double rhs = a * integrate(f) + b * integrate(h);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("refinement consistency for smooth integrands") {
    auto value = [](int m) {
        const auto g = build_grid(m, 1.0, 3);
        Field f(g);
        for (int i = 0; i <= m; ++i) f[i] = std::cos(3.0 * g->nodes[i]);
        return integrate(f);
    };
    const double e1 = std::fabs(value(64) - value(128));
    const double e2 = std::fabs(value(128) - value(256));
    CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("seminorm worked examples") {
    const auto g = build_grid(1024, 1.0, 2);
    {
        Field u(g);
        for (int i = 0; i <= g->m(); ++i) u[i] = 1.0 - g->nodes[i];
        // |u'| = 1 so the seminorm is the disk area
        CHECK(seminorm_p(u, 2.0) == doctest::Approx(std::numbers::pi).epsilon(1e-4));
    }
    {
        Field zero(g);
        CHECK(seminorm_p(zero, 2.0) == 0.0);
    }
}

TEST_CASE("seminorm divergence under refinement for (1-r)^(1/2)") {
    auto value = [](int m) {
        const auto g = build_grid(m, 1.0, 2);
        Field u(g);
        for (int i = 0; i <= m; ++i) u[i] = std::sqrt(1.0 - g->nodes[i]);
        return seminorm_p(u, 2.0);
    };
    const double v1 = value(512), v2 = value(1024), v3 = value(2048);
    CHECK(v2 / v1 > 1.05);
    CHECK(v3 / v2 > 1.05);
}

TEST_CASE("seminorm is invariant under sign flip") {
    const auto g = build_grid(128, 2.0, 3);
    std::mt19937 rng(7);
    Field u = testing::random_perturbation(g, rng);
    Field neg = u;
    for (auto& v : neg.values) v = -v;
    CHECK(seminorm_p(u, 2.7) == seminorm_p(neg, 2.7));
}

TEST_CASE("scale_field covariance factor and guards") {
    const auto g = build_grid(64, 1.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.reg_index = kLimit;
    pr.q_enabled = false;
    pr.p = 2.0;
    pr.delta = 3.0;
    std::mt19937 rng(3);
    const Field u = testing::random_interior_field(g, rng);
    const Field v = scale_field(u, 1.0, 16.0, pr);
    // 16^{1/4} = 2
    for (int i = 0; i <= g->m(); ++i) CHECK(v[i] == doctest::Approx(2.0 * u[i]).epsilon(1e-14));
    const Field w = scale_field(u, 5.0, 5.0, pr);
    CHECK(sup_diff(w, u) == 0.0);

    ProblemParams finite = pr;
    finite.reg_index = 10;
    CHECK_THROWS_AS(scale_field(u, 1.0, 2.0, finite), Error);
    try {
        scale_field(u, 1.0, 2.0, finite);
    } catch (const Error& e) {
        CHECK(e.code() == std::string(errc::ScalingNotExact));
    }
}
