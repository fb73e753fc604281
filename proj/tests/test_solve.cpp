#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "splap/eigen.hpp"
#include "splap/errors.hpp"
#include "splap/solve.hpp"
#include "test_helpers.hpp"

using namespace splap;

TEST_CASE("invert_plap closed forms") {
    {
        const auto g = build_grid(1024, 1.0, 3);
        Field rhs(g, 1.0);
        const Field u = invert_plap(rhs, 2.0, 1e-10);
        // (1 - r^2)/6
        double worst = 0;
        for (int i = 0; i <= g->m(); ++i) {
            const double r = g->nodes[i];
            worst = std::max(worst, std::fabs(u[i] - (1.0 - r * r) / 6.0));
        }
        CHECK(worst / (1.0 / 6.0) < 1e-4);
        CHECK(sup_norm(u) == doctest::Approx(1.0 / 6.0).epsilon(1e-4));
    }
    {
        const auto g = build_grid(1024, 1.0, 3);
        Field rhs(g, 1.0);
        const Field u = invert_plap(rhs, 3.0, 1e-10);
        CHECK(sup_norm(u) == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-3));
    }
    {
        const auto g = build_grid(64, 1.0, 3);
        Field zero(g);
        const Field u = invert_plap(zero, 2.5, 1e-12);
        CHECK(sup_norm(u) == 0.0);
    }
}

TEST_CASE("invert_plap rejects negative data and keeps positivity") {
    const auto g = build_grid(64, 1.0, 3);
    Field rhs(g, 1.0);
    rhs[5] = -0.25;
    CHECK_THROWS_AS(invert_plap(rhs, 2.0, 1e-10), Error);

    Field ramp(g);
    for (int i = 0; i <= g->m(); ++i) ramp[i] = g->nodes[i];
    const Field u = invert_plap(ramp, 1.5, 1e-10);
    for (int i = 0; i < g->m(); ++i) CHECK(u[i] >= -1e-12);
}

TEST_CASE("pure singular solution: uniqueness via multi-start") {
    const auto g = build_grid(256, 3.0, 3);
    ProblemParams pr = testing::reference_params().pure_singular();
    pr.reg_index = 1;
    pr.delta = 1.0;
    pr.lambda = 1.0;
    const double tol = 1e-11;
    const auto ref = solve_pure_singular(pr, g, tol);
    CHECK(ref.residual_sup <= tol);
    // restart the generic Newton from three distinct seeds
    std::mt19937 rng(61);
    for (double scale : {0.2, 1.0, 4.0}) {
        Field seed = testing::random_interior_field(g, rng, scale * sup_norm(ref.u));
        const auto again = solve_full(pr, seed, {}, tol);
        CHECK(sup_diff(again.u, ref.u) <= 10 * tol * (1.0 + sup_norm(ref.u)));
    }
}

TEST_CASE("pure singular bracket is certified") {
    const auto g = build_grid(256, 3.0, 3);
    ProblemParams pr = testing::reference_params().pure_singular();
    pr.reg_index = 64;
    pr.lambda = 0.5;
    const auto r = solve_pure_singular(pr, g, 1e-11);
    REQUIRE(r.bracket.has_value());
    const auto& [sub, super] = *r.bracket;
    for (int j = 0; j <= g->m(); ++j) {
        CHECK(r.u[j] >= sub[j] - 1e-10);
        CHECK(r.u[j] <= super[j] + 1e-10);
    }
}

TEST_CASE("limit solve obeys the exact scaling covariance") {
    const auto g = build_grid(512, 3.0, 3);
    ProblemParams pr = testing::reference_params().pure_singular();
    pr.reg_index = kLimit;
    pr.p = 2.0;
    pr.delta = 3.0;
    pr.lambda = 1.0;
    const double tol = 1e-10;
    const auto u1 = solve_pure_singular(pr, g, tol);
    const auto u16 = solve_pure_singular(pr.with_lambda(16.0), g, tol);
    const Field scaled = scale_field(u1.u, 1.0, 16.0, pr);
    CHECK(sup_diff(u16.u, scaled) <= 10 * tol * sup_norm(u16.u) + 1e-12);
    // 16^{1/(delta+p-1)} = 2
    CHECK(sup_norm(u16.u) == doctest::Approx(2.0 * sup_norm(u1.u)).epsilon(1e-10));
}

TEST_CASE("large-n solve approaches the limit solution") {
    const auto g = build_grid(2048, 3.0, 3);
    ProblemParams pr = testing::reference_params().pure_singular();
    pr.p = 2.0;
    pr.delta = 1.0;
    pr.lambda = 1.0;
    pr.reg_index = 1'000'000;
    const auto finite = solve_pure_singular(pr, g, 1e-10);
    pr.reg_index = kLimit;
    const auto limit = solve_pure_singular(pr, g, 1e-10);
    CHECK(sup_diff(finite.u, limit.u) <= 1e-3);
    // ladder ordering: the finite-n solution sits below the limit
    double overshoot = 0;
    for (int j = 0; j <= g->m(); ++j)
        overshoot = std::max(overshoot, finite.u[j] - limit.u[j]);
    CHECK(overshoot <= 1e-8 * sup_norm(limit.u));
}

TEST_CASE("regularization ladder monotone with interior floor") {
    const auto g = build_grid(512, 3.0, 3);
    ProblemParams pr = testing::reference_params().pure_singular();
    pr.lambda = 1.0;
    std::vector<long> ns;
    for (long n = 1; n <= 256; n *= 4) ns.push_back(n);
    const auto ladder = regularization_ladder(pr, ns, g, 1e-11);
    const double sup = sup_norm(ladder.entries.back().second);
    CHECK(ladder.monotone_violation <= 1e-8 * sup);

    int j_half = 0;
    while (g->nodes[j_half] < 0.5) ++j_half;
    const double first = ladder.entries.front().second[j_half];
    CHECK(first > 0.0);
    for (const auto& [n, u] : ladder.entries) CHECK(u[j_half] >= first - 1e-12);

    // single-entry list: the extrapolated limit is the entry itself
    const std::vector<long> single = {8};
    const auto one = regularization_ladder(pr, single, g, 1e-11);
    CHECK(sup_diff(one.extrapolated_limit, one.entries.front().second) == 0.0);
}

TEST_CASE("sub-solution certification") {
    const auto g = build_grid(512, 3.0, 3);
    const EigenPair eigen = first_eigenpair(g, 2.0);
    ProblemParams pr = testing::reference_params();
    pr.p = 2.0;
    pr.delta = 3.0;
    pr.lambda = 1.0;
    pr.reg_index = kLimit;
    // exponent p/(delta+p-1) = 1/2; small c certifies
    const Field ub = sub_solution(pr, eigen, 1e-3);
    for (int j = 0; j < g->m(); ++j)
        CHECK(ub[j] == doctest::Approx(std::sqrt(1e-3 * eigen.phi1[j])).epsilon(1e-12));

    // c -> 0 gives a uniformly vanishing sub-solution
    CHECK(sup_norm(sub_solution(pr, eigen, 1e-9)) <
          1e-2 * sup_norm(sub_solution(pr, eigen, 1e-3)));

    // bisect to the certification boundary; twice that c must fail
    double lo = 1e-3, hi = 1e6;
    for (int it = 0; it < 60; ++it) {
        const double mid = std::sqrt(lo * hi);
        try {
            sub_solution(pr, eigen, mid);
            lo = mid;
        } catch (const Error&) {
            hi = mid;
        }
    }
    CHECK_THROWS_AS(sub_solution(pr, eigen, 2.0 * hi), Error);
    try {
        sub_solution(pr, eigen, 2.0 * hi);
    } catch (const Error& e) {
        CHECK(e.code() == std::string(errc::NotSubSolution));
    }
    // the finite-n shifted form also certifies and vanishes on the boundary
    ProblemParams fin = pr.with_reg_index(100);
    const Field ubn = sub_solution(fin, eigen, 1e-3);
    CHECK(ubn[g->m()] == 0.0);
}

TEST_CASE("super-solution construction and ordering") {
    const auto g = build_grid(512, 3.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.lambda = 0.01;
    pr.reg_index = 1000;
    const double T = calibrate_scaling_constant(3, 2.0, 2.0, g, 1e-10);
    const double delta0 = 18.9;  // measured lambda=0 ground-state scale
    const auto sup1 = super_solution(pr, g, T, delta0, 1e-10);
    CHECK(sup1.mu > 0.0);
    CHECK(sup_norm(sup1.w) <= sup1.mu * (1.0 + 1e-6));

    // lambda0 beyond the range of A
    CHECK_THROWS_AS(super_solution(pr.with_lambda(10.0), g, T, delta0, 1e-10), Error);
    try {
        super_solution(pr.with_lambda(10.0), g, T, delta0, 1e-10);
    } catch (const Error& e) {
        CHECK(e.code() == std::string(errc::NoSuchMu));
    }

    // ordering chain: certified sub-solution below the super-solution
    const EigenPair eigen = first_eigenpair(g, 2.0);
    const Field ub = sub_solution(pr, eigen, 1e-4);
    for (int j = 0; j <= g->m(); ++j) CHECK(ub[j] <= sup1.w[j] + 1e-10);
}

TEST_CASE("weak comparison: solution sits between certified sub and super") {
    const auto g = build_grid(512, 3.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.lambda = 0.01;
    pr.reg_index = 1000;
    const EigenPair eigen = first_eigenpair(g, 2.0);
    const double T = calibrate_scaling_constant(3, 2.0, 2.0, g, 1e-10);
    const Field ub = sub_solution(pr, eigen, 1e-4);          // residual <= 0
    const auto sp = super_solution(pr, g, T, 18.9, 1e-10);   // residual >= 0
    const auto sol = solve_full(pr, ub, {}, 1e-11);
    for (int j = 0; j <= g->m(); ++j) {
        CHECK(ub[j] <= sol.u[j] + 1e-8);
        CHECK(sol.u[j] <= sp.w[j] + 1e-8);
    }
}

TEST_CASE("solve_full finds two distinct solutions by deflation") {
    const auto g = build_grid(512, 3.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.lambda = 50.0;
    pr.reg_index = 1000;
    const EigenPair eigen = first_eigenpair(g, 2.0);
    const Field seed = sub_solution(pr, eigen, 1e-3);
    const auto minimal = solve_full(pr, seed, {}, 1e-11);
    CHECK(minimal.residual_sup <= 1e-11);

    Field seed2 = eigen.phi1;
    for (auto& v : seed2.values) v *= 20.0;
    const Field deflated[1] = {minimal.u};
    const auto second = solve_full(pr, seed2, deflated, 1e-11);
    CHECK(sup_diff(second.u, minimal.u) >= 1e-4);
    CHECK(sup_norm(second.u) > sup_norm(minimal.u) + 1.0);
}

TEST_CASE("no solution above the fold: Newton fails from every seed") {
    const auto g = build_grid(256, 3.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.lambda = 300.0;  // fold for this configuration is near 247
    pr.reg_index = 1000;
    std::mt19937 rng(67);
    for (double scale : {0.5, 3.0, 18.0}) {
        Field seed = testing::random_interior_field(g, rng, scale);
        CHECK_THROWS_AS(solve_full(pr, seed, {}, 1e-10, 120), Error);
    }
}

TEST_CASE("small-branch uniqueness below the slope-ratio radius") {
    const auto g = build_grid(512, 3.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.lambda = 60.0;
    pr.reg_index = 1000;
    const double radius = small_norm_radius(pr);
    CHECK(radius > 0.0);
    const double tol = 1e-11;
    const auto base = solve_pure_singular(pr.pure_singular(), g, tol);
    std::vector<Field> results;
    for (double t : {0.3, 0.6, 0.9}) {
        Field seed = base.u;
        const double s = sup_norm(base.u);
        for (auto& v : seed.values) v *= t * radius / s;
        results.push_back(solve_full(pr, seed, {}, tol).u);
        CHECK(sup_norm(results.back()) <= radius);
    }
    CHECK(sup_diff(results[0], results[1]) <= 10 * tol * (1 + sup_norm(results[0])));
    CHECK(sup_diff(results[1], results[2]) <= 10 * tol * (1 + sup_norm(results[1])));
}

TEST_CASE("full solution dominates the pure-singular one") {
    const auto g = build_grid(512, 3.0, 3);
    ProblemParams pr = testing::reference_params();
    pr.lambda = 5.0;
    pr.reg_index = 100;
    const auto pure = solve_pure_singular(pr.pure_singular(), g, 1e-11);
    const auto full = solve_full(pr, pure.u, {}, 1e-11);
    for (int j = 0; j <= g->m(); ++j) CHECK(full.u[j] >= pure.u[j] - 1e-8);
}

TEST_CASE("small_norm_radius grows with lambda") {
    ProblemParams pr = testing::reference_params();
    pr.reg_index = 1000;
    const double r1 = small_norm_radius(pr.with_lambda(1.0));
    const double r2 = small_norm_radius(pr.with_lambda(10.0));
    const double r3 = small_norm_radius(pr.with_lambda(100.0));
    CHECK(r1 < r2);
    CHECK(r2 < r3);
}
