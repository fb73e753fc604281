#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "splap/errors.hpp"
#include "splap/params.hpp"

using namespace splap;

namespace {
ProblemParams make(int N, double p, double q, double delta, double lambda) {
    ProblemParams r;
    r.dim_N = N;
    r.p = p;
    r.q = q;
    r.delta = delta;
    r.lambda = lambda;
    r.reg_index = 1;
    return r;
}

std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}
}  // namespace

TEST_CASE("admissible exponent set") {
    // p_* - 1 = 3 for (N,p) = (3,2); q = 2 is inside the open interval
    CHECK_NOTHROW(validate_params(make(3, 2, 2, 2, 0.1)));
    // boundary q = p_* - 1 is excluded (open set)
    CHECK(code_of([] { validate_params(make(3, 2, 3, 2, 0.1)); }) == errc::OutOfExponentSet);
    // p = N violates p < N
    CHECK(code_of([] { validate_params(make(3, 3, 2, 2, 0.1)); }) == errc::OutOfExponentSet);
    CHECK(code_of([] { validate_params(make(3, 2, 0.9, 2, 0.1)); }) == errc::OutOfExponentSet);
    CHECK(code_of([] { validate_params(make(3, 1, 1.5, 2, 0.1)); }) == errc::OutOfExponentSet);
    CHECK(code_of([] { validate_params(make(3, 2, 2, 0, 0.1)); }) == errc::NonPositiveDelta);
    CHECK(code_of([] { validate_params(make(3, 2, 2, 2, -1)); }) == errc::NegativeLambda);
    // lambda = 0 is admitted (pure -Delta_p u = u^q sweeps start there)
    CHECK_NOTHROW(validate_params(make(3, 2, 2, 2, 0)));
}

TEST_CASE("validation is idempotent") {
    const ProblemParams p = validate_params(make(4, 2.5, 2.2, 1.5, 0.3));
    CHECK_NOTHROW(validate_params(p));
}

TEST_CASE("derived exponents closed forms") {
    {
        const auto d = derived_exponents(make(3, 2, 2, 3, 1));
        CHECK(d.scaling_exp == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(d.boundary_exp == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(d.alpha_threshold == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(d.serrin == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(d.p_conj == doctest::Approx(2.0).epsilon(1e-15));
    }
    {
        // delta -> 0+ limit of the closed forms
        const auto d = derived_exponents(make(3, 2, 2, 1e-12, 1));
        CHECK(d.scaling_exp == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(d.alpha_threshold == doctest::Approx(0.25).epsilon(1e-9));
    }
}

TEST_CASE("derived exponents are a pure function") {
    const auto a = derived_exponents(make(5, 2.7, 2.9, 1.3, 0.7));
    const auto b = derived_exponents(make(5, 2.7, 2.9, 1.3, 0.7));
    CHECK(a.serrin == b.serrin);
    CHECK(a.scaling_exp == b.scaling_exp);
    CHECK(a.boundary_exp == b.boundary_exp);
    CHECK(a.alpha_threshold == b.alpha_threshold);
    CHECK(a.p_conj == b.p_conj);
}

TEST_CASE("flat record round trip") {
    ProblemParams p = make(4, 2.5, 2.25, 1.75, 0.125);
    p.reg_index = kLimit;
    p.q_enabled = false;
    const auto rec = to_record(p);
    CHECK(rec.at("n") == "0");  // limit encodes as 0
    const ProblemParams back = from_record(rec);
    CHECK(back.dim_N == p.dim_N);
    CHECK(back.p == p.p);
    CHECK(back.q == p.q);
    CHECK(back.delta == p.delta);
    CHECK(back.lambda == p.lambda);
    CHECK(back.reg_index == kLimit);
    CHECK(back.q_enabled == false);
}
