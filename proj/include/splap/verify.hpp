#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "splap/branch.hpp"
#include "splap/eigen.hpp"
#include "splap/grid.hpp"
#include "splap/solve.hpp"

namespace splap {

enum class CheckStatus { Pass, Fail, Inconclusive };

struct CheckResult {
    std::string name;
    std::string anchor;     // which claim the check exercises
    double measured = 0.0;
    double tolerance = 0.0;
    CheckStatus status = CheckStatus::Fail;
    std::string note;

    bool passed() const { return status == CheckStatus::Pass; }
};

struct VerificationReport {
    std::vector<CheckResult> checks;  // kept sorted by name
    std::string context;

    void add(CheckResult c);
    bool all_passed() const;  // Inconclusive does not count as failure
    int failures() const;
};

// sup-norm covariance of limit pure-singular solutions across lambda pairs:
// measured = max over pairs of sup|u_l' - (l'/l)^{1/(delta+p-1)} u_l| / sup u_l'.
CheckResult check_scaling_law(const ProblemParams& params,
                              std::span<const std::pair<double, double>> lambda_pairs,
                              const GridPtr& grid, double tol, double solver_tol);

// measured = ladder.monotone_violation, pass if <= tol.
CheckResult check_monotone_ladder(const LadderResult& ladder, double tol);

// One-sided boundary slope uniformly bounded below across the ladder by half
// the slope of its first member.
CheckResult check_uniform_hopf(const LadderResult& ladder);

// \int |phi1'|^p - \int (phi1^p/u^{p-1})' Phi_p(u') >= -tol by quadrature.
CheckResult check_picone(const Field& u, const EigenPair& eigen, double tol);

// Least-squares slope of log u vs log(1-r) over the boundary window compared
// against expected_exponent; pass if |slope - expected| <= 0.05.
// Throws Error{WindowTooSmall}.
CheckResult check_boundary_exponent(const Field& u, double expected_exponent,
                                    std::pair<double, double> window = {1e-4, 1e-2});

// Membership of u^alpha in the Dirichlet energy space by seminorm growth
// under mesh refinement (grids m, 2m, 4m): ratios <= 1.05 classify BOUNDED,
// >= 1.2 DIVERGING, otherwise Inconclusive.
std::vector<CheckResult> check_alpha_membership(const ProblemParams& params,
                                                std::span<const double> alphas, int base_m,
                                                double grading, double solver_tol);

// Smallest shooting-root sup-norm of -Delta_p u = u^q, plus a dense sub-delta0
// scan (100 samples below delta0/2) that must stay root-free.
CheckResult check_delta0(const ProblemParams& params, double M_lo, double M_hi, double ode_tol);

// Strict ordering u > v and strict boundary-slope gap for u, v solving
// -Delta_p = f_u, f_v with f_u >= f_v >= 0 and a strict gap somewhere.
// Throws Error{PreconditionNotMet}.
CheckResult check_comparison(const Field& u, const Field& v, const Field& f_u, const Field& f_v);

}  // namespace splap
