#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "splap/eigen.hpp"
#include "splap/grid.hpp"
#include "splap/plap.hpp"

namespace splap {

struct SolveResult {
    Field u;
    // sup of the source-scaled residual (see residual_sup_scaled); <= the
    // requested tolerance on success
    double residual_sup = 0.0;
    int iterations = 0;
    // Certified nodewise ordering bracket.first <= u <= bracket.second.
    std::optional<std::pair<Field, Field>> bracket;
};

struct LadderResult {
    std::vector<std::pair<long, Field>> entries;   // (n, u_n), ascending n
    Field extrapolated_limit;                      // nodewise Aitken acceleration
    double monotone_violation = 0.0;               // max over nodes, consecutive n of (u_n - u_{n+1})_+
};

// Unique minimizer of (1/p)\int|w'|^p dx - \int rhs*w dx over fields vanishing
// at r=1.  Damped Newton on the energy (preconditioned-gradient fallback keeps
// p < 2 robust); pointwise residual sup-norm <= tol at exit.
// Throws Error{NegativeRhs, NoConvergence}.
Field invert_plap(const Field& rhs, double p, double tol, int max_iter = 500);

// sup-norm of the lambda=1 limit pure-singular solution; the empirical
// constant in the sup-norm bound T * lambda^{1/(delta+p-1)}.
double calibrate_scaling_constant(int dim_N, double p, double delta, const GridPtr& grid,
                                  double tol);

// Pure singular problem -Delta_p u = lambda (u+1/n)^{-delta}.  Finite n:
// damped Picard on S(v) = invert_plap(lambda (|v|+1/n)^{-delta}) projected
// into the bracket, with a Newton finisher.  Limit: regularization ladder
// n = 4^k, nodewise extrapolation, then Newton on the singular equation with
// a positivity floor.  T_hint (0 = unknown) supplies the calibrated sup-norm
// constant for the upper bracket.
SolveResult solve_pure_singular(const ProblemParams& params, const GridPtr& grid, double tol,
                                double T_hint = 0.0);

// u_n for each n in ascending n_list (full problem when params.q_enabled,
// pure singular otherwise), seeded by continuation in n.
LadderResult regularization_ladder(const ProblemParams& params, std::span<const long> n_list,
                                   const GridPtr& grid, double tol);

// Weak sub-solution (c phi1)^{p/(delta+p-1)} at the limit, or the shifted
// finite-n form (c phi1 + n^{-(delta+p-1)/p})^{p/(delta+p-1)} - 1/n; certified
// by evaluating the pure-singular residual (<= +1e-8 nodewise).
// Throws Error{NotSubSolution} naming the violating node when c is too large.
Field sub_solution(const ProblemParams& params, const EigenPair& eigen, double c);

struct SuperSolution {
    Field w;             // pure-singular solution at the boosted parameter
    double mu = 0.0;     // root of A(mu) = lambda0 on (0, delta2)
    double lambda_star = 0.0;  // (mu/T)^{delta+p-1}
};

// Super-solution of the full problem at lambda0 = params.lambda from the
// barrier construction A(s) = ((s/T)^{delta+p-1} - s^{delta+q})/2.  delta0 is
// the measured minimum sup-norm of the lambda=0 problem.
// Throws Error{NoSuchMu} when A never reaches lambda0 on (0, delta2), and
// Error{NotSuperSolution} if the certification fails.
SuperSolution super_solution(const ProblemParams& params, const GridPtr& grid, double T,
                             double delta0, double tol);

// Radius on which the slope ratio F_n(s) = (lambda (s+1/n)^{-delta} + s^q)/s^{p-1}
// is decreasing: the unique root of
//   lambda (p+delta-1) M + (p-1)/n = (q-p+1) M^q (M+1/n)^{1+delta}.
// The full problem has at most one solution with sup-norm below this radius.
double small_norm_radius(const ProblemParams& params);

// Damped Newton on the full residual with deflation factor
// prod_k (1/||u - u_k||^2 + 1) keeping iterates away from known solutions.
// The returned solution is distinct from every deflated one by sup-distance
// >= 1e-4.  Throws Error{NoConvergence, ConvergedToDeflated}.
SolveResult solve_full(const ProblemParams& params, const Field& seed,
                       std::span<const Field> deflated, double tol, int max_iter = 200);

}  // namespace splap
