#pragma once

#include <span>
#include <vector>

#include "splap/eigen.hpp"
#include "splap/grid.hpp"
#include "splap/params.hpp"

namespace splap {

enum class ShotKind { PositiveAtOne, CrossedBefore, Blowup };

// Outcome of integrating the radial initial value problem from center value M.
// gauge = u(1;M) when the trajectory stays positive, -(1 - r*) when it first
// crosses zero at r* < 1; continuous across the transition.
struct ShotOutcome {
    double M = 0.0;
    ShotKind kind = ShotKind::PositiveAtOne;
    double gauge = 0.0;
    int steps = 0;
};

enum class BranchTag { Lower, Upper };

struct DiagramPoint {
    double lambda;
    double M_root;
    double sup_norm;
    BranchTag tag;
};

struct BifurcationDiagram {
    std::vector<DiagramPoint> points;
    double fold_lambda = 0.0;   // largest lambda carrying >= 2 roots (bisection-refined)
    double picone_bound = 0.0;  // nonexistence upper barrier
    bool open_right = false;    // >= 2 roots persisted through the whole grid
    std::vector<std::pair<double, int>> root_counts;  // per-grid-lambda root count
};

struct ShootOptions {
    double ode_tol = 1e-10;
    int resolution = 400;      // M-scan samples
    double M_lo = 0.0;         // 0 = automatic
    double M_hi = 0.0;         // 0 = automatic
    double delta0 = 0.0;       // measured lambda=0 ground-state sup-norm, 0 = compute
    double scaling_T = 0.0;    // calibrated sup-norm constant, 0 = unknown
};

// Integrates (r^{N-1} Phi_p(u'))' = -r^{N-1}(lambda f_n(u) + u_+^q) from
// u(0)=M, u'(0)=0 on the flux variable w = r^{N-1}Phi_p(u'); adaptive embedded
// stepping, series start near the origin, event detection for the first zero.
// At the limit the gauge is extrapolated over n in {1e2,1e3,1e4}.
// Throws Error{StepUnderflow} reporting the last reliable radius.
ShotOutcome shoot(const ProblemParams& params, double M, double ode_tol);

// The shot trajectory sampled onto a grid by cubic Hermite interpolation of
// the accepted steps (finite reg_index only).
Field shot_field(const ProblemParams& params, double M, double ode_tol, const GridPtr& grid);

// Sign-change scan of the gauge over a geometric M-grid, bisection-refined to
// 1e-10 relative.  An empty list is a valid outcome (nonexistence).
std::vector<double> find_roots(const ProblemParams& params, double M_lo, double M_hi,
                               int resolution, double ode_tol);

// max over s of (lambda1 s^{p-1} - s^q)(s+1)^delta: no weak solution exists
// at or above this lambda.
double nonexistence_bound(double p, double q, double delta, double lambda1);
double nonexistence_bound(const ProblemParams& params, const EigenPair& eigen);

// find_roots per lambda (parallel across the grid), continuity branch tags,
// fold refined by bisection on "root count >= 2" to 1e-4 relative.
BifurcationDiagram sweep_lambda(const ProblemParams& params, std::span<const double> lambda_grid,
                                const EigenPair& eigen, const ShootOptions& options);

}  // namespace splap
