#pragma once

#include <span>
#include <vector>

#include "splap/grid.hpp"
#include "splap/params.hpp"

namespace splap {

// eps_degenerate regularizes |u'|^{p-2} only inside the Jacobian; operator
// application, energy and residual always use the exact degenerate form.
struct OperatorConfig {
    double eps_degenerate = 1e-8;
    double p = 2.0;
};

// Tridiagonal operator over the unknowns u_0..u_{m-1} (node m is Dirichlet).
struct Tridiagonal {
    std::vector<double> lower;  // lower[i] couples row i to i-1; lower[0] unused
    std::vector<double> diag;
    std::vector<double> upper;  // upper[i] couples row i to i+1; upper[n-1] unused

    std::size_t size() const { return diag.size(); }
    std::vector<double> apply(std::span<const double> x) const;
    // Thomas elimination; no pivoting (rows are strictly diagonally dominant
    // for the operators assembled here).
    std::vector<double> solve(std::span<const double> rhs) const;
};

// Precomputed per-(grid, p) geometry of the radial operator: interface areas
// and slope-correction factors.  Shared by the operator, its Jacobian and the
// energy so they describe the same discrete functional.
struct PlapStencil {
    GridPtr grid;
    double p;
    std::vector<double> gamma;  // slope corrections, size m

    PlapStencil(GridPtr g, double p_);

    // Corrected midpoint slopes g_i = gamma_i (u_{i+1}-u_i)/h_i.
    void slopes(std::span<const double> u, std::span<double> out) const;
    // out_j = -Delta_p u at node j in flux-difference form, j = 0..m-1;
    // out_m = 0 by convention.
    void apply(std::span<const double> u, std::span<double> out) const;
    // Energy Hessian contribution as a pointwise Jacobian (rows divided by
    // control-volume mass), eps-regularized.
    Tridiagonal jacobian(std::span<const double> u, double eps) const;
};

// -Delta_p u in radial conservative form, exact gradient of energy() below.
Field apply_plap(const Field& u, double p);

// (1/p) * seminorm_p(u, p) - integrate(rhs * u).
double energy(const Field& u, const Field& rhs, double p);

// apply_plap(u,p) - lambda*f_n(u) - u_+^q nodewise, where f_n(u)=(u+1/n)^{-delta}
// and the limit uses u^{-delta}.  Throws Error{NonpositiveInterior} when the
// limit problem sees a nonpositive interior node.  lambda == 0 drops the
// singular term entirely.
Field residual(const Field& u, const ProblemParams& params);

// Jacobian of residual() at u: diffusion (p-1)(g^2+eps^2)^{(p-2)/2} at
// midpoints plus the zeroth-order term lambda*delta*(u+1/n)^{-delta-1} - q u^{q-1}.
Tridiagonal linearize(const Field& u, const ProblemParams& params, const OperatorConfig& cfg);

// sup-norm of the unknown-node part of residual().
double residual_sup(const Field& u, const ProblemParams& params);

// Residual together with its convergence measure
//   measure = max_j (|res_j| - floor_j)_+ / (1 + src_j)
// where src_j is the local source magnitude and floor_j bounds the roundoff
// of evaluating the flux differences and the source at node j.  The raw
// pointwise residual inherits roundoff amplified by 1/h^2 on graded meshes
// and by u^{-delta-1} near the wall; the floored, source-scaled measure stays
// meaningful uniformly in mesh grading, so solvers converge against it.
struct ScaledResidual {
    Field res;
    double measure = 0.0;
};

ScaledResidual scaled_residual(const Field& u, const ProblemParams& params);
// Same for the plain inversion -Delta_p u = rhs.
ScaledResidual scaled_residual(const Field& u, const Field& rhs, double p);

double residual_sup_scaled(const Field& u, const ProblemParams& params);

}  // namespace splap
