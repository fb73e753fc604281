#pragma once

#include <memory>
#include <vector>

#include "splap/params.hpp"

namespace splap {

// Radial mesh on [0,1] for the unit ball of R^N, vertex-centered.  Cell
// midpoints carry the one-sided slopes; each node owns the control volume
// between the midpoints of its two cells, with the r^{N-1} measure integrated
// exactly so that total mass telescopes to |B_1|.
//
// grading >= 1 compresses nodes toward r = 1 via r_i = 1 - (1 - i/m)^grading;
// the boundary layer of the singular problem behaves like (1-r)^{p/(delta+p-1)}
// and loses accuracy on uniform meshes.
struct RadialGrid {
    int dim_N = 3;
    double grading = 1.0;
    double omega = 0.0;                 // |S^{N-1}|
    std::vector<double> nodes;          // r_0 = 0 < ... < r_m = 1
    std::vector<double> h;              // cell widths, size m
    std::vector<double> r_mid;          // cell midpoints, size m
    std::vector<double> area_mid;       // r_mid^{N-1}, size m
    std::vector<double> cv_mass;        // per-node \int_cv r^{N-1} dr, size m+1
    std::vector<double> quad_weights;   // omega * cv_mass; sums to |B_1|

    int m() const { return static_cast<int>(nodes.size()) - 1; }
    double ball_volume() const { return omega / dim_N; }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Throws Error{TooCoarse} for m < 16; requires grading >= 1.
GridPtr build_grid(int m, double grading, int dim_N);

// Real-valued function sampled on the nodes of a shared grid.  Solution
// candidates carry the Dirichlet value values[m] == 0.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g, double fill = 0.0)
        : grid(std::move(g)), values(grid->nodes.size(), fill) {}
    Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {}

    int m() const { return grid->m(); }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

// \int_Omega g dx by the control-volume quadrature.
double integrate(const Field& g);

// \int_Omega |u'|^s dx with one-sided slopes at cell midpoints (corrected so
// that the radial profile 1 - r^{s/(s-1)} has exact slopes) and the matching
// midpoint quadrature.  Requires s >= 1.
double seminorm_p(const Field& u, double s);

// Midpoint slope correction factors gamma_i for exponent p: multiplying the
// one-sided difference by gamma_i reproduces u'(r_mid) exactly for profiles
// affine in r^{p/(p-1)}, which is how p-harmonic-type solutions behave at the
// origin.  gamma == 1 identically for p == 2.
std::vector<double> slope_correction(const RadialGrid& grid, double p);

double sup_norm(const Field& u);
double sup_diff(const Field& a, const Field& b);

// (lambda_to/lambda_from)^{1/(delta+p-1)} * u, the exact covariance of the
// limit pure-singular problem.  Throws Error{ScalingNotExact} when params
// select a finite regularization (the 1/n shift breaks homogeneity).
Field scale_field(const Field& u, double lambda_from, double lambda_to,
                  const ProblemParams& params);

}  // namespace splap
