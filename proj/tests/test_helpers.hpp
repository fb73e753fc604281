#pragma once

#include <cmath>
#include <random>

#include "splap/grid.hpp"
#include "splap/params.hpp"

namespace splap::testing {

inline ProblemParams reference_params() {
    ProblemParams p;
    p.dim_N = 3;
    p.p = 2.0;
    p.q = 2.0;
    p.delta = 2.0;
    p.lambda = 0.1;
    p.reg_index = 1000;
    return p;
}

// Smooth positive field vanishing at r = 1, randomized coefficients.
inline Field random_interior_field(const GridPtr& grid, std::mt19937& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> coef(0.2, 1.0);
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    Field u(grid);
    const int m = grid->m();
    for (int i = 0; i <= m; ++i) {
        const double r = grid->nodes[i];
        u[i] = scale * (1.0 - r * r) * (a + b * r + c * r * r);
    }
    u[m] = 0.0;
    return u;
}

// Sign-indefinite smooth perturbation vanishing at r = 1.
inline Field random_perturbation(const GridPtr& grid, std::mt19937& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double a = coef(rng), b = coef(rng), k = 1.0 + 3.0 * std::fabs(coef(rng));
    Field v(grid);
    const int m = grid->m();
    for (int i = 0; i <= m; ++i) {
        const double r = grid->nodes[i];
        v[i] = scale * (1.0 - r) * (a * std::sin(k * r) + b * r);
    }
    v[m] = 0.0;
    return v;
}

inline Field torsion_exact(const GridPtr& grid, double p) {
    const double pc = p / (p - 1.0);
    const double amp = (p - 1.0) / p * std::pow(1.0 * grid->dim_N, -1.0 / (p - 1.0));
    Field u(grid);
    for (int i = 0; i <= grid->m(); ++i) u[i] = amp * (1.0 - std::pow(grid->nodes[i], pc));
    u[grid->m()] = 0.0;
    return u;
}

}  // namespace splap::testing
