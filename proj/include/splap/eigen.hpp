#pragma once

#include <optional>

#include "splap/grid.hpp"

namespace splap {

// First Dirichlet eigenpair of -Delta_p on the unit ball.  phi1 has sup-norm
// one and positive interior values.
struct EigenPair {
    double lambda1 = 0.0;
    Field phi1;
    double p = 2.0;
};

// seminorm_p(u, p) / integrate(|u|^p).  Throws Error{ZeroField}.
double rayleigh(const Field& u, double p);

// Inverse-power iteration phi <- invert_plap(rayleigh * phi^{p-1}), sup-norm
// renormalized, until the Rayleigh quotient is stationary to rel_tol.
// Throws Error{NoConvergence} with the last Rayleigh value after the cap.
EigenPair first_eigenpair(const GridPtr& grid, double p, double rel_tol = 1e-10,
                          const std::optional<Field>& seed = std::nullopt);

}  // namespace splap
