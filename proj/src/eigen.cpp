#include "splap/eigen.hpp"

#include <cmath>
#include <sstream>

#include "splap/errors.hpp"
#include "splap/kernels.hpp"
#include "splap/solve.hpp"

namespace splap {

double rayleigh(const Field& u, double p) {
    const double denom = kernels::power_sum_weighted(u.grid->quad_weights, u.values, p);
    if (denom == 0.0) throw Error(errc::ZeroField, "Rayleigh quotient of the zero field");
    return seminorm_p(u, p) / denom;
}

EigenPair first_eigenpair(const GridPtr& grid, double p, double rel_tol,
                          const std::optional<Field>& seed) {
    const int m = grid->m();
    Field u(grid);
    if (seed) {
        u = *seed;
    } else {
        const double pc = p / (p - 1.0);
        for (int i = 0; i <= m; ++i) u[i] = 1.0 - std::pow(grid->nodes[i], pc);
    }
    u.values[m] = 0.0;
    {
        const double s = sup_norm(u);
        if (s == 0.0) throw Error(errc::ZeroField, "zero eigen iteration seed");
        for (double& v : u.values) v /= s;
    }

    double lam = rayleigh(u, p);
    const int cap = 400;
    for (int iter = 1; iter <= cap; ++iter) {
        Field rhs(grid);
        for (int j = 0; j < m; ++j) rhs[j] = lam * std::pow(std::max(u[j], 0.0), p - 1.0);
        Field v = invert_plap(rhs, p, 1e-11, 400);
        const double s = sup_norm(v);
        if (s == 0.0) throw Error(errc::NoConvergence, "inverse iteration collapsed to zero");
        for (double& x : v.values) x /= s;
        v.values[m] = 0.0;
        const double lam_new = rayleigh(v, p);
        u = std::move(v);
        const bool stationary = std::fabs(lam_new - lam) <= rel_tol * std::fabs(lam_new);
        lam = lam_new;
        if (stationary && iter >= 3) return EigenPair{lam, std::move(u), p};
    }
    std::ostringstream os;
    os << "Rayleigh quotient not stationary after " << cap << " iterations; last value " << lam;
    throw Error(errc::NoConvergence, os.str());
}

}  // namespace splap
