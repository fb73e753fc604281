#include "splap/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "splap/errors.hpp"
#include "splap/kernels.hpp"

namespace splap {

namespace {

double sphere_surface(int dim_N) {
    // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim_N) / std::tgamma(0.5 * dim_N);
}

// x^N - y^N for 0 <= y <= x without cancellation when x ~ y.
double power_gap(double x, double y, double expo) {
    if (y <= 0.0) return std::pow(x, expo);
    return std::pow(y, expo) * std::expm1(expo * std::log1p((x - y) / y));
}

}  // namespace

GridPtr build_grid(int m, double grading, int dim_N) {
    if (m < 16) {
        std::ostringstream os;
        os << "m = " << m << " below the minimum of 16 nodes";
        throw Error(errc::TooCoarse, os.str());
    }
    if (grading < 1.0) throw Error(errc::ConfigInvalid, "grading must be >= 1");
    if (dim_N < 2) throw Error(errc::ConfigInvalid, "dim_N must be >= 2");

    auto grid = std::make_shared<RadialGrid>();
    grid->dim_N = dim_N;
    grid->grading = grading;
    grid->omega = sphere_surface(dim_N);

    grid->nodes.resize(m + 1);
    for (int i = 0; i <= m; ++i) {
        const double back = static_cast<double>(m - i) / m;
        grid->nodes[i] = 1.0 - std::pow(back, grading);
    }
    grid->nodes[0] = 0.0;
    grid->nodes[m] = 1.0;

    grid->h.resize(m);
    grid->r_mid.resize(m);
    grid->area_mid.resize(m);
    for (int i = 0; i < m; ++i) {
        grid->h[i] = grid->nodes[i + 1] - grid->nodes[i];
        grid->r_mid[i] = 0.5 * (grid->nodes[i] + grid->nodes[i + 1]);
        grid->area_mid[i] = std::pow(grid->r_mid[i], dim_N - 1);
    }

    // Node j owns [mid_{j-1}, mid_j] with mid_{-1}=0, mid_m=1; the r^{N-1}
    // measure is integrated exactly so total mass telescopes to 1/N.
    grid->cv_mass.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double lo = (j == 0) ? 0.0 : grid->r_mid[j - 1];
        const double hi = (j == m) ? 1.0 : grid->r_mid[j];
        grid->cv_mass[j] = power_gap(hi, lo, static_cast<double>(dim_N)) / dim_N;
    }
    grid->quad_weights.resize(m + 1);
    for (int j = 0; j <= m; ++j) grid->quad_weights[j] = grid->omega * grid->cv_mass[j];

    return grid;
}

double integrate(const Field& g) {
    return kernels::dot(g.grid->quad_weights, g.values);
}

std::vector<double> slope_correction(const RadialGrid& grid, double p) {
    const int m = grid.m();
    std::vector<double> gamma(m, 1.0);
    if (p == 2.0) return gamma;
    const double pc = p / (p - 1.0);
    for (int i = 0; i < m; ++i) {
        const double denom = power_gap(grid.nodes[i + 1], grid.nodes[i], pc);
        gamma[i] = pc * std::pow(grid.r_mid[i], pc - 1.0) * grid.h[i] / denom;
    }
    return gamma;
}

double seminorm_p(const Field& u, double s) {
    if (s < 1.0) throw Error(errc::PreconditionNotMet, "seminorm exponent must be >= 1");
    const RadialGrid& g = *u.grid;
    const int m = g.m();
    const std::vector<double> gamma = slope_correction(g, s);
    std::vector<double> slopes(m), mass(m);
    for (int i = 0; i < m; ++i) {
        slopes[i] = gamma[i] * (u[i + 1] - u[i]) / g.h[i];
        mass[i] = g.area_mid[i] * g.h[i] / gamma[i];
    }
    return g.omega * kernels::power_sum_weighted(mass, slopes, s);
}

double sup_norm(const Field& u) { return kernels::sup_abs(u.values); }

double sup_diff(const Field& a, const Field& b) {
    return kernels::sup_abs_diff(a.values, b.values);
}

Field scale_field(const Field& u, double lambda_from, double lambda_to,
                  const ProblemParams& params) {
    if (!params.is_limit() || params.q_enabled)
        throw Error(errc::ScalingNotExact,
                    "exact lambda-covariance requires the limit pure-singular problem");
    if (lambda_from <= 0.0 || lambda_to <= 0.0)
        throw Error(errc::PreconditionNotMet, "lambda values must be positive");
    const double expo = 1.0 / (params.delta + params.p - 1.0);
    const double factor = std::pow(lambda_to / lambda_from, expo);
    Field out = u;
    for (double& v : out.values) v *= factor;
    return out;
}

}  // namespace splap
