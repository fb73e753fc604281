#include "splap/plap.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "splap/errors.hpp"
#include "splap/kernels.hpp"

namespace splap {

namespace {

// Phi_p(s) = |s|^{p-2} s, written so Phi_p(0) = 0 for every p > 1.
inline double phi_p(double s, double p) {
    if (s == 0.0) return 0.0;
    return std::copysign(std::pow(std::fabs(s), p - 1.0), s);
}

// d/ds Phi_p with the degeneracy regularized: (p-1)(s^2+eps^2)^{(p-2)/2}.
inline double dphi_p(double s, double p, double eps) {
    return (p - 1.0) * std::pow(s * s + eps * eps, 0.5 * (p - 2.0));
}

}  // namespace

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += lower[i] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> Tridiagonal::solve(std::span<const double> rhs) const {
    const std::size_t n = size();
    std::vector<double> c(n), d(n), x(n);
    double piv = diag[0];
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        c[i] = (i + 1 < n) ? upper[i] / piv : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

PlapStencil::PlapStencil(GridPtr g, double p_)
    : grid(std::move(g)), p(p_), gamma(slope_correction(*grid, p_)) {}

void PlapStencil::slopes(std::span<const double> u, std::span<double> out) const {
    const RadialGrid& g = *grid;
    const int m = g.m();
#pragma omp parallel for schedule(static) if (kernels::parallel_enabled())
    for (int i = 0; i < m; ++i) out[i] = gamma[i] * (u[i + 1] - u[i]) / g.h[i];
}

void PlapStencil::apply(std::span<const double> u, std::span<double> out) const {
    const RadialGrid& g = *grid;
    const int m = g.m();
    std::vector<double> flux(m);
    const bool par = kernels::parallel_enabled();
#pragma omp parallel for schedule(static) if (par)
    for (int i = 0; i < m; ++i) {
        const double slope = gamma[i] * (u[i + 1] - u[i]) / g.h[i];
        flux[i] = g.area_mid[i] * phi_p(slope, p);
    }
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < m; ++j) {
        const double left = (j == 0) ? 0.0 : flux[j - 1];  // u'(0)=0 symmetry flux
        out[j] = (left - flux[j]) / g.cv_mass[j];
    }
    out[m] = 0.0;
}

Tridiagonal PlapStencil::jacobian(std::span<const double> u, double eps) const {
    const RadialGrid& g = *grid;
    const int m = g.m();
    std::vector<double> k(m);
    const bool par = kernels::parallel_enabled();
#pragma omp parallel for schedule(static) if (par)
    for (int i = 0; i < m; ++i) {
        const double slope = gamma[i] * (u[i + 1] - u[i]) / g.h[i];
        k[i] = g.area_mid[i] * dphi_p(slope, p, eps) * gamma[i] / g.h[i];
    }
    Tridiagonal J;
    J.lower.assign(m, 0.0);
    J.diag.assign(m, 0.0);
    J.upper.assign(m, 0.0);
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < m; ++j) {
        const double kl = (j == 0) ? 0.0 : k[j - 1];
        J.diag[j] = (kl + k[j]) / g.cv_mass[j];
        if (j > 0) J.lower[j] = -k[j - 1] / g.cv_mass[j];
        if (j + 1 < m) J.upper[j] = -k[j] / g.cv_mass[j];
    }
    return J;
}

Field apply_plap(const Field& u, double p) {
    PlapStencil st(u.grid, p);
    Field out(u.grid);
    st.apply(u.values, out.values);
    return out;
}

double energy(const Field& u, const Field& rhs, double p) {
    const double grad_part = seminorm_p(u, p) / p;
    std::vector<double> prod(u.values.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = rhs.values[i] * u.values[i];
    return grad_part - kernels::dot(u.grid->quad_weights, prod);
}

namespace {

void add_reaction_terms(std::span<const double> u, const ProblemParams& params, int m,
                        std::span<double> out) {
    const double lam = params.lambda;
    const bool limit = params.is_limit();
    const double shift = params.shift();
    if (lam > 0.0 && limit) {
        for (int j = 0; j < m; ++j) {
            if (u[j] <= 0.0) {
                std::ostringstream os;
                os << "limit singular term undefined: u[" << j << "] = " << u[j];
                throw Error(errc::NonpositiveInterior, os.str());
            }
        }
    }
    const bool par = kernels::parallel_enabled();
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < m; ++j) {
        double f = 0.0;
        if (lam > 0.0) f += lam * std::pow(u[j] + shift, -params.delta);
        if (params.q_enabled && u[j] > 0.0) f += std::pow(u[j], params.q);
        out[j] -= f;
    }
}

}  // namespace

Field residual(const Field& u, const ProblemParams& params) {
    PlapStencil st(u.grid, params.p);
    Field out(u.grid);
    st.apply(u.values, out.values);
    add_reaction_terms(u.values, params, u.m(), out.values);
    out.values[u.m()] = 0.0;
    return out;
}

double residual_sup(const Field& u, const ProblemParams& params) {
    return sup_norm(residual(u, params));
}

namespace {

// Flux part of the residual plus a per-node roundoff bound: each interface
// flux F_i = A_i Phi_p(g_i) carries absolute noise ~ eps(|F_i| + A_i dPhi_i)
// where dPhi_i is the flux sensitivity to rounding of the nodal values.
void flux_core(const PlapStencil& st, std::span<const double> u, std::vector<double>& apply_part,
               std::vector<double>& floor_part) {
    const RadialGrid& g = *st.grid;
    const int m = g.m();
    const double p = st.p;
    constexpr double eps_m = 4.0 * std::numeric_limits<double>::epsilon();
    std::vector<double> flux(m), dflux(m);
    for (int i = 0; i < m; ++i) {
        const double slope = st.gamma[i] * (u[i + 1] - u[i]) / g.h[i];
        const double F = g.area_mid[i] * phi_p(slope, p);
        const double dg =
            st.gamma[i] * (std::fabs(u[i]) + std::fabs(u[i + 1])) / g.h[i] *
            std::numeric_limits<double>::epsilon();
        double dphi = std::pow(std::fabs(slope) + dg, p - 1.0) -
                      std::pow(std::fabs(slope), p - 1.0);
        if (slope != 0.0) dphi = std::min(dphi, dphi_p(slope, p, 0.0) * dg);
        flux[i] = F;
        dflux[i] = eps_m * std::fabs(F) + g.area_mid[i] * std::max(dphi, 0.0);
    }
    apply_part.assign(m + 1, 0.0);
    floor_part.assign(m + 1, 0.0);
    for (int j = 0; j < m; ++j) {
        const double left = (j == 0) ? 0.0 : flux[j - 1];
        const double dleft = (j == 0) ? 0.0 : dflux[j - 1];
        apply_part[j] = (left - flux[j]) / g.cv_mass[j];
        floor_part[j] = (dleft + dflux[j]) / g.cv_mass[j];
    }
}

}  // namespace

ScaledResidual scaled_residual(const Field& u, const ProblemParams& params) {
    PlapStencil st(u.grid, params.p);
    const int m = u.m();
    std::vector<double> apply_part, floor_part;
    flux_core(st, u.values, apply_part, floor_part);

    constexpr double eps_m = 4.0 * std::numeric_limits<double>::epsilon();
    const double lam = params.lambda;
    const bool limit = params.is_limit();
    const double shift = params.shift();
    ScaledResidual out;
    out.res = Field(u.grid);
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
        double src = 0.0, src_floor = 0.0;
        if (lam > 0.0) {
            if (limit && u[j] <= 0.0)
                throw Error(errc::NonpositiveInterior, "limit singular term undefined");
            const double f = lam * std::pow(u[j] + shift, -params.delta);
            src += f;
            src_floor += eps_m * (params.delta + 1.0) * f;
        }
        if (params.q_enabled && u[j] > 0.0) {
            const double gq = std::pow(u[j], params.q);
            src += gq;
            src_floor += eps_m * (params.q + 1.0) * gq;
        }
        const double r = apply_part[j] - src;
        out.res[j] = r;
        const double floor_j = floor_part[j] + src_floor;
        const double excess = std::max(std::fabs(r) - floor_j, 0.0);
        worst = std::max(worst, excess / (1.0 + src));
    }
    out.res[m] = 0.0;
    out.measure = worst;
    return out;
}

ScaledResidual scaled_residual(const Field& u, const Field& rhs, double p) {
    PlapStencil st(u.grid, p);
    const int m = u.m();
    std::vector<double> apply_part, floor_part;
    flux_core(st, u.values, apply_part, floor_part);
    constexpr double eps_m = 4.0 * std::numeric_limits<double>::epsilon();
    ScaledResidual out;
    out.res = Field(u.grid);
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
        const double r = apply_part[j] - rhs[j];
        out.res[j] = r;
        const double floor_j = floor_part[j] + eps_m * std::fabs(rhs[j]);
        const double excess = std::max(std::fabs(r) - floor_j, 0.0);
        worst = std::max(worst, excess / (1.0 + std::fabs(rhs[j])));
    }
    out.res[m] = 0.0;
    out.measure = worst;
    return out;
}

double residual_sup_scaled(const Field& u, const ProblemParams& params) {
    return scaled_residual(u, params).measure;
}

Tridiagonal linearize(const Field& u, const ProblemParams& params, const OperatorConfig& cfg) {
    PlapStencil st(u.grid, params.p);
    const int m = u.m();
    std::vector<double> slopes(m);
    st.slopes(u.values, slopes);
    const double eps = cfg.eps_degenerate * (1.0 + kernels::sup_abs(slopes));
    Tridiagonal J = st.jacobian(u.values, (params.p == 2.0) ? 0.0 : eps);

    const double lam = params.lambda;
    const bool limit = params.is_limit();
    const double shift = params.shift();
    if (lam > 0.0 && limit) {
        for (int j = 0; j < m; ++j)
            if (u[j] <= 0.0)
                throw Error(errc::NonpositiveInterior, "limit singular term undefined");
    }
    for (int j = 0; j < m; ++j) {
        if (lam > 0.0)
            J.diag[j] += lam * params.delta * std::pow(u[j] + shift, -params.delta - 1.0);
        if (params.q_enabled && u[j] > 0.0)
            J.diag[j] -= params.q * std::pow(u[j], params.q - 1.0);
    }
    return J;
}

}  // namespace splap
