#include "splap/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "splap/errors.hpp"
#include "splap/kernels.hpp"

namespace splap {

namespace {

double torsion_sup(int dim_N, double p) {
    return (p - 1.0) / p * std::pow(static_cast<double>(dim_N), -1.0 / (p - 1.0));
}

// Exact solution of -Delta_p u = level on the ball.
Field torsion_profile(const GridPtr& grid, double p, double level) {
    const double pc = p / (p - 1.0);
    const double amp =
        (p - 1.0) / p * std::pow(level / grid->dim_N, 1.0 / (p - 1.0));
    Field u(grid);
    const int m = grid->m();
    for (int i = 0; i <= m; ++i) u[i] = amp * (1.0 - std::pow(grid->nodes[i], pc));
    u[m] = 0.0;
    return u;
}

double weighted_l2(const Field& res) {
    double s = kernels::power_sum_weighted(res.grid->quad_weights, res.values, 2.0);
    return std::sqrt(s);
}

void clamp_floor(Field& u, double floor_v) {
    const int m = u.m();
    for (int j = 0; j < m; ++j) u[j] = std::max(u[j], floor_v);
    u[m] = 0.0;
}

void project_box(Field& u, const Field& lo, const Field& hi, double floor_v) {
    const int m = u.m();
    for (int j = 0; j < m; ++j) {
        const double bottom = std::max(lo[j], floor_v);
        u[j] = std::min(std::max(u[j], bottom), hi[j]);
    }
    u[m] = 0.0;
}

// Antiderivative term of the singular source: F'(u) = (u+shift)^{-delta}, so
// that the pure-singular residual is the gradient of a strictly convex energy
// used for line-search globalization.
double singular_energy(const Field& u, const ProblemParams& pr) {
    const double d = pr.delta;
    const double shift = pr.shift();
    const auto& w = u.grid->quad_weights;
    double acc = 0.0;
    for (std::size_t j = 0; j < u.values.size(); ++j) {
        const double base = u.values[j] + shift;
        if (base <= 0.0) return std::numeric_limits<double>::infinity();
        const double F = (d == 1.0) ? std::log(base) : std::pow(base, 1.0 - d) / (1.0 - d);
        acc += w[j] * F;
    }
    return seminorm_p(u, pr.p) / pr.p - pr.lambda * acc;
}

// Damped Newton on the convex pure-singular system, bracket-projected.
// Returns iterations used; u is updated in place to scaled residual <= tol.
int newton_singular(Field& u, const ProblemParams& pr, const Field& sub, const Field& super,
                    double tol, int cap) {
    const double floor_v = pr.is_limit() ? 1e-14 : 0.0;
    project_box(u, sub, super, floor_v);
    OperatorConfig cfg{1e-8, pr.p};
    ScaledResidual sr = scaled_residual(u, pr);
    double E0 = singular_energy(u, pr);
    const int m = u.m();
    int it = 0;
    while (sr.measure > tol) {
        if (++it > cap) {
            std::ostringstream os;
            os << "singular Newton stalled at residual " << sr.measure << " (tol " << tol << ")";
            throw Error(errc::NoConvergence, os.str());
        }
        Tridiagonal J = linearize(u, pr, cfg);
        std::vector<double> neg(m);
        for (int j = 0; j < m; ++j) neg[j] = -sr.res[j];
        std::vector<double> step = J.solve(neg);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60 && !accepted; ++ls, t *= 0.5) {
            Field trial = u;
            for (int j = 0; j < m; ++j) trial[j] = u[j] + t * step[j];
            project_box(trial, sub, super, floor_v);
            const double Et = singular_energy(trial, pr);
            ScaledResidual srt = scaled_residual(trial, pr);
            if (Et < E0 || srt.measure < sr.measure) {
                u = std::move(trial);
                sr = std::move(srt);
                E0 = Et;
                accepted = true;
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "line search exhausted at residual " << sr.measure;
            throw Error(errc::NoConvergence, os.str());
        }
    }
    return it;
}

Field aitken_fields(const Field& a, const Field& b, const Field& c, bool increasing) {
    Field out = c;
    for (std::size_t j = 0; j < c.values.size(); ++j) {
        const double d1 = b.values[j] - a.values[j];
        const double d2 = c.values[j] - b.values[j];
        const double den = d2 - d1;
        if (std::fabs(den) > 1e-30 + 1e-10 * (std::fabs(d1) + std::fabs(d2))) {
            double x = c.values[j] - d2 * d2 / den;
            if (increasing) x = std::max(x, c.values[j]);
            out.values[j] = x;
        }
    }
    return out;
}

SolveResult solve_pure_singular_finite(const ProblemParams& pr, const GridPtr& grid, double tol,
                                       double T_hint, const Field* seed_hint,
                                       const Field* sub_hint);

SolveResult solve_pure_singular_limit(const ProblemParams& pr, const GridPtr& grid, double tol,
                                      double T_hint) {
    const DerivedExponents dx = derived_exponents(pr);
    // regularization ladder n = 4^k, continuation-seeded
    std::vector<Field> last3;
    Field prev;
    SolveResult fin;
    long n = 1;
    int iters = 0;
    const int levels = 11;  // up to n = 4^10 ~ 1.05e6
    for (int k = 0; k < levels; ++k, n *= 4) {
        ProblemParams pn = pr.with_reg_index(n);
        const Field* sh = (k == 0) ? nullptr : &prev;
        fin = solve_pure_singular_finite(pn, grid, tol, T_hint, sh, sh);
        iters += fin.iterations;
        prev = fin.u;
        last3.push_back(fin.u);
        if (last3.size() > 3) last3.erase(last3.begin());
    }
    Field seed = (last3.size() == 3) ? aitken_fields(last3[0], last3[1], last3[2], true) : prev;

    const Field& sub = prev;  // ladder increases toward the limit
    double super_sup;
    if (T_hint > 0.0)
        super_sup = T_hint * std::pow(pr.lambda, dx.scaling_exp) * (1.0 + 1e-6) + 1e-12;
    else
        super_sup = 2.0 * sup_norm(seed) + 1.0;
    Field super(grid, super_sup);

    for (std::size_t j = 0; j + 1 < seed.values.size(); ++j)
        seed.values[j] = std::min(std::max(seed.values[j], sub.values[j]), super_sup);
    Field u = seed;
    iters += newton_singular(u, pr, sub, super, tol, 200);

    // boundary-layer resolution guard: the wall-adjacent value must track the
    // (1-r)^{p/(delta+p-1)} asymptotic within a factor of 10
    const int m = grid->m();
    const double on1 = 1.0 - grid->nodes[m - 1];
    const double on2 = 1.0 - grid->nodes[m - 2];
    const double predicted = u[m - 2] * std::pow(on1 / on2, dx.boundary_exp);
    if (predicted > 0.0 && u[m - 1] > 10.0 * predicted) {
        std::ostringstream os;
        os << "wall-adjacent value " << u[m - 1] << " exceeds asymptotic prediction " << predicted
           << " by more than 10x; refine or grade the mesh";
        throw Error(errc::MeshTooCoarseNearBoundary, os.str());
    }

    SolveResult out;
    out.residual_sup = residual_sup_scaled(u, pr);
    out.u = std::move(u);
    out.iterations = iters;
    out.bracket = std::make_pair(sub, super);
    return out;
}

SolveResult solve_pure_singular_finite(const ProblemParams& pr, const GridPtr& grid, double tol,
                                       double T_hint, const Field* seed_hint,
                                       const Field* sub_hint) {
    const long n = pr.reg_index;
    const DerivedExponents dx = derived_exponents(pr);
    const int m = grid->m();

    Field sub(grid);
    if (sub_hint) {
        sub = *sub_hint;
    } else if (n > 1) {
        sub = solve_pure_singular_finite(pr.with_reg_index(1), grid, tol, T_hint, nullptr, nullptr).u;
    }

    // upper bracket: invert_plap(lambda * n^delta) dominates the fixed point;
    // the calibrated sup-norm bound is tighter when available
    double super_sup = std::pow(pr.lambda * std::pow(static_cast<double>(n), pr.delta),
                                1.0 / (pr.p - 1.0)) *
                       torsion_sup(pr.dim_N, pr.p);
    if (T_hint > 0.0)
        super_sup = std::min(super_sup,
                             T_hint * std::pow(pr.lambda, dx.scaling_exp) * (1.0 + 1e-6) + 1e-12);
    Field super(grid, super_sup);

    const double shift = pr.shift();
    auto apply_S = [&](const Field& v, double inner_tol) {
        Field rhs(grid);
        for (int j = 0; j < m; ++j)
            rhs[j] = pr.lambda * std::pow(std::fabs(v[j]) + shift, -pr.delta);
        rhs[m] = 0.0;
        return invert_plap(rhs, pr.p, inner_tol, 400);
    };

    int iters = 0;
    Field u;
    if (seed_hint) {
        u = *seed_hint;
        project_box(u, sub, super, 0.0);
    } else {
        u = apply_S(sub, std::max(0.05 * tol, 1e-12));
        project_box(u, sub, super, 0.0);
        ++iters;
    }

    // damped Picard between the bracket
    double theta = 0.7;
    double rs = residual_sup_scaled(u, pr);
    for (int it = 0; it < 8 && rs > 1e-2; ++it) {
        Field su = apply_S(u, std::max(0.05 * tol, 1e-3 * rs));
        Field trial = u;
        for (int j = 0; j < m; ++j) trial[j] = u[j] + theta * (su[j] - u[j]);
        project_box(trial, sub, super, 0.0);
        const double rst = residual_sup_scaled(trial, pr);
        ++iters;
        if (rst < rs) {
            u = std::move(trial);
            rs = rst;
            theta = std::min(1.2 * theta, 1.0);
        } else {
            theta *= 0.5;
            if (theta < 1e-3) break;
        }
    }

    iters += newton_singular(u, pr, sub, super, tol, 200);

    SolveResult out;
    out.residual_sup = residual_sup_scaled(u, pr);
    out.u = std::move(u);
    out.iterations = iters;
    out.bracket = std::make_pair(std::move(sub), std::move(super));
    return out;
}

}  // namespace

Field invert_plap(const Field& rhs, double p, double tol, int max_iter) {
    const GridPtr& grid = rhs.grid;
    const int m = grid->m();
    for (int j = 0; j <= m; ++j)
        if (rhs[j] < 0.0) {
            std::ostringstream os;
            os << "rhs[" << j << "] = " << rhs[j] << " < 0";
            throw Error(errc::NegativeRhs, os.str());
        }
    const double rmax = sup_norm(rhs);
    if (rmax == 0.0) return Field(grid);

    PlapStencil st(grid, p);
    double level = integrate(rhs) / grid->ball_volume();
    if (level <= 0.0) level = rmax;
    Field u = torsion_profile(grid, p, level);

    ScaledResidual sr = scaled_residual(u, rhs, p);
    double E0 = energy(u, rhs, p);
    std::vector<double> slopes(m), neg(m);
    int iter = 0;
    while (sr.measure > tol) {
        if (++iter > max_iter) {
            std::ostringstream os;
            os << "inverse p-Laplacian stalled at residual " << sr.measure << " (tol " << tol
               << ")";
            throw Error(errc::NoConvergence, os.str());
        }
        st.slopes(u.values, slopes);
        const double eps = (p == 2.0) ? 0.0 : 1e-8 * (1.0 + kernels::sup_abs(slopes));
        Tridiagonal J = st.jacobian(u.values, eps);
        for (int j = 0; j < m; ++j) neg[j] = -sr.res[j];
        std::vector<double> step = J.solve(neg);
        // directional derivative of the energy along the step
        double dd = 0.0;
        for (int j = 0; j < m; ++j) dd += grid->cv_mass[j] * sr.res[j] * step[j];
        dd *= grid->omega;
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60 && !accepted; ++ls, t *= 0.5) {
            Field trial = u;
            for (int j = 0; j < m; ++j) trial[j] = u[j] + t * step[j];
            trial[m] = 0.0;
            const double Et = energy(trial, rhs, p);
            ScaledResidual srt = scaled_residual(trial, rhs, p);
            // near the optimum the energy comparison drops below double
            // precision; residual decrease still certifies progress
            if (Et <= E0 + 1e-4 * t * dd || srt.measure < sr.measure) {
                u = std::move(trial);
                E0 = Et;
                sr = std::move(srt);
                accepted = true;
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "energy line search exhausted at residual " << sr.measure << " (tol " << tol
               << ")";
            throw Error(errc::NoConvergence, os.str());
        }
    }
    return u;
}

double calibrate_scaling_constant(int dim_N, double p, double delta, const GridPtr& grid,
                                  double tol) {
    ProblemParams pr;
    pr.dim_N = dim_N;
    pr.p = p;
    pr.q = 0.5 * ((p - 1.0) + (serrin_exponent(dim_N, p) - 1.0));  // placeholder, q disabled
    pr.delta = delta;
    pr.lambda = 1.0;
    pr.reg_index = kLimit;
    pr.q_enabled = false;
    return sup_norm(solve_pure_singular(pr, grid, tol).u);
}

SolveResult solve_pure_singular(const ProblemParams& params, const GridPtr& grid, double tol,
                                double T_hint) {
    if (params.q_enabled)
        throw Error(errc::PreconditionNotMet, "pure-singular solver requires the q-term disabled");
    if (params.lambda == 0.0) {
        SolveResult out;
        out.u = Field(grid);
        out.bracket = std::make_pair(Field(grid), Field(grid));
        return out;
    }
    if (params.is_limit()) return solve_pure_singular_limit(params, grid, tol, T_hint);
    return solve_pure_singular_finite(params, grid, tol, T_hint, nullptr, nullptr);
}

LadderResult regularization_ladder(const ProblemParams& params, std::span<const long> n_list,
                                   const GridPtr& grid, double tol) {
    if (n_list.empty()) throw Error(errc::PreconditionNotMet, "n_list must be nonempty");
    for (std::size_t k = 0; k + 1 < n_list.size(); ++k)
        if (n_list[k + 1] <= n_list[k])
            throw Error(errc::PreconditionNotMet, "n_list must be strictly ascending");

    LadderResult out;
    Field prev;
    bool have_prev = false;
    for (long n : n_list) {
        const ProblemParams pn = params.with_reg_index(n);
        Field u;
        try {
            if (params.q_enabled) {
                Field seed = have_prev
                                 ? prev
                                 : solve_pure_singular(pn.pure_singular(), grid, tol).u;
                u = solve_full(pn, seed, {}, tol).u;
            } else {
                const Field* hint = have_prev ? &prev : nullptr;
                u = solve_pure_singular_finite(pn, grid, tol, 0.0, hint, hint).u;
            }
        } catch (const Error& e) {
            std::ostringstream os;
            os << "ladder entry n = " << n << ": " << e.what();
            throw Error(e.code(), os.str());
        }
        prev = u;
        have_prev = true;
        out.entries.emplace_back(n, std::move(u));
    }

    double viol = 0.0;
    for (std::size_t k = 0; k + 1 < out.entries.size(); ++k) {
        const auto& a = out.entries[k].second.values;
        const auto& b = out.entries[k + 1].second.values;
        for (std::size_t j = 0; j < a.size(); ++j) viol = std::max(viol, a[j] - b[j]);
    }
    out.monotone_violation = std::max(viol, 0.0);

    const std::size_t ne = out.entries.size();
    if (ne >= 3)
        out.extrapolated_limit =
            aitken_fields(out.entries[ne - 3].second, out.entries[ne - 2].second,
                          out.entries[ne - 1].second, true);
    else
        out.extrapolated_limit = out.entries.back().second;
    return out;
}

Field sub_solution(const ProblemParams& params, const EigenPair& eigen, double c) {
    if (c <= 0.0) throw Error(errc::PreconditionNotMet, "sub-solution scale c must be positive");
    if (params.lambda <= 0.0)
        throw Error(errc::PreconditionNotMet, "sub-solution construction needs lambda > 0");
    const DerivedExponents dx = derived_exponents(params);
    const double b = dx.boundary_exp;
    const GridPtr& grid = eigen.phi1.grid;
    const int m = grid->m();
    Field ub(grid);
    if (params.is_limit()) {
        for (int j = 0; j < m; ++j) ub[j] = std::pow(c * eigen.phi1[j], b);
    } else {
        const double shift = params.shift();
        const double nu = std::pow(shift, 1.0 / b);
        for (int j = 0; j < m; ++j) ub[j] = std::pow(c * eigen.phi1[j] + nu, b) - shift;
    }
    ub[m] = 0.0;

    const Field res = residual(ub, params.pure_singular());
    double worst = 0.0;
    int worst_j = -1;
    for (int j = 0; j < m; ++j) {
        if (res[j] > worst) {
            worst = res[j];
            worst_j = j;
        }
    }
    if (worst > 1e-8) {
        std::ostringstream os;
        os << "sub-solution inequality violated at node " << worst_j << " (r = "
           << grid->nodes[worst_j] << "): residual " << worst << "; c too large";
        throw Error(errc::NotSubSolution, os.str());
    }
    return ub;
}

SuperSolution super_solution(const ProblemParams& params, const GridPtr& grid, double T,
                             double delta0, double tol) {
    if (!params.q_enabled)
        throw Error(errc::PreconditionNotMet, "super-solution targets the full problem");
    if (T <= 0.0 || delta0 <= 0.0)
        throw Error(errc::PreconditionNotMet, "requires calibrated T and measured delta0");
    const double lambda0 = params.lambda;
    if (lambda0 <= 0.0) throw Error(errc::PreconditionNotMet, "lambda0 must be positive");

    const double p = params.p, q = params.q, d = params.delta;
    const double delta1 = 0.5 * std::pow(2.0 * q - 2.0 * p + 3.0, 1.0 / (p - q - 1.0)) *
                          std::pow(T, (d + p - 1.0) / (p - q - 1.0));
    const double delta2 = std::min(delta0, delta1);
    auto A = [&](double s) {
        return 0.5 * (std::pow(s / T, d + p - 1.0) - std::pow(s, d + q));
    };

    // smallest root of A(mu) = lambda0 on (0, delta2); A is positive near 0
    const int scan = 2048;
    double lo = 0.0, hi = -1.0, amax = 0.0;
    for (int k = 1; k <= scan; ++k) {
        const double s = delta2 * k / scan;
        const double a = A(s);
        amax = std::max(amax, a);
        if (a >= lambda0) {
            hi = s;
            lo = delta2 * (k - 1) / scan;
            break;
        }
    }
    if (hi < 0.0) {
        std::ostringstream os;
        os << "A(s) peaks at " << amax << " < lambda0 = " << lambda0
           << " on (0, " << delta2 << "); no admissible mu";
        throw Error(errc::NoSuchMu, os.str());
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * delta2; ++it) {
        const double mid = 0.5 * (lo + hi);
        (A(mid) >= lambda0 ? hi : lo) = mid;
    }
    const double mu = 0.5 * (lo + hi);
    const double lambda_star = std::pow(mu / T, d + p - 1.0);

    SuperSolution out;
    out.mu = mu;
    out.lambda_star = lambda_star;
    out.w = solve_pure_singular(params.with_lambda(lambda_star).pure_singular(), grid, tol, T).u;

    const Field res = residual(out.w, params);
    double worst = 0.0;
    for (int j = 0; j < grid->m(); ++j) worst = std::min(worst, res[j]);
    if (worst < -1e-8) {
        std::ostringstream os;
        os << "super-solution inequality violated: min residual " << worst;
        throw Error(errc::NotSuperSolution, os.str());
    }
    return out;
}

double small_norm_radius(const ProblemParams& params) {
    const double p = params.p, q = params.q, d = params.delta, lam = params.lambda;
    const double shift = params.shift();
    auto excess = [&](double M) {
        return (q - p + 1.0) * std::pow(M, q) * std::pow(M + shift, 1.0 + d) -
               lam * (p + d - 1.0) * M - (p - 1.0) * shift;
    };
    double lo = 1e-12, hi = 1.0;
    while (excess(hi) < 0.0 && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SolveResult solve_full(const ProblemParams& params, const Field& seed,
                       std::span<const Field> deflated, double tol, int max_iter) {
    const GridPtr& grid = seed.grid;
    const int m = grid->m();
    const double floor_v = (params.lambda > 0.0) ? 1e-14 : 0.0;
    OperatorConfig cfg{1e-8, params.p};

    Field u = seed;
    clamp_floor(u, floor_v);

    const auto& w = grid->quad_weights;
    auto dist2 = [&](const Field& a, const Field& b) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.values.size(); ++j) {
            const double d = a.values[j] - b.values[j];
            s += w[j] * d * d;
        }
        return std::max(s, 1e-300);
    };
    auto deflation_factor = [&](const Field& x) {
        double f = 1.0;
        for (const Field& uk : deflated) f *= 1.0 / dist2(x, uk) + 1.0;
        return f;
    };

    ScaledResidual sr = scaled_residual(u, params);
    double rs = sr.measure;
    double G = deflation_factor(u) * weighted_l2(sr.res);

    int it = 0;
    while (true) {
        if (rs <= tol) {
            for (const Field& uk : deflated) {
                if (sup_diff(u, uk) < 1e-4) {
                    throw Error(errc::ConvergedToDeflated,
                                "converged within 1e-4 sup-distance of a deflated solution");
                }
            }
            SolveResult out;
            out.u = std::move(u);
            out.residual_sup = rs;
            out.iterations = it;
            return out;
        }
        if (++it > max_iter) {
            std::ostringstream os;
            os << "no convergence after " << max_iter << " iterations; residual " << rs;
            throw Error(errc::NoConvergence, os.str());
        }

        Tridiagonal J = linearize(u, params, cfg);
        std::vector<double> neg(m);
        for (int j = 0; j < m; ++j) neg[j] = -sr.res[j];
        std::vector<double> step = J.solve(neg);

        // deflation rescales the Newton step along the same direction
        double tau = 1.0;
        if (!deflated.empty()) {
            const double Mfac = deflation_factor(u);
            double gs = 0.0;
            for (const Field& uk : deflated) {
                const double d2 = dist2(u, uk);
                double inner = 0.0;
                for (int j = 0; j < m; ++j) inner += w[j] * (u[j] - uk.values[j]) * step[j];
                gs += (Mfac / (1.0 / d2 + 1.0)) * (-2.0 / (d2 * d2)) * inner;
            }
            const double den = 1.0 - gs / Mfac;
            if (den > 1e-8) tau = std::clamp(1.0 / den, 0.05, 20.0);
        }

        double t = tau;
        bool accepted = false;
        for (int ls = 0; ls < 60 && !accepted; ++ls, t *= 0.5) {
            Field trial = u;
            for (int j = 0; j < m; ++j) trial[j] = u[j] + t * step[j];
            clamp_floor(trial, floor_v);
            ScaledResidual srt;
            try {
                srt = scaled_residual(trial, params);
            } catch (const Error&) {
                continue;
            }
            const double Gt = deflation_factor(trial) * weighted_l2(srt.res);
            if (Gt < G * (1.0 - 1e-4 * std::min(t / tau, 1.0))) {
                rs = srt.measure;
                u = std::move(trial);
                sr = std::move(srt);
                G = Gt;
                accepted = true;
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "deflated line search stalled at residual " << rs << " after " << it
               << " iterations";
            throw Error(errc::NoConvergence, os.str());
        }
    }
}

}  // namespace splap
