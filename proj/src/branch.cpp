#include "splap/branch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <vector>

#include "splap/errors.hpp"
#include "splap/kernels.hpp"
#include "splap/solve.hpp"

namespace splap {

namespace {

// Radial IVP on the flux variable: u' = Phi_p^{-1}(w r^{1-N}),
// w' = -r^{N-1} (lambda f_n(u) + u_+^q).  The flux form keeps the system
// regular at r = 0 and at critical points of u for p != 2.
struct ShotSystem {
    const ProblemParams& pr;
    double exp_inv;  // 1/(p-1)

    explicit ShotSystem(const ProblemParams& p_) : pr(p_), exp_inv(1.0 / (p_.p - 1.0)) {}

    double source(double u) const {
        double s = 0.0;
        if (pr.lambda > 0.0) {
            const double base =
                pr.is_limit() ? std::max(u, 1e-300) : std::max(u, 0.0) + pr.shift();
            s += pr.lambda * std::pow(base, -pr.delta);
        }
        if (pr.q_enabled && u > 0.0) s += std::pow(u, pr.q);
        return s;
    }

    void deriv(double r, double u, double w, double& du, double& dw) const {
        const double area = std::pow(r, pr.dim_N - 1);
        const double t = w / area;
        du = (t == 0.0) ? 0.0 : std::copysign(std::pow(std::fabs(t), exp_inv), t);
        dw = -area * source(u);
    }
};

struct StepResult {
    double u, w, err_u, err_w;
};

// Cash-Karp embedded 5(4) pair.
StepResult ck45_step(const ShotSystem& sys, double r, double u, double w, double h) {
    static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.6, c5 = 1.0, c6 = 0.875;
    static constexpr double a21 = 0.2;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 0.3, a42 = -0.9, a43 = 1.2;
    static constexpr double a51 = -11.0 / 54, a52 = 2.5, a53 = -70.0 / 27, a54 = 35.0 / 27;
    static constexpr double a61 = 1631.0 / 55296, a62 = 175.0 / 512, a63 = 575.0 / 13824,
                            a64 = 44275.0 / 110592, a65 = 253.0 / 4096;
    static constexpr double b1 = 37.0 / 378, b3 = 250.0 / 621, b4 = 125.0 / 594,
                            b6 = 512.0 / 1771;
    static constexpr double e1 = 2825.0 / 27648, e3 = 18575.0 / 48384, e4 = 13525.0 / 55296,
                            e5 = 277.0 / 14336, e6 = 0.25;

    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w, k5u, k5w, k6u, k6w;
    sys.deriv(r, u, w, k1u, k1w);
    sys.deriv(r + c2 * h, u + h * a21 * k1u, w + h * a21 * k1w, k2u, k2w);
    sys.deriv(r + c3 * h, u + h * (a31 * k1u + a32 * k2u), w + h * (a31 * k1w + a32 * k2w), k3u,
              k3w);
    sys.deriv(r + c4 * h, u + h * (a41 * k1u + a42 * k2u + a43 * k3u),
              w + h * (a41 * k1w + a42 * k2w + a43 * k3w), k4u, k4w);
    sys.deriv(r + c5 * h, u + h * (a51 * k1u + a52 * k2u + a53 * k3u + a54 * k4u),
              w + h * (a51 * k1w + a52 * k2w + a53 * k3w + a54 * k4w), k5u, k5w);
    sys.deriv(r + c6 * h, u + h * (a61 * k1u + a62 * k2u + a63 * k3u + a64 * k4u + a65 * k5u),
              w + h * (a61 * k1w + a62 * k2w + a63 * k3w + a64 * k4w + a65 * k5w), k6u, k6w);

    StepResult out;
    out.u = u + h * (b1 * k1u + b3 * k3u + b4 * k4u + b6 * k6u);
    out.w = w + h * (b1 * k1w + b3 * k3w + b4 * k4w + b6 * k6w);
    const double u4 = u + h * (e1 * k1u + e3 * k3u + e4 * k4u + e5 * k5u + e6 * k6u);
    const double w4 = w + h * (e1 * k1w + e3 * k3w + e4 * k4w + e5 * k5w + e6 * k6w);
    out.err_u = std::fabs(out.u - u4);
    out.err_w = std::fabs(out.w - w4);
    return out;
}

struct Knot {
    double r, u, du;
};

// Integrate from the series start to r = 1 or the first zero of u.
ShotOutcome integrate_shot(const ProblemParams& pr, double M, double ode_tol,
                           std::vector<Knot>* knots) {
    if (M <= 0.0) throw Error(errc::PreconditionNotMet, "center value M must be positive");
    const ShotSystem sys(pr);
    const int N = pr.dim_N;
    const double p = pr.p;
    const double pc = p / (p - 1.0);

    ShotOutcome out;
    out.M = M;

    // series start u ~ M - c_M r^{p/(p-1)} from the local balance at r = 0
    const double K0 = sys.source(M);
    const double cM = (p - 1.0) / p * std::pow(K0 / N, 1.0 / (p - 1.0));
    double r = 1e-7;
    double u = M - cM * std::pow(r, pc);
    double w = -K0 * std::pow(r, N) / N;
    if (knots) {
        knots->push_back({0.0, M, 0.0});
        double du0, dw0;
        sys.deriv(r, u, w, du0, dw0);
        knots->push_back({r, u, du0});
    }
    if (u <= 0.0) {
        out.kind = ShotKind::CrossedBefore;
        out.gauge = -(1.0 - r);
        return out;
    }

    const double scale_u = M;
    double scale_w = std::max(K0 / N, 1e-30);
    double h = 1e-4;
    int steps = 0;

    while (r < 1.0) {
        h = std::min(h, 1.0 - r);
        const StepResult s = ck45_step(sys, r, u, w, h);
        const double err = std::max(s.err_u / (ode_tol * scale_u),
                                    s.err_w / (ode_tol * std::max(scale_w, std::fabs(w))));
        if (!(err <= 1.0)) {
            h *= std::max(0.2, 0.9 * std::pow(std::max(err, 1e-300), -0.25));
            if (h < 1e-14) {
                std::ostringstream os;
                os << "step underflow at r = " << r << ", u = " << u << " (M = " << M << ")";
                throw Error(errc::StepUnderflow, os.str());
            }
            continue;
        }
        if (s.u <= 0.0) {
            // first zero inside this step: bisect the sub-step length
            double lo = 0.0, hi = h;
            for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                const StepResult sm = ck45_step(sys, r, u, w, mid);
                (sm.u > 0.0 ? lo : hi) = mid;
            }
            const double rstar = r + 0.5 * (lo + hi);
            out.kind = ShotKind::CrossedBefore;
            out.gauge = -(1.0 - rstar);
            out.steps = steps;
            return out;
        }
        r += h;
        u = s.u;
        w = s.w;
        scale_w = std::max(scale_w, std::fabs(w));
        ++steps;
        if (knots) {
            double du, dw;
            sys.deriv(r, u, w, du, dw);
            knots->push_back({r, u, du});
        }
        if (u > 1e12 * (M + 1.0)) {
            out.kind = ShotKind::Blowup;
            out.gauge = u;
            out.steps = steps;
            return out;
        }
        h *= std::clamp(0.9 * std::pow(std::max(err, 1e-300), -0.2), 0.2, 5.0);
    }
    out.kind = ShotKind::PositiveAtOne;
    out.gauge = u;
    out.steps = steps;
    return out;
}

double aitken_scalar(double a, double b, double c) {
    const double d1 = b - a, d2 = c - b;
    const double den = d2 - d1;
    if (std::fabs(den) > 1e-30 + 1e-10 * (std::fabs(d1) + std::fabs(d2)))
        return c - d2 * d2 / den;
    return c;
}

}  // namespace

ShotOutcome shoot(const ProblemParams& params, double M, double ode_tol) {
    if (!params.is_limit()) return integrate_shot(params, M, ode_tol, nullptr);
    // limit problem: every finite-n IVP is smooth, the limit one is not;
    // extrapolate the gauge over the regularization ladder
    static constexpr long ladder[3] = {100, 1000, 10000};
    double g[3];
    int steps = 0;
    ShotOutcome last;
    for (int i = 0; i < 3; ++i) {
        last = integrate_shot(params.with_reg_index(ladder[i]), M, ode_tol, nullptr);
        g[i] = last.gauge;
        steps += last.steps;
    }
    ShotOutcome out;
    out.M = M;
    out.gauge = aitken_scalar(g[0], g[1], g[2]);
    out.kind = (out.gauge > 0.0) ? ShotKind::PositiveAtOne : ShotKind::CrossedBefore;
    out.steps = steps;
    return out;
}

Field shot_field(const ProblemParams& params, double M, double ode_tol, const GridPtr& grid) {
    if (params.is_limit())
        throw Error(errc::PreconditionNotMet,
                    "trajectory reconstruction requires a finite regularization index");
    std::vector<Knot> knots;
    integrate_shot(params, M, ode_tol, &knots);
    Field out(grid);
    const int m = grid->m();
    std::size_t k = 0;
    for (int j = 0; j <= m; ++j) {
        const double r = grid->nodes[j];
        while (k + 1 < knots.size() && knots[k + 1].r < r) ++k;
        if (k + 1 >= knots.size()) {
            out[j] = 0.0;  // beyond the trajectory end (crossed early)
            continue;
        }
        const Knot& a = knots[k];
        const Knot& b = knots[k + 1];
        const double hh = b.r - a.r;
        const double t = (hh > 0.0) ? (r - a.r) / hh : 0.0;
        const double t2 = t * t, t3 = t2 * t;
        const double v = (2 * t3 - 3 * t2 + 1) * a.u + (t3 - 2 * t2 + t) * hh * a.du +
                         (-2 * t3 + 3 * t2) * b.u + (t3 - t2) * hh * b.du;
        out[j] = std::max(v, 0.0);
    }
    out[m] = 0.0;
    return out;
}

std::vector<double> find_roots(const ProblemParams& params, double M_lo, double M_hi,
                               int resolution, double ode_tol) {
    if (!(M_lo > 0.0) || !(M_hi > M_lo))
        throw Error(errc::PreconditionNotMet, "need 0 < M_lo < M_hi");
    if (resolution < 2) throw Error(errc::PreconditionNotMet, "resolution must be >= 2");

    std::vector<double> Ms(resolution), gauges(resolution);
    const double ratio = std::log(M_hi / M_lo);
    for (int k = 0; k < resolution; ++k)
        Ms[k] = M_lo * std::exp(ratio * k / (resolution - 1));

    std::vector<std::exception_ptr> errors(resolution);
#pragma omp parallel for schedule(dynamic) if (kernels::parallel_enabled())
    for (int k = 0; k < resolution; ++k) {
        try {
            gauges[k] = shoot(params, Ms[k], ode_tol).gauge;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<double> roots;
    for (int k = 0; k + 1 < resolution; ++k) {
        if (gauges[k] == 0.0) {
            roots.push_back(Ms[k]);
            continue;
        }
        if (gauges[k] * gauges[k + 1] < 0.0) {
            double lo = Ms[k], hi = Ms[k + 1];
            double glo = gauges[k];
            for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = shoot(params, mid, ode_tol).gauge;
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (gm * glo > 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
    }
    if (gauges[resolution - 1] == 0.0) roots.push_back(Ms[resolution - 1]);
    return roots;
}

double nonexistence_bound(double p, double q, double delta, double lambda1) {
    auto g = [&](double s) {
        return (lambda1 * std::pow(s, p - 1.0) - std::pow(s, q)) * std::pow(1.0 + s, delta);
    };
    const double s_max = std::pow(lambda1, 1.0 / (q - p + 1.0));
    const int scan = 2048;
    int best = 1;
    double gbest = -1.0;
    for (int k = 1; k < scan; ++k) {
        const double v = g(s_max * k / scan);
        if (v > gbest) {
            gbest = v;
            best = k;
        }
    }
    // golden-section refinement on the bracketing segment
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = s_max * (best - 1) / scan, b = s_max * (best + 1) / scan;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * s_max; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = g(x1);
        }
    }
    return std::max(gbest, std::max(f1, f2));
}

double nonexistence_bound(const ProblemParams& params, const EigenPair& eigen) {
    return nonexistence_bound(params.p, params.q, params.delta, eigen.lambda1);
}

namespace {

// Smallest root of A(s) = lambda0 on (0, delta2); 0 when unreachable.
double barrier_mu(const ProblemParams& pr, double T, double delta0, double lambda0) {
    const double p = pr.p, q = pr.q, d = pr.delta;
    const double delta1 = 0.5 * std::pow(2.0 * q - 2.0 * p + 3.0, 1.0 / (p - q - 1.0)) *
                          std::pow(T, (d + p - 1.0) / (p - q - 1.0));
    const double delta2 = std::min(delta0, delta1);
    auto A = [&](double s) {
        return 0.5 * (std::pow(s / T, d + p - 1.0) - std::pow(s, d + q));
    };
    const int scan = 2048;
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= scan; ++k) {
        const double s = delta2 * k / scan;
        if (A(s) >= lambda0) {
            hi = s;
            lo = delta2 * (k - 1) / scan;
            break;
        }
    }
    if (hi < 0.0) return 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * delta2; ++it) {
        const double mid = 0.5 * (lo + hi);
        (A(mid) >= lambda0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BifurcationDiagram sweep_lambda(const ProblemParams& params,
                                std::span<const double> lambda_grid, const EigenPair& eigen,
                                const ShootOptions& options) {
    BifurcationDiagram diagram;
    diagram.picone_bound = nonexistence_bound(params, eigen);
    if (lambda_grid.empty()) return diagram;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (lambda_grid[i] <= 0.0 || (i > 0 && lambda_grid[i] <= lambda_grid[i - 1]))
            throw Error(errc::PreconditionNotMet, "lambda grid must be ascending and positive");
    }

    double delta0 = options.delta0;
    if (delta0 <= 0.0) {
        const double q_scale = std::pow(eigen.lambda1, 1.0 / (params.q - params.p + 1.0));
        auto roots0 = find_roots(params.with_lambda(0.0), 1e-3, 1e3 * std::max(1.0, q_scale),
                                 options.resolution, options.ode_tol);
        if (roots0.empty())
            throw Error(errc::SolverFailure, "no lambda=0 ground state found in the scan range");
        delta0 = roots0.front();
    }

    double mu = 0.0;
    if (options.scaling_T > 0.0)
        mu = barrier_mu(params, options.scaling_T, delta0, lambda_grid.front());

    const double M_lo = options.M_lo > 0.0 ? options.M_lo : 1e-3 * (mu > 0.0 ? mu : delta0);
    const double M_hi = options.M_hi > 0.0 ? options.M_hi : 1e3 * delta0;

    const int nl = static_cast<int>(lambda_grid.size());
    std::vector<std::vector<double>> roots(nl);
    std::vector<std::exception_ptr> errors(nl);
#pragma omp parallel for schedule(dynamic) if (kernels::parallel_enabled())
    for (int i = 0; i < nl; ++i) {
        try {
            roots[i] = find_roots(params.with_lambda(lambda_grid[i]), M_lo, M_hi,
                                  options.resolution, options.ode_tol);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (int i = 0; i < nl; ++i) {
        const double lam = lambda_grid[i];
        diagram.root_counts.emplace_back(lam, static_cast<int>(roots[i].size()));
        if (!roots[i].empty()) {
            // roots do not cross in M, so ordering realizes continuity matching
            diagram.points.push_back({lam, roots[i].front(), roots[i].front(), BranchTag::Lower});
            if (roots[i].size() >= 2)
                diagram.points.push_back(
                    {lam, roots[i].back(), roots[i].back(), BranchTag::Upper});
        }
    }

    int last_two = -1;
    for (int i = 0; i < nl; ++i)
        if (roots[i].size() >= 2) last_two = i;
    if (last_two < 0) {
        diagram.fold_lambda = 0.0;
        return diagram;
    }
    if (last_two == nl - 1) {
        diagram.open_right = true;
        diagram.fold_lambda = lambda_grid[last_two];
        return diagram;
    }

    double a = lambda_grid[last_two];
    double b = lambda_grid[last_two + 1];
    auto has_two = [&](double lam) {
        return find_roots(params.with_lambda(lam), M_lo, M_hi, options.resolution,
                          options.ode_tol)
                   .size() >= 2;
    };
    while ((b - a) > 1e-4 * b) {
        const double mid = 0.5 * (a + b);
        (has_two(mid) ? a : b) = mid;
    }
    diagram.fold_lambda = a;
    return diagram;
}

}  // namespace splap
