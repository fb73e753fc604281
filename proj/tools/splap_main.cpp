// splap: solves -Delta_p u = lambda (u+1/n)^{-delta} + u^q on the unit ball,
// traces the two solution branches to the fold, and runs the verification
// suite.  Configuration is a single flat JSON document; results are CSV/JSON/
// SVG artifacts in the output directory.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splap/branch.hpp"
#include "splap/eigen.hpp"
#include "splap/errors.hpp"
#include "splap/grid.hpp"
#include "splap/io.hpp"
#include "splap/kernels.hpp"
#include "splap/solve.hpp"
#include "splap/verify.hpp"

namespace fs = std::filesystem;
using splap::io::json;

namespace {

struct RunConfig {
    std::string command;
    splap::ProblemParams params;
    int m = 1024;
    double grading = -1.0;  // -1: pick from delta
    double tol = 1e-10;
    double ode_tol = 1e-10;
    std::string out_dir = "out";
    int workers = 0;
    // branch
    double lambda_min = 0.0, lambda_max = 0.0;
    int lambda_points = 64;
    int resolution = 400;
    // ladder
    std::vector<long> n_list;
    // verify
    std::string suite = "default";
    json resolved;  // the full config echoed into artifacts
};

const std::set<std::string> kKnownKeys = {
    "command", "N",          "p",           "q",          "delta",     "lambda",
    "n",       "q_term",     "m",           "grading",    "tol",       "ode_tol",
    "out_dir", "workers",    "lambda_min",  "lambda_max", "lambda_points",
    "resolution", "n_list",  "suite"};

RunConfig parse_config(const json& j) {
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!kKnownKeys.count(key))
            throw splap::Error(splap::errc::ConfigInvalid, "unknown config key: " + key);
    }
    if (!j.contains("command"))
        throw splap::Error(splap::errc::ConfigInvalid, "missing config key: command");
    c.command = j.at("command").get<std::string>();

    auto get = [&](const char* key, auto fallback) {
        using T = decltype(fallback);
        return j.contains(key) ? j.at(key).get<T>() : fallback;
    };
    c.params.dim_N = get("N", 3);
    c.params.p = get("p", 2.0);
    c.params.q = get("q", 2.0);
    c.params.delta = get("delta", 2.0);
    c.params.lambda = get("lambda", 1.0);
    c.params.reg_index = get("n", 1000L);
    c.params.q_enabled = get("q_term", 1) != 0;
    c.m = get("m", 1024);
    c.grading = get("grading", -1.0);
    c.tol = get("tol", 1e-10);
    c.ode_tol = get("ode_tol", 1e-10);
    c.out_dir = get("out_dir", std::string("out"));
    c.workers = get("workers", 0);
    c.lambda_min = get("lambda_min", 0.0);
    c.lambda_max = get("lambda_max", 0.0);
    c.lambda_points = get("lambda_points", 64);
    c.resolution = get("resolution", 400);
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<long>>();
    c.suite = get("suite", std::string("default"));
    if (c.grading < 0.0) c.grading = c.params.delta >= 1.0 ? 3.0 : 1.0;
    return c;
}

std::string cache_dir(const RunConfig& c) {
    if (const char* env = std::getenv("SINGULAR_PLAP_CACHE")) return env;
    return (fs::path(c.out_dir) / "cache").string();
}

double lookup_T(const RunConfig& c, const splap::GridPtr& grid, bool compute_if_missing) {
    const std::string dir = cache_dir(c);
    auto table = splap::io::load_calibration(dir);
    const std::string key =
        splap::io::calibration_key(c.params.dim_N, c.params.p, c.params.delta);
    if (auto it = table.find(key); it != table.end()) return it->second;
    if (!compute_if_missing) return 0.0;
    const double T = splap::calibrate_scaling_constant(c.params.dim_N, c.params.p,
                                                       c.params.delta, grid, c.tol);
    table[key] = T;
    splap::io::save_calibration(dir, table);
    return T;
}

json solve_result_json(const RunConfig& c, const splap::SolveResult& r,
                       const std::string& csv_path) {
    json j;
    j["schema_version"] = splap::io::kSchemaVersion;
    j["config"] = c.resolved;
    j["params"] = splap::io::params_to_json(c.params);
    j["residual_sup"] = r.residual_sup;
    j["iterations"] = r.iterations;
    j["u_csv"] = csv_path;
    j["sup_norm"] = splap::sup_norm(r.u);
    return j;
}

int cmd_solve(const RunConfig& c) {
    const auto grid = splap::build_grid(c.m, c.grading, c.params.dim_N);
    splap::SolveResult r;
    if (c.params.q_enabled && c.params.lambda > 0.0) {
        const splap::Field seed =
            splap::solve_pure_singular(c.params.pure_singular(), grid, c.tol).u;
        r = splap::solve_full(c.params, seed, {}, c.tol);
    } else if (c.params.q_enabled) {
        // lambda = 0: -Delta_p u = u^q from a ground-state-scale seed
        const auto eigen = splap::first_eigenpair(grid, c.params.p);
        splap::Field seed = eigen.phi1;
        const double scale =
            std::pow(eigen.lambda1, 1.0 / (c.params.q - c.params.p + 1.0));
        for (auto& v : seed.values) v *= scale;
        r = splap::solve_full(c.params, seed, {}, c.tol);
    } else {
        r = splap::solve_pure_singular(c.params, grid, c.tol);
    }
    const auto upath = fs::path(c.out_dir) / "u.csv";
    splap::io::write_text_file(upath.string(), splap::io::field_to_csv(r.u, c.resolved));
    splap::io::write_text_file((fs::path(c.out_dir) / "result.json").string(),
                               solve_result_json(c, r, "u.csv").dump(2) + "\n");
    std::cout << "solve: sup=" << splap::sup_norm(r.u) << " residual=" << r.residual_sup
              << " iterations=" << r.iterations << "\n";
    return 0;
}

int cmd_ladder(const RunConfig& c) {
    const auto grid = splap::build_grid(c.m, c.grading, c.params.dim_N);
    std::vector<long> ns = c.n_list;
    if (ns.empty())
        for (long n = 1; n <= 1024; n *= 2) ns.push_back(n);
    const auto ladder = splap::regularization_ladder(c.params, ns, grid, c.tol);
    json j;
    j["schema_version"] = splap::io::kSchemaVersion;
    j["config"] = c.resolved;
    json entries = json::array();
    for (const auto& [n, u] : ladder.entries) {
        const std::string name = "u_n" + std::to_string(n) + ".csv";
        splap::io::write_text_file((fs::path(c.out_dir) / name).string(),
                                   splap::io::field_to_csv(u, c.resolved));
        entries.push_back({{"n", n}, {"csv", name}, {"sup_norm", splap::sup_norm(u)}});
    }
    j["entries"] = entries;
    j["monotone_violation"] = ladder.monotone_violation;
    const double sup = splap::sup_norm(ladder.entries.back().second);
    const auto check = splap::check_monotone_ladder(ladder, 1e-8 * sup);
    j["monotonicity"] = {{"measured", check.measured},
                         {"tolerance", check.tolerance},
                         {"pass", check.passed()}};
    splap::io::write_text_file((fs::path(c.out_dir) / "ladder.json").string(),
                               j.dump(2) + "\n");
    std::cout << "ladder: " << ladder.entries.size()
              << " entries, monotone violation " << ladder.monotone_violation << "\n";
    return check.passed() ? 0 : 1;
}

int cmd_branch(const RunConfig& c) {
    const auto grid = splap::build_grid(c.m, c.grading, c.params.dim_N);
    const auto eigen = splap::first_eigenpair(grid, c.params.p);
    splap::ShootOptions opt;
    opt.ode_tol = c.ode_tol;
    opt.resolution = c.resolution;
    opt.scaling_T = lookup_T(c, grid, false);

    const double bar = splap::nonexistence_bound(c.params, eigen);
    double lo = c.lambda_min > 0.0 ? c.lambda_min : 1e-4 * bar;
    double hi = c.lambda_max > 0.0 ? c.lambda_max : bar;
    std::vector<double> grid_l(c.lambda_points);
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < c.lambda_points; ++i)
        grid_l[i] = lo * std::exp(ratio * i / (c.lambda_points - 1));

    const auto diagram = splap::sweep_lambda(c.params, grid_l, eigen, opt);
    splap::io::write_text_file((fs::path(c.out_dir) / "diagram.csv").string(),
                               splap::io::diagram_to_csv(diagram, c.resolved));
    splap::io::write_text_file((fs::path(c.out_dir) / "diagram.svg").string(),
                               splap::io::diagram_to_svg(diagram));
    splap::io::write_text_file(
        (fs::path(c.out_dir) / "summary.json").string(),
        splap::io::diagram_summary(diagram, c.resolved).dump(2) + "\n");
    std::cout << "branch: fold_lambda=" << diagram.fold_lambda
              << " picone_bound=" << diagram.picone_bound
              << (diagram.open_right ? " (OPEN_RIGHT)" : "") << "\n";
    return 0;
}

int cmd_calibrate(const RunConfig& c) {
    const auto grid = splap::build_grid(c.m, c.grading, c.params.dim_N);
    const double T = lookup_T(c, grid, true);
    std::cout << "calibrate: " << splap::io::calibration_key(c.params.dim_N, c.params.p,
                                                             c.params.delta)
              << " -> T = " << T << " (cache " << cache_dir(c) << ")\n";
    return 0;
}

splap::VerificationReport default_suite(const RunConfig& c);
splap::VerificationReport negative_controls(const RunConfig& c);

int cmd_verify(const RunConfig& c) {
    splap::VerificationReport report =
        c.suite == "negative-controls" ? negative_controls(c) : default_suite(c);
    splap::io::write_text_file((fs::path(c.out_dir) / "report.json").string(),
                               splap::io::report_to_json(report, c.resolved).dump(2) + "\n");
    std::cout << splap::io::report_to_table(report);
    return report.failures() == 0 ? 0 : 1;
}

splap::VerificationReport default_suite(const RunConfig& c) {
    splap::VerificationReport report;
    report.context = "default desk-scale suite";
    const double tol = c.tol;

    {  // scaling law, (p,delta) = (2,3) and (3,1)
        splap::ProblemParams pr = c.params;
        pr.reg_index = splap::kLimit;
        pr.q_enabled = false;
        pr.p = 2.0;
        pr.q = 2.0;
        pr.delta = 3.0;
        pr.dim_N = 3;
        const auto grid = splap::build_grid(c.m, 3.0, pr.dim_N);
        std::pair<double, double> pairs[] = {{1.0, 16.0}};
        auto chk = splap::check_scaling_law(pr, pairs, grid, 1e-6, tol);
        chk.name += "[p=2,delta=3]";
        report.add(chk);
        pr.p = 3.0;
        pr.q = 3.0;
        pr.delta = 1.0;
        pr.dim_N = 4;
        const auto grid2 = splap::build_grid(c.m, 3.0, pr.dim_N);
        std::pair<double, double> pairs2[] = {{1.0, 16.0}, {2.0, 4.0}};
        auto chk2 = splap::check_scaling_law(pr, pairs2, grid2, 1e-6, tol);
        chk2.name += "[p=3,delta=1]";
        report.add(chk2);
    }
    splap::ProblemParams base = c.params;  // (3,2,2,2) by default
    const auto grid = splap::build_grid(c.m, 3.0, base.dim_N);
    const auto eigen = splap::first_eigenpair(grid, base.p);
    {  // pure-singular monotone ladder n = 1..1024
        splap::ProblemParams pr = base.pure_singular().with_lambda(1.0);
        std::vector<long> ns;
        for (long n = 1; n <= 1024; n *= 2) ns.push_back(n);
        const auto ladder = splap::regularization_ladder(pr, ns, grid, tol);
        const double sup = splap::sup_norm(ladder.entries.back().second);
        report.add(splap::check_monotone_ladder(ladder, 1e-8 * sup));
        // interior floor at r = 1/2
        int j_half = 0;
        while (grid->nodes[j_half] < 0.5) ++j_half;
        splap::CheckResult floor_chk;
        floor_chk.name = "interior_floor";
        floor_chk.anchor = "u_n(1/2) >= u_1(1/2) > 0 across the ladder";
        double lowest = ladder.entries.back().second[j_half];
        for (const auto& [n, u] : ladder.entries) lowest = std::min(lowest, u[j_half]);
        const double first = ladder.entries.front().second[j_half];
        floor_chk.measured = lowest;
        floor_chk.tolerance = first;
        floor_chk.status = (first > 0.0 && lowest >= first - 1e-12)
                               ? splap::CheckStatus::Pass
                               : splap::CheckStatus::Fail;
        report.add(floor_chk);
    }
    {  // uniform Hopf on a full-problem ladder
        splap::ProblemParams pr = base.with_lambda(0.5).with_reg_index(1);
        const std::vector<long> ns = {1, 4, 16, 64, 256};
        const auto ladder = splap::regularization_ladder(pr, ns, grid, tol);
        report.add(splap::check_uniform_hopf(ladder));
        auto mono = splap::check_monotone_ladder(
            ladder, 1e-8 * splap::sup_norm(ladder.entries.back().second));
        mono.name += "[full]";
        report.add(mono);
    }
    {  // Picone: equality at phi1, positivity at the torsion solution
        auto eq = splap::check_picone(eigen.phi1, eigen, 1e-6);
        eq.name += "[phi1]";
        report.add(eq);
        splap::Field rhs(grid, 1.0);
        const splap::Field torsion = splap::invert_plap(rhs, base.p, tol);
        auto pos = splap::check_picone(torsion, eigen, 1e-6);
        pos.name += "[torsion]";
        report.add(pos);
    }
    {  // boundary exponent at (2,3) and (2,1); window per the delta=1 log factor
        for (double delta : {3.0, 1.0}) {
            splap::ProblemParams pr = base.pure_singular().with_lambda(1.0);
            pr.p = 2.0;
            pr.delta = delta;
            pr.reg_index = splap::kLimit;
            const auto g2 = splap::build_grid(std::max(c.m, 2048), 3.0, pr.dim_N);
            const auto sol = splap::solve_pure_singular(pr, g2, tol);
            auto chk = splap::check_boundary_exponent(sol.u, 2.0 / (delta + 1.0),
                                                      {1e-9, 1e-6});
            chk.name += delta == 3.0 ? "[delta=3]" : "[delta=1]";
            report.add(chk);
        }
    }
    {  // alpha membership at (p,delta) = (2,4)
        splap::ProblemParams pr = base.pure_singular().with_lambda(1.0);
        pr.p = 2.0;
        pr.q = 2.0;
        pr.delta = 4.0;
        pr.reg_index = splap::kLimit;
        const double thr = splap::derived_exponents(pr).alpha_threshold;
        const double alphas[] = {1.25 * thr, 0.4 * thr};
        for (auto chk : splap::check_alpha_membership(pr, alphas, 256, 3.0, tol))
            report.add(std::move(chk));
    }
    {  // delta0 gap at lambda = 0
        splap::ProblemParams pr = base.with_lambda(0.0);
        report.add(splap::check_delta0(pr, 1e-3, 1e3, c.ode_tol));
    }
    {  // strong comparison, p = 2 and p = 3
        splap::Field f2(grid, 2.0), f1(grid, 1.0);
        const splap::Field u2 = splap::invert_plap(f2, 2.0, tol);
        const splap::Field u1 = splap::invert_plap(f1, 2.0, tol);
        auto chk = splap::check_comparison(u2, u1, f2, f1);
        chk.name += "[p=2]";
        report.add(chk);
        const splap::Field v2 = splap::invert_plap(f2, 3.0, tol);
        const splap::Field v1 = splap::invert_plap(f1, 3.0, tol);
        auto chk3 = splap::check_comparison(v2, v1, f2, f1);
        chk3.name += "[p=3]";
        report.add(chk3);
    }
    return report;
}

splap::VerificationReport negative_controls(const RunConfig& c) {
    splap::VerificationReport report;
    report.context = "negative controls: corrupted fixtures must FAIL";
    const auto grid = splap::build_grid(std::min(c.m, 512), 3.0, c.params.dim_N);
    {  // permuted ladder
        splap::ProblemParams pr = c.params.pure_singular().with_lambda(1.0);
        const std::vector<long> ns = {1, 4, 16};
        auto ladder = splap::regularization_ladder(pr, ns, grid, c.tol);
        std::swap(ladder.entries.front().second, ladder.entries.back().second);
        auto chk = splap::check_monotone_ladder(
            ladder, 1e-8 * splap::sup_norm(ladder.entries.front().second));
        chk.name += "[permuted]";
        report.add(chk);
    }
    {  // eigenfunction tested against the singular boundary exponent
        const auto eigen = splap::first_eigenpair(grid, c.params.p);
        auto chk = splap::check_boundary_exponent(eigen.phi1, 0.5, {1e-6, 1e-3});
        chk.name += "[wrong-exponent]";
        report.add(chk);
    }
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"singular p-Laplacian two-branch solver"};
    std::string config_path;
    std::string out_override;
    int workers = 0;
    double tol_override = 0.0;
    int m_override = 0;
    double grading_override = 0.0;
    app.add_option("--config", config_path, "path to the JSON run configuration")->required();
    app.add_option("--out", out_override, "output directory (overrides config out_dir)");
    app.add_option("--workers", workers, "worker threads for the lambda sweep (0 = auto)");
    app.add_option("--tol", tol_override, "solver tolerance override");
    app.add_option("--m", m_override, "mesh node count override");
    app.add_option("--grading", grading_override, "mesh grading override");
    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        const json raw = json::parse(splap::io::read_text_file(config_path));
        cfg = parse_config(raw);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (workers > 0) cfg.workers = workers;
        if (tol_override > 0.0) cfg.tol = tol_override;
        if (m_override > 0) cfg.m = m_override;
        if (grading_override >= 1.0) cfg.grading = grading_override;
        splap::kernels::set_workers(cfg.workers);

        json resolved;
        resolved["command"] = cfg.command;
        resolved["N"] = cfg.params.dim_N;
        resolved["p"] = cfg.params.p;
        resolved["q"] = cfg.params.q;
        resolved["delta"] = cfg.params.delta;
        resolved["lambda"] = cfg.params.lambda;
        resolved["n"] = cfg.params.reg_index;
        resolved["q_term"] = cfg.params.q_enabled ? 1 : 0;
        resolved["m"] = cfg.m;
        resolved["grading"] = cfg.grading;
        resolved["tol"] = cfg.tol;
        resolved["ode_tol"] = cfg.ode_tol;
        resolved["lambda_min"] = cfg.lambda_min;
        resolved["lambda_max"] = cfg.lambda_max;
        resolved["lambda_points"] = cfg.lambda_points;
        resolved["resolution"] = cfg.resolution;
        resolved["suite"] = cfg.suite;
        resolved["schema_version"] = splap::io::kSchemaVersion;
        cfg.resolved = resolved;

        // parameter validation precedes every solver run
        if (cfg.command != "verify") splap::validate_params(cfg.params);
        fs::create_directories(cfg.out_dir);

        if (cfg.command == "solve") return cmd_solve(cfg);
        if (cfg.command == "ladder") return cmd_ladder(cfg);
        if (cfg.command == "branch") return cmd_branch(cfg);
        if (cfg.command == "verify") return cmd_verify(cfg);
        if (cfg.command == "calibrate") return cmd_calibrate(cfg);
        throw splap::Error(splap::errc::ConfigInvalid, "unknown command: " + cfg.command);
    } catch (const splap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!cfg.out_dir.empty() && fs::exists(cfg.out_dir)) {
            try {
                splap::io::write_text_file((fs::path(cfg.out_dir) / "FAILED").string(),
                                           std::string(e.what()) + "\n");
            } catch (...) {
            }
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
