#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rhoz/baselines.hpp"
#include "rhoz/errors.hpp"
#include "rhoz/io.hpp"
#include "rhoz/link.hpp"
#include "rhoz/matrix.hpp"
#include "rhoz/solve.hpp"
#include "rhoz/special_functions.hpp"

namespace {

using nlohmann::json;
using namespace rhoz;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

struct SolveArgs {
    std::string pair_path;
    std::vector<double> targets;
    int degree = 0;  // 0 = auto selection
    double delta = 1e-4;
    int step = 2;
    int cap = 39;
    std::string method;  // "", "poly", "bisect", "closed"
    bool no_closed_form = false;
    bool as_json = false;
    int quad_points = 11;
    double eps = 1e-3;
};

int run_solve(const SolveArgs& args) {
    const PairSpec pair = parse_pair(load_json(args.pair_path));
    std::vector<double> targets = args.targets.empty() ? pair.rho_x : args.targets;
    if (targets.empty()) throw DomainError("no rho_x target given (flag or pair file)");
    for (double t : targets)
        if (std::isnan(t) || std::fabs(t) > 1.0)
            throw DomainError("rho_x targets must lie in [-1, 1]");

    const Marginal& mi = pair.marginal_i;
    const Marginal& mj = pair.marginal_j;

    std::string method = args.method;
    const auto cf = match_closed_form(mi, mj);
    if (method.empty()) {
        method = (cf && !args.no_closed_form && args.degree == 0) ? "closed" : "poly";
    }
    if (method == "closed" && !cf)
        throw DomainError("no closed-form link is known for this pair");

    json out;
    out["marginal_i"] = mi.name();
    out["marginal_j"] = mj.name();
    out["method"] = method;
    json results = json::array();

    if (method == "bisect") {
        for (double t : targets) {
            BisectionResult r;
            if (mi.is_continuous() && mj.is_continuous())
                r = bisection_continuous(mi, mj, t, args.quad_points, args.eps);
            else if (mi.is_discrete() && mj.is_discrete())
                r = bisection_discrete(mi, mj, t, args.eps);
            else
                r = bisection_mixed(mi, mj, t, args.quad_points, args.quad_points, args.eps);
            json jr;
            jr["rho_x"] = t;
            jr["rho_z"] = r.rho_z;
            jr["quantile_calls"] = r.counters.quantile_calls;
            jr["bivariate_cdf_calls"] = r.counters.bivariate_cdf_calls;
            results.push_back(std::move(jr));
            if (!args.as_json)
                std::printf("rho_x = %10.6f  ->  rho_z = %10.6f   (bisection, quantile calls %ld, "
                            "bivariate calls %ld)\n",
                            t, r.rho_z, r.counters.quantile_calls, r.counters.bivariate_cdf_calls);
        }
    } else if (method == "closed") {
        for (double t : targets) {
            const double rz = closed_form(cf->case_id, LinkDirection::XToZ, t, cf->sigma1,
                                          cf->sigma2);
            const double back = closed_form(cf->case_id, LinkDirection::ZToX, rz, cf->sigma1,
                                            cf->sigma2);
            SolveReport rep;
            rep.rho_z = rz;
            rep.residual = std::fabs(back - t);
            rep.method = SolveMethod::ClosedForm;
            rep.feasible_range = {closed_form(cf->case_id, LinkDirection::ZToX, -1.0, cf->sigma1,
                                              cf->sigma2),
                                  closed_form(cf->case_id, LinkDirection::ZToX, 1.0, cf->sigma1,
                                              cf->sigma2)};
            json jr = report_to_json(rep);
            jr["rho_x"] = t;
            results.push_back(std::move(jr));
            if (!args.as_json)
                std::printf("rho_x = %10.6f  ->  rho_z = %10.6f   (closed form, residual %.2e)\n",
                            t, rz, rep.residual);
        }
    } else {
        LinkPolynomial poly;
        int selected = args.degree;
        if (args.degree > 0) {
            poly = build_link(mi, mj, args.degree);
        } else {
            SelectOptions sopts;
            sopts.delta = args.delta;
            sopts.degree_step = args.step;
            sopts.degree_cap = args.cap;
            DegreeSelection sel = select_degree(mi, mj, sopts);
            poly = std::move(sel.poly);
            selected = sel.selected_degree;
        }
        out["selected_degree"] = selected;
        out["link"] = link_to_json(poly);
        for (double t : targets) {
            SolveReport rep = solve_rho_z(poly, t);
            json jr = report_to_json(rep);
            jr["rho_x"] = t;
            results.push_back(std::move(jr));
            if (!args.as_json) {
                std::printf("rho_x = %10.6f  ->  rho_z = %10.6f   (polynomial degree %d, residual "
                            "%.2e)\n",
                            t, rep.rho_z, poly.degree(), rep.residual);
                for (const std::string& w : rep.warnings) std::printf("  warning: %s\n", w.c_str());
            }
        }
    }

    out["results"] = std::move(results);
    if (args.as_json) std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int run_matrix(const std::string& spec_path, const std::string& repair,
               const std::string& out_path, bool no_closed_form, int threads) {
    const MatrixSpec spec = parse_matrix(load_json(spec_path));
    MatrixMapOptions opts;
    opts.use_closed_form = !no_closed_form;
    opts.repair = repair != "none";
    opts.threads = threads;
    const MatrixMapResult result = map_correlation_matrix(spec.marginals, spec.target, opts);

    const json out = matrix_result_to_json(result);
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw DomainError("cannot write file: " + out_path);
        f << out.dump(2) << "\n";
        std::printf("wrote %s\n", out_path.c_str());
    } else {
        std::cout << out.dump(2) << "\n";
    }
    if (result.repaired)
        std::fprintf(stderr, "note: matrix repaired; max entry perturbation %.3e\n",
                     result.max_perturbation);
    return kExitOk;
}

int run_curve(const std::string& pair_path, double grid, const std::string& out_path,
              int degree) {
    const PairSpec pair = parse_pair(load_json(pair_path));
    if (!(grid > 0.0 && grid <= 1.0)) throw DomainError("curve: grid step must lie in (0, 1]");

    LinkPolynomial poly;
    int selected = degree;
    if (degree > 0) {
        poly = build_link(pair.marginal_i, pair.marginal_j, degree);
    } else {
        DegreeSelection sel = select_degree(pair.marginal_i, pair.marginal_j);
        poly = std::move(sel.poly);
        selected = sel.selected_degree;
    }

    std::ostringstream csv;
    csv << "# marginals: " << pair.marginal_i.name() << ", " << pair.marginal_j.name() << "\n";
    csv << "# degree: " << poly.degree() << " (selected at " << selected << ")\n";
    for (const std::string& w : poly.meta.warnings) csv << "# warning: " << w << "\n";
    csv << "rho_z,rho_x\n";
    const int steps = static_cast<int>(std::lround(2.0 / grid));
    for (int i = 0; i <= steps; ++i) {
        const double r = -1.0 + i * grid;
        csv << format_csv_value(r) << "," << format_csv_value(evaluate(poly, r)) << "\n";
    }

    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw DomainError("cannot write file: " + out_path);
        f << csv.str();
        std::printf("wrote %s\n", out_path.c_str());
    } else {
        std::cout << csv.str();
    }
    return kExitOk;
}

struct BenchRow {
    double rho_x;
    double reference;  // published value this run is compared against
};

void bench_header(const char* title) {
    std::printf("\n%s\n", title);
    std::printf("%10s %12s %12s %10s %12s %10s\n", "rho_x", "poly", "bisect", "mc", "reference",
                "delta");
}

void bench_pair(const Marginal& mi, const Marginal& mj, const LinkPolynomial& poly,
                const std::vector<BenchRow>& rows, long mc_samples, std::uint64_t seed) {
    for (const BenchRow& row : rows) {
        const SolveReport rep = solve_rho_z(poly, row.rho_x);
        std::string bisect = "n/a";
        try {
            BisectionResult bis;
            if (mi.is_continuous() && mj.is_continuous())
                bis = bisection_continuous(mi, mj, row.rho_x);
            else if (mi.is_discrete() && mj.is_discrete())
                bis = bisection_discrete(mi, mj, row.rho_x);
            else
                bis = bisection_mixed(mi, mj, row.rho_x);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", bis.rho_z);
            bisect = buf;
        } catch (const InfeasibleTargetError&) {
            // boundary target the search cannot bracket; leave the column empty
        }
        const McEstimate mc = mc_estimate(mi, mj, rep.rho_z, mc_samples, seed);
        std::printf("%10.3f %12.4f %12s %10.4f %12.3f %10.2e\n", row.rho_x, rep.rho_z,
                    bisect.c_str(), mc.rho_hat, row.reference,
                    std::fabs(rep.rho_z - row.reference));
    }
}

int run_bench(const std::string& table, long mc_samples, std::uint64_t seed) {
    if (table == "t1") {
        // Stabilization gaps for the uniform pair against the published column.
        const double ref_dp[] = {0.33, 0.054, 0.0091, 1.6e-3, 3.1e-4, 6.2e-5, 1.3e-5, 2.7e-6,
                                 6.0e-7};
        const double ref_dps[] = {0.40, 0.065, 0.011, 2.0e-3, 3.9e-4, 7.9e-5, 1.6e-5, 3.5e-6,
                                  7.7e-7};
        const Marginal u = Marginal::uniform01();
        std::printf("\nuniform01 ~ uniform01 degree ladder\n");
        std::printf("%6s %12s %12s %10s %12s %12s %10s\n", "j", "dP_j", "ref", "ratio", "dP*_j",
                    "ref", "ratio");
        int idx = 0;
        for (int j = 1; j <= 17; j += 2, ++idx) {
            BuildOptions coarse_opts, fine_opts;
            coarse_opts.rule_points = j + 1;
            coarse_opts.mode = CoefficientMode::QuadratureOnly;
            fine_opts.rule_points = j + 3;
            fine_opts.mode = CoefficientMode::QuadratureOnly;
            const LinkPolynomial pc = build_continuous(u, u, j, coarse_opts);
            const LinkPolynomial pf = build_continuous(u, u, j + 2, fine_opts);
            double gap = 0.0, gap_star = 0.0;
            for (int i = 0; i <= 200; ++i) {
                const double r = -1.0 + i * 0.01;
                gap = std::max(gap, std::fabs(evaluate(pc, r) - evaluate(pf, r)));
                const double exact = closed_form(ClosedFormCase::UniformUniform,
                                                 LinkDirection::ZToX, r);
                gap_star = std::max(gap_star, std::fabs(evaluate(pc, r) - exact));
            }
            std::printf("%6d %12.3e %12.1e %10.3f %12.3e %12.1e %10.3f\n", j, gap, ref_dp[idx],
                        gap / ref_dp[idx], gap_star, ref_dps[idx], gap_star / ref_dps[idx]);
        }
        return kExitOk;
    }

    if (table == "t2") {
        const Marginal beta = Marginal::beta(2.0, 3.0);
        const DegreeSelection sel = select_degree(beta, beta);
        std::printf("beta(2,3) ~ beta(2,3): selected degree %d (polynomial degree %d)\n",
                    sel.selected_degree, sel.poly.degree());
        long quantile_calls = 0;
        {
            long counter = 0;
            const Marginal counted = with_counted_quantile(beta, &counter);
            BuildOptions opts;
            opts.rule_points = 12;
            opts.mode = CoefficientMode::QuadratureOnly;
            const LinkPolynomial p = build_continuous(counted, counted, 11, opts);
            (void)p;
            quantile_calls = counter;
        }
        bench_header("rho_z for beta(2,3) ~ beta(2,3)");
        bench_pair(beta, beta, sel.poly,
                   {{-0.9, -0.914}, {-0.6, -0.611}, {-0.3, -0.306}, {0.3, 0.304}, {0.6, 0.606},
                    {0.9, 0.903}},
                   mc_samples, seed);
        const BisectionResult bis = bisection_continuous(beta, beta, 0.6);
        std::printf("\ncost: bisection %ld quantile calls per solve; degree-11 polynomial build "
                    "%ld calls\n",
                    bis.counters.quantile_calls, quantile_calls);
        return kExitOk;
    }

    if (table == "t3") {
        const Marginal b2 = Marginal::binomial(2, 0.2);
        const Marginal b20 = Marginal::binomial(20, 0.2);
        const DegreeSelection sel2 = select_degree(b2, b2);
        const DegreeSelection sel20 = select_degree(b20, b20);
        std::printf("B(2,0.2) pair: ladder %s at degree %d; reference degree 23\n",
                    sel2.cap_hit ? "capped" : "stabilized", sel2.selected_degree);
        std::printf("B(20,0.2) pair: ladder stabilized at degree %d; reference degree 3\n",
                    sel20.selected_degree);
        bench_header("rho_z for B(2,0.2) ~ B(2,0.2), degree 23");
        bench_pair(b2, b2, build_discrete(b2, b2, 23),
                   {{-0.5, -0.946}, {-0.3, -0.501}, {-0.2, -0.322}, {0.3, 0.418}, {0.6, 0.769},
                    {0.8, 0.943}},
                   mc_samples, seed);
        bench_header("rho_z for B(20,0.2) ~ B(20,0.2), degree 3");
        bench_pair(b20, b20, build_discrete(b20, b20, 3),
                   {{-0.9, -0.938}, {-0.6, -0.624}, {-0.3, -0.311}, {0.3, 0.310}, {0.6, 0.618},
                    {0.9, 0.925}},
                   mc_samples, seed);
        return kExitOk;
    }

    if (table == "t4") {
        const Marginal b2 = Marginal::binomial(2, 0.2);
        const Marginal b20 = Marginal::binomial(20, 0.2);
        const Marginal beta = Marginal::beta(2.0, 3.0);
        std::printf("B(2,0.2) ~ beta(2,3): ladder degree %d; reference degree 7\n",
                    select_degree(b2, beta).selected_degree);
        std::printf("B(20,0.2) ~ beta(2,3): ladder degree %d; reference degree 5\n",
                    select_degree(b20, beta).selected_degree);
        bench_header("rho_z for B(2,0.2) ~ beta(2,3), degree 7");
        bench_pair(b2, beta, build_mixed(b2, beta, 7),
                   {{-0.7, -0.889}, {-0.5, -0.632}, {-0.3, -0.377}, {0.3, 0.366}, {0.5, 0.603},
                    {0.8, 0.945}},
                   mc_samples, seed);
        bench_header("rho_z for B(20,0.2) ~ beta(2,3), degree 5");
        bench_pair(b20, beta, build_mixed(b20, beta, 5),
                   {{-0.9, -0.929}, {-0.6, -0.618}, {-0.3, -0.309}, {0.3, 0.308}, {0.6, 0.613},
                    {0.9, 0.916}},
                   mc_samples, seed);
        return kExitOk;
    }

    throw DomainError("unknown bench table '" + table + "' (t1|t2|t3|t4)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equivalent normal-space correlation for Gaussian copulas"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    bool auto_degree = false;
    CLI::App* solve = app.add_subcommand("solve", "Solve rho_z for one marginal pair");
    solve->add_option("--pair", solve_args.pair_path, "pair spec JSON file")->required();
    solve->add_option("--rho-x", solve_args.targets, "target correlation(s)");
    solve->add_option("--degree", solve_args.degree, "fixed polynomial degree");
    solve->add_flag("--auto-degree", auto_degree, "select the degree automatically (default)");
    solve->add_option("--delta", solve_args.delta, "degree selection bound");
    solve->add_option("--step", solve_args.step, "degree selection step");
    solve->add_option("--cap", solve_args.cap, "degree cap");
    solve->add_option("--method", solve_args.method, "poly|bisect|closed")
        ->check(CLI::IsMember({"poly", "bisect", "closed"}));
    solve->add_flag("--no-closed-form", solve_args.no_closed_form,
                    "do not shortcut recognized pairs");
    solve->add_flag("--json", solve_args.as_json, "JSON output");
    solve->add_option("--quad-points", solve_args.quad_points, "bisection quadrature points");
    solve->add_option("--eps", solve_args.eps, "bisection error bound");

    std::string matrix_spec, matrix_repair = "clip", matrix_out;
    bool matrix_no_cf = false;
    int matrix_threads = 0;
    CLI::App* matrix = app.add_subcommand("matrix", "Map a target correlation matrix");
    matrix->add_option("--spec", matrix_spec, "matrix spec JSON file")->required();
    matrix->add_option("--repair", matrix_repair, "clip|none")
        ->check(CLI::IsMember({"clip", "none"}));
    matrix->add_option("--out", matrix_out, "output JSON file");
    matrix->add_flag("--no-closed-form", matrix_no_cf, "do not shortcut recognized pairs");
    matrix->add_option("--threads", matrix_threads, "worker threads (0 = auto)");

    std::string curve_pair, curve_out;
    double curve_grid = 0.01;
    int curve_degree = 0;
    CLI::App* curve = app.add_subcommand("curve", "Tabulate the link curve rho_z -> rho_x");
    curve->add_option("--pair", curve_pair, "pair spec JSON file")->required();
    curve->add_option("--grid", curve_grid, "rho_z grid step");
    curve->add_option("--out", curve_out, "output CSV file");
    curve->add_option("--degree", curve_degree, "fixed polynomial degree");

    std::string bench_table;
    long bench_samples = 1000000;
    std::uint64_t bench_seed = 20240901;
    CLI::App* bench = app.add_subcommand("bench", "Reproduce the reference tables");
    bench->add_option("--table", bench_table, "t1|t2|t3|t4")->required();
    bench->add_option("--mc-samples", bench_samples, "Monte Carlo sample count");
    bench->add_option("--seed", bench_seed, "Monte Carlo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (matrix->parsed())
            return run_matrix(matrix_spec, matrix_repair, matrix_out, matrix_no_cf,
                              matrix_threads);
        if (curve->parsed()) return run_curve(curve_pair, curve_grid, curve_out, curve_degree);
        if (bench->parsed()) return run_bench(bench_table, bench_samples, bench_seed);
    } catch (const InfeasibleTargetError& e) {
        std::fprintf(stderr, "error: %s\nfeasible range: [%.6f, %.6f]\n", e.what(), e.feasible_lo,
                     e.feasible_hi);
        return kExitInfeasible;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: invalid JSON input: %s\n", e.what());
        return kExitInput;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitOk;
}
