#include "run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <utility>
#include <variant>
#include <vector>

#include "config.hpp"

namespace gbvp::cli {

namespace {

using ojson = nlohmann::ordered_json;
using Verdicts = std::vector<std::pair<std::string, bool>>;

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

ojson jnum(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? ojson("nan") : ojson(x > 0 ? "inf" : "-inf");
}

ojson jseries(const std::vector<double>& v) {
    ojson a = ojson::array();
    for (double x : v) a.push_back(jnum(x));
    return a;
}

void write_json(const std::filesystem::path& path, const ojson& doc) {
    std::ofstream out(path);
    if (!out) throw std::filesystem::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
    out << doc.dump(2) << '\n';
}

class Csv {
public:
    explicit Csv(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw std::filesystem::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
    }
    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    static std::string cell(double x) { return num(x); }
    static std::string cell(bool x) { return x ? "true" : "false"; }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(std::size_t x) { return std::to_string(x); }
    static std::string cell(const std::string& x) { return x; }
    static std::string cell(const char* x) { return x; }
    static std::string cell(const std::optional<double>& x) { return x ? num(*x) : ""; }

    std::ofstream out_;
};

ojson well_posedness_json(const WellPosednessVerdict& v) {
    return {{"well_posed", v.well_posed},
            {"ill_conditioned", v.ill_conditioned},
            {"sigma_min", jnum(v.sigma_min)},
            {"sigma_max", jnum(v.sigma_max)},
            {"tol", v.tol},
            {"det", {jnum(v.det.real()), jnum(v.det.imag())}}};
}

ojson trend_json(const TrendVerdict& v) { return {{"pass", v.pass}, {"reason", v.reason}}; }

ojson condition_json(const ConditionReport& r) {
    return {{"distances", jseries(r.distances)}, {"deviations", jseries(r.deviations)}, {"verdict", trend_json(r.verdict)}};
}

ojson grid_json(const Grid& g) { return {{"a", g.a()}, {"b", g.b()}, {"intervals", g.intervals()}}; }

ojson header(const ProblemConfig& cfg, const RunOptions& opt, const Grid& grid) {
    return {{"schema_version", kSchemaVersion},
            {"command", opt.command},
            {"name", cfg.name},
            {"seed", opt.seed},
            {"p", jnum(cfg.p)},
            {"grid", grid_json(grid)}};
}

/// Compares verdicts with the expect block (or requires all to pass) and records the outcome.
int finish(ojson& doc, const Verdicts& verdicts, const ProblemConfig& cfg, std::ostream& log) {
    ojson v = ojson::object();
    for (const auto& [k, ok] : verdicts) v[k] = ok;
    doc["verdicts"] = v;
    std::vector<std::string> failures;
    std::vector<std::string> skipped;
    const auto find = [&](const std::string& k) {
        return std::find_if(verdicts.begin(), verdicts.end(), [&](const auto& x) { return x.first == k; });
    };
    // Expectations may target another command; only the ones evaluated here count.
    const bool any_evaluated =
        std::any_of(cfg.expect.begin(), cfg.expect.end(), [&](const auto& e) { return find(e.first) != verdicts.end(); });
    if (!any_evaluated) {
        for (const auto& [k, ok] : verdicts) {
            if (!ok) failures.push_back(k + " failed");
        }
    }
    if (!cfg.expect.empty()) {
        ojson e = ojson::object();
        for (const auto& [k, want] : cfg.expect) {
            e[k] = want;
            auto it = find(k);
            if (it == verdicts.end()) skipped.push_back(k);
            else if (it->second != want) failures.push_back(k + " is " + (it->second ? "true" : "false") + ", expected " + (want ? "true" : "false"));
        }
        doc["expect"] = e;
        doc["expect_skipped"] = skipped;
    }
    doc["status"] = failures.empty() ? "pass" : "fail";
    doc["failures"] = failures;
    for (const auto& [k, ok] : verdicts) log << "  " << k << ": " << (ok ? "true" : "false") << '\n';
    for (const auto& f : failures) log << "FAIL " << f << '\n';
    log << (failures.empty() ? "status: pass" : "status: fail") << '\n';
    return failures.empty() ? kExitOk : kExitVerdictFailed;
}

bool is_canonical(const BoundaryValueProblem& bvp) {
    return std::holds_alternative<CanonicalBoundaryOperator>(bvp.boundary);
}

int run_solve(const ProblemConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const Grid grid = cfg.grid(opt.grid);
    const auto bvp = build_problem(cfg, cfg.limit_context());
    const BvpSolver solver(bvp, grid, cfg.anchor, cfg.tol.well_posed);
    ojson doc = header(cfg, opt, grid);
    doc["well_posedness"] = well_posedness_json(solver.verdict());
    Verdicts verdicts{{"well_posed", solver.verdict().well_posed}};

    if (solver.verdict().well_posed) {
        const GridFunction y = solver.solve();
        const int top = y.max_order();
        doc["discrepancy"] = jnum(discrepancy(solver.discretized(), solver.discretized().own_forcing(), bvp.boundary,
                                              bvp.c, y, cfg.p));
        if (const auto exact = exact_solution(cfg)) {
            const GridFunction diff = y - sample(*exact, grid, top);
            const double err = sobolev_norm(diff, top, cfg.p);
            const double sup = lp_norm(diff, 0, std::numeric_limits<double>::infinity());
            doc["exact"] = {{"sobolev_error", jnum(err)}, {"sup_error", jnum(sup)}, {"order", top},
                            {"tolerance", cfg.tol.solution_error}};
            verdicts.emplace_back("solution_error", err <= cfg.tol.solution_error);
        }

        Csv csv(opt.out_dir / "solution.csv");
        std::vector<std::string> head{"t"};
        for (int s = 0; s <= top; ++s) {
            for (Eigen::Index i = 0; i < y.rows(); ++i) {
                const std::string base = "y" + std::to_string(i) + "_d" + std::to_string(s);
                head.push_back(base + "_re");
                head.push_back(base + "_im");
            }
        }
        csv.row(head);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            std::vector<std::string> cells{num(grid.node(k))};
            for (int s = 0; s <= top; ++s) {
                for (Eigen::Index i = 0; i < y.rows(); ++i) {
                    cells.push_back(num(y(s, k, i).real()));
                    cells.push_back(num(y(s, k, i).imag()));
                }
            }
            csv.row(cells);
        }
    } else {
        log << "problem is not well posed; no solution written\n";
    }

    Csv summary(opt.out_dir / "solve_summary.csv");
    summary.row("name", "intervals", "p", "well_posed", "sigma_min", "discrepancy", "sobolev_error");
    const auto field = [&](const char* k, const char* sub = nullptr) -> std::optional<double> {
        if (!doc.contains(k)) return std::nullopt;
        const ojson& v = sub ? doc[k][sub] : doc[k];
        return v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt;
    };
    summary.row(cfg.name, grid.intervals(), cfg.p, solver.verdict().well_posed, solver.verdict().sigma_min,
                field("discrepancy"), field("exact", "sobolev_error"));

    const int code = finish(doc, verdicts, cfg, log);
    write_json(opt.out_dir / "verdict.json", doc);
    return code;
}

struct BResult {
    std::optional<BConvergenceReport> report;
    std::string skipped;
};

BResult maybe_b_convergence(const ProblemConfig& cfg, const ParameterFamily& fam) {
    if (!is_canonical(fam.build(fam.limit))) return {std::nullopt, "boundary operator is not canonical"};
    if (!std::isfinite(cfg.p)) return {std::nullopt, "p = inf has no dual exponent"};
    BConvergenceOptions bo;
    bo.trend = cfg.tol.trend;
    bo.bound_factor = cfg.tol.b_bound_factor;
    bo.cap = cfg.tol.b_cap;
    return {check_B_convergence(fam, cfg.p, bo), {}};
}

ojson b_json(const BResult& b) {
    if (!b.report) return {{"skipped", b.skipped}};
    const auto& r = *b.report;
    return {{"distances", jseries(r.distances)},
            {"alpha_deviation", jseries(r.alpha_deviation)},
            {"phi_norm", jseries(r.phi_norm)},
            {"phi_norm_limit", jnum(r.phi_norm_limit)},
            {"phi_bound", jnum(r.phi_bound)},
            {"primitive_deviation", jseries(r.primitive_deviation)},
            {"density_deviation", jseries(r.density_deviation)},
            {"a", trend_json(r.a)},
            {"b", r.b},
            {"c", trend_json(r.c)},
            {"d", trend_json(r.d)},
            {"strong", r.strong()},
            {"uniform", r.uniform()}};
}

void add_b_verdicts(const BResult& b, Verdicts& v) {
    if (!b.report) return;
    v.emplace_back("b_alpha", b.report->a.pass);
    v.emplace_back("b_bounded", b.report->b);
    v.emplace_back("b_primitive", b.report->c.pass);
    v.emplace_back("b_density", b.report->d.pass);
    v.emplace_back("strong", b.report->strong());
    v.emplace_back("uniform", b.report->uniform());
}

void write_b_csv(const BResult& b, const std::filesystem::path& path) {
    if (!b.report) return;
    const auto& r = *b.report;
    Csv csv(path);
    csv.row("distance", "alpha_deviation", "phi_norm", "primitive_deviation", "density_deviation");
    for (std::size_t i = 0; i < r.distances.size(); ++i) {
        csv.row(r.distances[i], r.alpha_deviation[i], r.phi_norm[i], r.primitive_deviation[i], r.density_deviation[i]);
    }
}

int run_check(const ProblemConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const Grid grid = cfg.grid(opt.grid);
    ojson doc = header(cfg, opt, grid);
    const auto bvp0 = build_problem(cfg, cfg.limit_context());
    const BvpSolver solver(bvp0, grid, cfg.anchor, cfg.tol.well_posed);
    doc["well_posed"] = solver.verdict().well_posed;
    doc["condition_zero"] = well_posedness_json(solver.verdict());
    Verdicts verdicts{{"condition_zero", solver.verdict().well_posed}};

    if (cfg.family) {
        const auto fam = make_family(cfg, grid);
        const auto c1 = check_condition_I(fam, cfg.p, cfg.tol.trend);
        const int top = cfg.n + cfg.r;
        const auto tests = make_test_set(grid, cfg.m, top, opt.seed);
        const auto c2 = check_condition_II(fam, tests, cfg.tol.trend);
        const auto op = operator_deviation_L(fam, tests, cfg.p, cfg.tol.trend);
        doc["condition_I"] = condition_json(c1);
        doc["condition_II"] = condition_json(c2);
        doc["operator_deviation"] = condition_json(op);
        verdicts.emplace_back("condition_I", c1.verdict.pass);
        verdicts.emplace_back("condition_II", c2.verdict.pass);
        verdicts.emplace_back("operator_deviation", op.verdict.pass);
        const auto b = maybe_b_convergence(cfg, fam);
        doc["b_convergence"] = b_json(b);
        add_b_verdicts(b, verdicts);
    }
    const int code = finish(doc, verdicts, cfg, log);
    write_json(opt.out_dir / "check.json", doc);
    return code;
}

ojson row_json(const ConvergenceRow& r) {
    ojson j = {{"label", r.label},
               {"mu", jnum(r.mu)},
               {"distance", jnum(r.distance)},
               {"well_posed", r.well_posed},
               {"sigma_min", jnum(r.sigma_min)},
               {"coefficient_deviation", jnum(r.coefficient_deviation)},
               {"boundary_deviation", jnum(r.boundary_deviation)},
               {"solution_deviation", jnum(r.solution_deviation)},
               {"discrepancy", jnum(r.discrepancy)},
               {"ratio", r.ratio ? jnum(*r.ratio) : ojson(nullptr)}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

void write_rows_csv(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path) {
    Csv csv(path);
    csv.row("label", "mu", "distance", "well_posed", "sigma_min", "coefficient_deviation", "boundary_deviation",
            "solution_deviation", "discrepancy", "ratio", "error");
    for (const auto& r : rows) {
        csv.row(r.label, r.mu, r.distance, r.well_posed, r.sigma_min, r.coefficient_deviation, r.boundary_deviation,
                r.solution_deviation, r.discrepancy, r.ratio, r.error);
    }
}

int run_sweep(const ProblemConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const Grid grid = cfg.grid(opt.grid);
    const auto fam = make_family(cfg, grid);
    ojson doc = header(cfg, opt, grid);
    const auto rep = continuity_experiment(fam, cfg.p, opt.seed, cfg.tol.trend);

    doc["condition_zero"] = well_posedness_json(rep.condition_zero);
    doc["condition_I"] = condition_json(rep.condition_I);
    doc["condition_II"] = condition_json(rep.condition_II);
    doc["solution_trend"] = trend_json(rep.solution_trend);
    doc["conditions_pass"] = rep.conditions_pass;
    doc["consistent"] = rep.consistent;
    if (rep.well_posed_range) {
        doc["well_posed_range"] = {jnum(rep.well_posed_range->first), jnum(rep.well_posed_range->second)};
    } else {
        doc["well_posed_range"] = nullptr;
    }
    ojson rows = ojson::array();
    for (const auto& r : rep.rows) rows.push_back(row_json(r));
    doc["rows"] = rows;
    write_rows_csv(rep.rows, opt.out_dir / "sweep.csv");

    {
        Csv plot(opt.out_dir / "sweep_plot.csv");
        plot.row("distance", "solution_deviation", "discrepancy", "coefficient_deviation", "boundary_deviation");
        for (const auto& r : rep.rows) {
            plot.row(r.distance, r.solution_deviation, r.discrepancy, r.coefficient_deviation, r.boundary_deviation);
        }
    }

    Verdicts verdicts{{"condition_zero", rep.condition_zero.well_posed},
                      {"condition_I", rep.condition_I.verdict.pass},
                      {"condition_II", rep.condition_II.verdict.pass},
                      {"solution_trend", rep.solution_trend.pass},
                      {"consistent", rep.consistent}};

    const auto b = maybe_b_convergence(cfg, fam);
    doc["b_convergence"] = b_json(b);
    add_b_verdicts(b, verdicts);
    write_b_csv(b, opt.out_dir / "b_convergence.csv");

    if (cfg.family->two_sided) {
        const auto ts = two_sided_bound_experiment(fam, cfg.p, cfg.tol.two_sided_bound, cfg.tol.rescale);
        ojson t = {{"ratios", jseries(ts.ratios)},
                   {"gamma_lower", jnum(ts.gamma_lower)},
                   {"gamma_upper", jnum(ts.gamma_upper)},
                   {"spread", jnum(ts.spread)},
                   {"bound", ts.bound},
                   {"rescaled_ratios", jseries(ts.rescaled_ratios)},
                   {"rescale_factor", ts.rescale_factor},
                   {"rescale_change", jnum(ts.rescale_change)},
                   {"pass", ts.pass}};
        doc["two_sided"] = t;
        write_rows_csv(ts.rows, opt.out_dir / "two_sided.csv");
        verdicts.emplace_back("two_sided", ts.pass);
    }

    const int code = finish(doc, verdicts, cfg, log);
    write_json(opt.out_dir / "sweep.json", doc);
    return code;
}

int run_approximate(const ProblemConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const Grid grid = cfg.grid(opt.grid);
    const PipelineConfig pc = cfg.pipeline.value_or(PipelineConfig{default_schedule(5)});
    const auto bvp0 = build_problem(cfg, cfg.limit_context());
    if (!is_canonical(bvp0)) {
        throw SchemaError("$.boundary.type", "approximate needs a canonical or points boundary operator");
    }
    ApproximantOptions ao;
    ao.route = pc.route;
    ao.t0 = cfg.anchor;
    ao.tol = cfg.tol.well_posed;
    const auto rep = pipeline_report(bvp0, pc.levels, cfg.p, pc.test_rhs, grid, opt.seed, ao);

    ojson doc = header(cfg, opt, grid);
    doc["sigma_min_0"] = jnum(rep.sigma_min_0);
    const auto& phi0 = std::get<CanonicalBoundaryOperator>(bvp0.boundary).phi;
    const bool regulated = is_regulated(phi0.sample(grid), static_cast<std::size_t>(pc.regulated_window),
                                        pc.regulated_tol);
    doc["advisory"] = {{"regulated", regulated},
                       {"note", regulated ? "density looks regulated"
                                          : "density does not look regulated; step approximation may not converge"}};

    std::vector<double> sol, sup, gap;
    bool levels_ok = true;
    ojson rows = ojson::array();
    Csv csv(opt.out_dir / "pipeline.csv");
    csv.row("k", "poly_degree", "partition_size", "fejer_order", "well_posed", "sigma_min", "coefficient_error",
            "density_error", "operator_gap", "solution_error", "sup_deviation");
    for (const auto& r : rep.rows) {
        rows.push_back({{"k", r.level.k},
                        {"poly_degree", r.level.poly_degree},
                        {"partition_size", r.level.partition_size},
                        {"fejer_order", r.level.fejer_order},
                        {"well_posed", r.well_posed},
                        {"sigma_min", jnum(r.sigma_min)},
                        {"coefficient_error", jnum(r.coefficient_error)},
                        {"density_error", jnum(r.density_error)},
                        {"operator_gap", jnum(r.operator_gap)},
                        {"solution_error", jnum(r.solution_error)},
                        {"sup_deviation", jnum(r.sup_deviation)},
                        {"rhs_deviation", jseries(r.rhs_deviation)}});
        csv.row(r.level.k, r.level.poly_degree, r.level.partition_size, r.level.fejer_order, r.well_posed,
                r.sigma_min, r.coefficient_error, r.density_error, r.operator_gap, r.solution_error,
                r.sup_deviation);
        if (r.level.k >= 2 && !r.well_posed) levels_ok = false;
        sol.push_back(r.solution_error);
        sup.push_back(r.sup_deviation);
        gap.push_back(r.operator_gap);
    }
    doc["rows"] = rows;
    {
        Csv plot(opt.out_dir / "pipeline_plot.csv");
        plot.row("k", "coefficient_error", "density_error", "operator_gap", "solution_error", "sup_deviation");
        for (const auto& r : rep.rows) {
            plot.row(r.level.k, r.coefficient_error, r.density_error, r.operator_gap, r.solution_error,
                     r.sup_deviation);
        }
    }
    const auto t_sol = trend_to_zero(sol, cfg.tol.trend);
    const auto t_sup = trend_to_zero(sup, cfg.tol.trend);
    const auto t_gap = trend_to_zero(gap, cfg.tol.trend);
    doc["solution_trend"] = trend_json(t_sol);
    doc["sup_trend"] = trend_json(t_sup);
    doc["operator_gap_trend"] = trend_json(t_gap);
    Verdicts verdicts{{"levels_well_posed", levels_ok},
                      {"solution_trend", t_sol.pass},
                      {"sup_trend", t_sup.pass},
                      {"operator_gap_trend", t_gap.pass}};
    const int code = finish(doc, verdicts, cfg, log);
    write_json(opt.out_dir / "pipeline.json", doc);
    return code;
}

void write_error(const RunOptions& opt, const std::string& kind, const std::string& message,
                 const std::string& path = {}) {
    std::error_code ec;
    if (!std::filesystem::is_directory(opt.out_dir, ec)) return;
    ojson doc = {{"schema_version", kSchemaVersion}, {"command", opt.command}, {"kind", kind}, {"message", message}};
    if (!path.empty()) doc["path"] = path;
    try {
        write_json(opt.out_dir / "error.json", doc);
    } catch (...) {
    }
}

}  // namespace

int run(const RunOptions& opt, std::ostream& log) {
    try {
        if (opt.command != "solve" && opt.command != "check" && opt.command != "sweep" &&
            opt.command != "approximate") {
            log << "error: unknown command '" << opt.command << "'\n";
            return kExitSchema;
        }
        const ProblemConfig cfg = load_config(opt.config_path);
        std::filesystem::create_directories(opt.out_dir);
        log << opt.command << ": " << cfg.name << '\n';
        if (opt.command == "solve") return run_solve(cfg, opt, log);
        if (opt.command == "check") return run_check(cfg, opt, log);
        if (opt.command == "sweep") return run_sweep(cfg, opt, log);
        return run_approximate(cfg, opt, log);
    } catch (const SchemaError& e) {
        log << "schema error at " << e.what() << '\n';
        write_error(opt, "schema", e.what(), e.path());
        return kExitSchema;
    } catch (const InvalidArgument& e) {
        log << "invalid argument: " << e.what() << '\n';
        write_error(opt, "invalid_argument", e.what());
        return kExitSchema;
    } catch (const NumericalError& e) {
        log << "numerical error: " << e.what() << '\n';
        write_error(opt, "numerical", e.what());
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "i/o error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const nlohmann::json::exception& e) {
        log << "config error: " << e.what() << '\n';
        return kExitSchema;
    }
}

}  // namespace gbvp::cli
