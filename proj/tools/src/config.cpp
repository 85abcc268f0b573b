#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gbvp::cli {

Grid ProblemConfig::grid(std::optional<std::size_t> override_intervals) const {
    const std::size_t N = override_intervals.value_or(intervals);
    if (N < 2 || N % 2 != 0) throw SchemaError("$.grid", "grid interval count must be even and >= 2");
    return Grid(a, b, N);
}

ParamContext ProblemConfig::limit_context() const {
    return {family ? family->limit.mu : 0.0, true};
}

namespace {

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj[key];
    if (!v.is_number()) throw SchemaError(key_path(path, key), "expected a number");
    return v.get<double>();
}

Tolerances parse_tolerances(const json& v, const std::string& path) {
    Tolerances t;
    if (v.is_null()) return t;
    check_keys(v, path,
               {"well_posed", "trend_decay", "trend_tail", "trend_floor", "solution_error", "two_sided_bound",
                "rescale", "b_bound_factor", "b_cap"});
    t.well_posed = number_or(v, "well_posed", path, t.well_posed);
    t.trend.decay = number_or(v, "trend_decay", path, t.trend.decay);
    if (v.contains("trend_tail")) t.trend.tail = parse_int(v["trend_tail"], key_path(path, "trend_tail"), 1);
    t.trend.floor = number_or(v, "trend_floor", path, t.trend.floor);
    t.solution_error = number_or(v, "solution_error", path, t.solution_error);
    t.two_sided_bound = number_or(v, "two_sided_bound", path, t.two_sided_bound);
    t.rescale = number_or(v, "rescale", path, t.rescale);
    t.b_bound_factor = number_or(v, "b_bound_factor", path, t.b_bound_factor);
    if (v.contains("b_cap") && !v["b_cap"].is_null()) t.b_cap = number_or(v, "b_cap", path, 0.0);
    return t;
}

FamilyConfig parse_family(const json& v, const std::string& path) {
    check_keys(v, path, {"generator", "mu0", "first", "last", "points", "two_sided"});
    const json& g = require(v, path, "generator");
    if (!g.is_string()) throw SchemaError(key_path(path, "generator"), "expected a string");
    const std::string gen = g.get<std::string>();
    FamilyConfig f;
    if (v.contains("two_sided")) {
        if (!v["two_sided"].is_boolean()) throw SchemaError(key_path(path, "two_sided"), "expected a boolean");
        f.two_sided = v["two_sided"].get<bool>();
    }
    if (gen == "dyadic") {
        const double mu0 = number_or(v, "mu0", path, 0.0);
        const int first = parse_int(require(v, path, "first"), key_path(path, "first"), 0);
        const int last = parse_int(require(v, path, "last"), key_path(path, "last"), first);
        f.points = dyadic_points(mu0, first, last);
        f.limit = {mu0, 0.0, "limit"};
    } else if (gen == "harmonic") {
        const int first = parse_int(require(v, path, "first"), key_path(path, "first"), 1);
        const int last = parse_int(require(v, path, "last"), key_path(path, "last"), first);
        f.points = harmonic_points(first, last);
        f.limit = {0.0, 0.0, "limit"};
    } else if (gen == "list") {
        const double mu0 = number_or(v, "mu0", path, 0.0);
        const json& pts = require(v, path, "points");
        const std::string pp = key_path(path, "points");
        if (!pts.is_array() || pts.empty()) throw SchemaError(pp, "expected a non-empty list");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string ip = index_path(pp, i);
            check_keys(pts[i], ip, {"mu", "distance", "label"});
            ParameterPoint pt;
            pt.mu = number_or(pts[i], "mu", ip, 0.0);
            pt.distance = number_or(pts[i], "distance", ip, std::abs(pt.mu - mu0));
            pt.label = pts[i].value("label", "mu=" + std::to_string(pt.mu));
            if (!(pt.distance > 0.0)) throw SchemaError(ip, "sweep points need a positive distance");
            if (!f.points.empty() && !(pt.distance < f.points.back().distance)) {
                throw SchemaError(ip, "points must be sorted by strictly decreasing distance");
            }
            f.points.push_back(pt);
        }
        f.limit = {mu0, 0.0, "limit"};
    } else {
        throw SchemaError(key_path(path, "generator"), "unknown generator '" + gen + "'");
    }
    return f;
}

PipelineConfig parse_pipeline(const json& v, const std::string& path) {
    check_keys(v, path, {"levels", "schedule", "route", "test_rhs", "regulated_window", "regulated_tol"});
    PipelineConfig pc;
    if (v.contains("schedule")) {
        const json& s = v["schedule"];
        const std::string sp = key_path(path, "schedule");
        if (!s.is_array() || s.empty()) throw SchemaError(sp, "expected a non-empty list of levels");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string ip = index_path(sp, i);
            check_keys(s[i], ip, {"k", "poly_degree", "partition_size", "fejer_order"});
            ApproximationLevel lv;
            lv.k = parse_int(require(s[i], ip, "k"), key_path(ip, "k"), 1);
            lv.poly_degree = parse_int(require(s[i], ip, "poly_degree"), key_path(ip, "poly_degree"), 0);
            lv.partition_size = parse_int(require(s[i], ip, "partition_size"), key_path(ip, "partition_size"), 1);
            lv.fejer_order = parse_int(require(s[i], ip, "fejer_order"), key_path(ip, "fejer_order"), 1);
            pc.levels.push_back(lv);
        }
    } else {
        const int levels = v.contains("levels") ? parse_int(v["levels"], key_path(path, "levels"), 1) : 5;
        pc.levels = default_schedule(levels);
    }
    if (v.contains("route")) {
        const json& r = v["route"];
        const std::string rp = key_path(path, "route");
        if (r == "auto") pc.route = DensityRoute::Auto;
        else if (r == "fejer") pc.route = DensityRoute::Fejer;
        else if (r == "direct") pc.route = DensityRoute::Direct;
        else throw SchemaError(rp, "expected auto, fejer or direct");
    }
    if (v.contains("test_rhs")) pc.test_rhs = parse_int(v["test_rhs"], key_path(path, "test_rhs"), 1);
    if (v.contains("regulated_window")) {
        pc.regulated_window = parse_int(v["regulated_window"], key_path(path, "regulated_window"), 4);
    }
    pc.regulated_tol = number_or(v, "regulated_tol", path, pc.regulated_tol);
    return pc;
}

std::vector<Mat> parse_matrix_list(const json& v, const std::string& path, std::size_t count, Eigen::Index rows,
                                   Eigen::Index cols, const ParamContext& ctx) {
    if (!v.is_array() || v.size() != count) {
        throw SchemaError(path, "expected a list of " + std::to_string(count) + " matrices");
    }
    std::vector<Mat> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(parse_matrix(v[i], index_path(path, i), rows, cols, ctx));
    return out;
}

BoundaryOperator parse_boundary(const json& v, const std::string& path, const ProblemConfig& cfg,
                                const ParamContext& ctx) {
    const Eigen::Index ell = static_cast<Eigen::Index>(cfg.r) * cfg.m;
    const int top = cfg.n + cfg.r;
    const json& type_json = require(v, path, "type");
    if (!type_json.is_string()) throw SchemaError(key_path(path, "type"), "expected a string");
    const std::string type = type_json.get<std::string>();
    const double t0 = v.contains("t0") ? parse_real(v["t0"], key_path(path, "t0"), ctx) : cfg.a;
    if (t0 < cfg.a || t0 > cfg.b) throw SchemaError(key_path(path, "t0"), "t0 must lie in [a, b]");
    const auto density = [&]() {
        return v.contains("density") ? parse_density(v["density"], key_path(path, "density"), ell, cfg.m, ctx)
                                     : Density(ell, cfg.m);
    };

    if (type == "canonical") {
        check_keys(v, path, {"type", "t0", "alphas", "density"});
        CanonicalBoundaryOperator B;
        B.t0 = t0;
        B.alphas = parse_matrix_list(require(v, path, "alphas"), key_path(path, "alphas"),
                                     static_cast<std::size_t>(top), ell, cfg.m, ctx);
        B.phi = density();
        return B;
    }
    if (type == "points") {
        check_keys(v, path, {"type", "t0", "conditions", "density"});
        const json& cs = require(v, path, "conditions");
        const std::string cp = key_path(path, "conditions");
        if (!cs.is_array() || cs.empty()) throw SchemaError(cp, "expected a non-empty list of point conditions");
        std::vector<PointCondition> conds;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const std::string ip = index_path(cp, i);
            check_keys(cs[i], ip, {"tau", "order", "coef"});
            PointCondition pc;
            pc.tau = parse_real(require(cs[i], ip, "tau"), key_path(ip, "tau"), ctx);
            if (pc.tau < cfg.a || pc.tau > cfg.b) throw SchemaError(key_path(ip, "tau"), "tau must lie in [a, b]");
            pc.order = cs[i].contains("order") ? parse_int(cs[i]["order"], key_path(ip, "order"), 0) : 0;
            if (pc.order >= top) {
                throw SchemaError(key_path(ip, "order"), "point conditions need order < n + r");
            }
            pc.coef = parse_matrix(require(cs[i], ip, "coef"), key_path(ip, "coef"), ell, cfg.m, ctx);
            conds.push_back(std::move(pc));
        }
        return canonicalize_points(conds, t0, top, ell, cfg.m, density());
    }
    if (type == "multipoint") {
        check_keys(v, path, {"type", "t0", "alphas", "points", "betas"});
        MultipointBoundaryOperator B;
        B.t0 = t0;
        B.alphas = parse_matrix_list(require(v, path, "alphas"), key_path(path, "alphas"),
                                     static_cast<std::size_t>(top), ell, cfg.m, ctx);
        const json& pts = require(v, path, "points");
        const std::string pp = key_path(path, "points");
        if (!pts.is_array()) throw SchemaError(pp, "expected a list of points");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double t = parse_real(pts[i], index_path(pp, i), ctx);
            if (t < cfg.a || t > cfg.b) throw SchemaError(index_path(pp, i), "point must lie in [a, b]");
            if (!B.points.empty() && !(t > B.points.back())) {
                throw SchemaError(index_path(pp, i), "points must be strictly increasing");
            }
            B.points.push_back(t);
        }
        B.betas = parse_matrix_list(require(v, path, "betas"), key_path(path, "betas"), pts.size(), ell, cfg.m, ctx);
        return B;
    }
    throw SchemaError(key_path(path, "type"), "unknown boundary type '" + type + "'");
}

CoefficientFunction parse_rhs(const json& v, const std::string& path, int m, const ParamContext& ctx) {
    if (!v.is_array() || static_cast<int>(v.size()) != m) {
        throw SchemaError(path, "expected a list of " + std::to_string(m) + " scalar expressions");
    }
    std::vector<ScalarFunction> entries;
    for (std::size_t i = 0; i < v.size(); ++i) entries.push_back(parse_scalar(v[i], index_path(path, i), ctx));
    return vector_function(entries);
}

}  // namespace

BoundaryValueProblem build_problem(const ProblemConfig& cfg, const ParamContext& ctx) {
    const json& doc = cfg.doc;
    DifferentialSystem sys;
    sys.m = cfg.m;
    sys.r = cfg.r;
    sys.n = cfg.n;
    const json& coefs = require(doc, "$", "coefficients");
    if (!coefs.is_array() || static_cast<int>(coefs.size()) != cfg.r) {
        throw SchemaError("$.coefficients", "expected r = " + std::to_string(cfg.r) + " coefficient matrices");
    }
    for (std::size_t j = 0; j < coefs.size(); ++j) {
        const std::string path = index_path("$.coefficients", j);
        auto a = parse_matrix_function(coefs[j], path, cfg.m, cfg.m, ctx);
        if (a.max_order() < cfg.n) throw SchemaError(path, "expression lacks derivatives up to order n");
        sys.coefficients.push_back(std::move(a));
    }
    sys.rhs = doc.contains("rhs") ? parse_rhs(doc["rhs"], "$.rhs", cfg.m, ctx) : CoefficientFunction::zero(cfg.m, 1);
    if (sys.rhs.max_order() < cfg.n) throw SchemaError("$.rhs", "expression lacks derivatives up to order n");

    BoundaryValueProblem bvp{std::move(sys), parse_boundary(require(doc, "$", "boundary"), "$.boundary", cfg, ctx),
                             Vec::Zero(static_cast<Eigen::Index>(cfg.r) * cfg.m)};
    if (doc.contains("c")) bvp.c = parse_vector(doc["c"], "$.c", bvp.c.size(), ctx);
    try {
        bvp.validate();
    } catch (const SchemaError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw SchemaError("$.boundary", e.what());
    }
    return bvp;
}

std::optional<CoefficientFunction> exact_solution(const ProblemConfig& cfg) {
    if (!cfg.doc.contains("exact_solution")) return std::nullopt;
    auto f = parse_rhs(cfg.doc["exact_solution"], "$.exact_solution", cfg.m, cfg.limit_context());
    if (f.max_order() < cfg.n + cfg.r) {
        throw SchemaError("$.exact_solution", "expression lacks derivatives up to order n + r");
    }
    return f;
}

ParameterFamily make_family(const ProblemConfig& cfg, const Grid& grid) {
    if (!cfg.family) throw SchemaError("$.family", "this command needs a family block");
    ParameterFamily fam;
    fam.points = cfg.family->points;
    fam.limit = cfg.family->limit;
    fam.grid = grid;
    fam.t0 = cfg.anchor;
    fam.tol = cfg.tol.well_posed;
    const double mu0 = fam.limit.mu;
    fam.build = [cfg, mu0](const ParameterPoint& pt) {
        return build_problem(cfg, ParamContext{pt.distance == 0.0 ? mu0 : pt.mu, pt.distance == 0.0});
    };
    return fam;
}

ProblemConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw SchemaError("$", "config must be a JSON object");
    check_keys(doc, "$",
               {"schema_version", "name", "description", "interval", "dimensions", "p", "grid", "anchor",
                "coefficients", "rhs", "boundary", "c", "exact_solution", "tolerances", "family", "pipeline",
                "expect"});
    ProblemConfig cfg;
    cfg.doc = doc;
    const json& version = require(doc, "$", "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw SchemaError("$.schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    cfg.name = doc.value("name", std::string("problem"));

    const json& iv = require(doc, "$", "interval");
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
        throw SchemaError("$.interval", "expected [a, b]");
    }
    cfg.a = iv[0].get<double>();
    cfg.b = iv[1].get<double>();
    if (!(cfg.a < cfg.b) || !std::isfinite(cfg.a) || !std::isfinite(cfg.b)) {
        throw SchemaError("$.interval", "need finite a < b");
    }

    const json& dims = require(doc, "$", "dimensions");
    check_keys(dims, "$.dimensions", {"m", "r", "n"});
    cfg.m = parse_int(require(dims, "$.dimensions", "m"), "$.dimensions.m", 1);
    cfg.r = parse_int(require(dims, "$.dimensions", "r"), "$.dimensions.r", 1);
    cfg.n = dims.contains("n") ? parse_int(dims["n"], "$.dimensions.n", 0) : 0;
    cfg.p = doc.contains("p") ? parse_exponent(doc["p"], "$.p") : 2.0;
    if (doc.contains("grid")) {
        const int N = parse_int(doc["grid"], "$.grid", 2);
        if (N % 2 != 0) throw SchemaError("$.grid", "grid interval count must be even");
        cfg.intervals = static_cast<std::size_t>(N);
    }
    if (doc.contains("anchor")) {
        if (!doc["anchor"].is_number()) throw SchemaError("$.anchor", "expected a number");
        cfg.anchor = doc["anchor"].get<double>();
        if (*cfg.anchor < cfg.a || *cfg.anchor > cfg.b) throw SchemaError("$.anchor", "anchor must lie in [a, b]");
    }
    cfg.tol = parse_tolerances(doc.contains("tolerances") ? doc["tolerances"] : json(), "$.tolerances");
    if (doc.contains("family")) cfg.family = parse_family(doc["family"], "$.family");
    if (doc.contains("pipeline")) cfg.pipeline = parse_pipeline(doc["pipeline"], "$.pipeline");
    if (doc.contains("expect")) {
        const json& e = doc["expect"];
        if (!e.is_object()) throw SchemaError("$.expect", "expected an object of verdict flags");
        for (const auto& [k, v] : e.items()) {
            if (std::find(std::begin(kVerdictKeys), std::end(kVerdictKeys), k) == std::end(kVerdictKeys)) {
                throw SchemaError(key_path("$.expect", k), "unknown verdict name");
            }
            if (!v.is_boolean()) throw SchemaError(key_path("$.expect", k), "expected a boolean");
            cfg.expect[k] = v.get<bool>();
        }
    }

    // Dry run: every problem the config describes must build.
    build_problem(cfg, cfg.limit_context());
    if (cfg.family) {
        for (const auto& pt : cfg.family->points) build_problem(cfg, ParamContext{pt.mu, false});
    }
    exact_solution(cfg);
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("$", "cannot read config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace gbvp::cli
