#include "expressions.hpp"

#include <cmath>

namespace gbvp::cli {

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::string key_path(const std::string& path, const std::string& key) { return path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(key_path(path, key), "unknown field");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(key_path(path, key), "required field is missing");
    return *it;
}

namespace {

cplx plain_number(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw SchemaError(path, "expected a number or an [re, im] pair");
}

const json* limit_override(const json& v, const ParamContext& ctx) {
    if (ctx.at_limit && v.is_object()) {
        const auto it = v.find("at_limit");
        if (it != v.end()) return &*it;
    }
    return nullptr;
}

std::pair<cplx, cplx> pair_of(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected [c0, c1]");
    return {plain_number(v[0], index_path(path, 0)), plain_number(v[1], index_path(path, 1))};
}

}  // namespace

cplx parse_number(const json& v, const std::string& path, const ParamContext& ctx) {
    if (!v.is_object()) return plain_number(v, path);
    if (const json* o = limit_override(v, ctx)) return parse_number(*o, key_path(path, "at_limit"), ctx);
    check_keys(v, path, {"affine", "reciprocal", "at_limit"});
    if (v.contains("affine") == v.contains("reciprocal")) {
        throw SchemaError(path, "expected exactly one of affine or reciprocal");
    }
    if (v.contains("affine")) {
        const auto [c0, c1] = pair_of(v["affine"], key_path(path, "affine"));
        return c0 + c1 * ctx.mu;
    }
    const auto [c0, c1] = pair_of(v["reciprocal"], key_path(path, "reciprocal"));
    if (ctx.mu == 0.0) {
        throw SchemaError(path, "reciprocal parameter is undefined at mu = 0; add an at_limit override");
    }
    return c0 + c1 / ctx.mu;
}

double parse_real(const json& v, const std::string& path, const ParamContext& ctx) {
    const cplx z = parse_number(v, path, ctx);
    if (z.imag() != 0.0) throw SchemaError(path, "expected a real number");
    if (!std::isfinite(z.real())) throw SchemaError(path, "expected a finite number");
    return z.real();
}

int parse_int(const json& v, const std::string& path, int min_value) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > 1'000'000'000) {
        throw SchemaError(path, "integer must be >= " + std::to_string(min_value));
    }
    return static_cast<int>(x);
}

double parse_exponent(const json& v, const std::string& path) {
    if (v.is_string() && (v == "inf" || v == "infinity")) return kInfinity;
    if (!v.is_number() || !(v.get<double>() >= 1.0)) throw SchemaError(path, "expected p >= 1 or \"inf\"");
    return v.get<double>();
}

namespace {

std::vector<ScalarFunction> parse_list(const json& v, const std::string& path, const ParamContext& ctx) {
    if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a non-empty list of expressions");
    std::vector<ScalarFunction> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_scalar(v[i], index_path(path, i), ctx));
    return out;
}

cplx optional_number(const json& v, const char* key, const std::string& path, const ParamContext& ctx,
                     cplx fallback) {
    return v.contains(key) ? parse_number(v[key], key_path(path, key), ctx) : fallback;
}

double optional_real(const json& v, const char* key, const std::string& path, const ParamContext& ctx,
                     double fallback) {
    return v.contains(key) ? parse_real(v[key], key_path(path, key), ctx) : fallback;
}

}  // namespace

ScalarFunction parse_scalar(const json& v, const std::string& path, const ParamContext& ctx) {
    if (!v.is_object()) return fn::constant(parse_number(v, path, ctx));
    if (const json* o = limit_override(v, ctx)) return parse_scalar(*o, key_path(path, "at_limit"), ctx);
    if (v.contains("affine") || v.contains("reciprocal")) return fn::constant(parse_number(v, path, ctx));
    const json& kind_json = require(v, path, "kind");
    if (!kind_json.is_string()) throw SchemaError(key_path(path, "kind"), "expected a string");
    const std::string kind = kind_json.get<std::string>();

    if (kind == "zero") {
        check_keys(v, path, {"kind", "at_limit"});
        return fn::zero();
    }
    if (kind == "constant") {
        check_keys(v, path, {"kind", "value", "at_limit"});
        return fn::constant(parse_number(require(v, path, "value"), key_path(path, "value"), ctx));
    }
    if (kind == "polynomial") {
        check_keys(v, path, {"kind", "coefficients", "center", "at_limit"});
        const json& cs = require(v, path, "coefficients");
        const std::string cp = key_path(path, "coefficients");
        if (!cs.is_array() || cs.empty()) throw SchemaError(cp, "expected a non-empty list");
        std::vector<cplx> c;
        for (std::size_t i = 0; i < cs.size(); ++i) c.push_back(parse_number(cs[i], index_path(cp, i), ctx));
        return fn::polynomial(std::move(c), optional_real(v, "center", path, ctx, 0.0));
    }
    if (kind == "exp") {
        check_keys(v, path, {"kind", "scale", "rate", "at_limit"});
        return fn::exponential(optional_number(v, "scale", path, ctx, 1.0),
                               optional_number(v, "rate", path, ctx, 1.0));
    }
    if (kind == "sin" || kind == "cos") {
        check_keys(v, path, {"kind", "amplitude", "frequency", "phase", "at_limit"});
        const cplx amp = optional_number(v, "amplitude", path, ctx, 1.0);
        const double freq = optional_real(v, "frequency", path, ctx, 1.0);
        const double phase = optional_real(v, "phase", path, ctx, 0.0);
        return kind == "sin" ? fn::sine(amp, freq, phase) : fn::cosine(amp, freq, phase);
    }
    if (kind == "step") {
        check_keys(v, path, {"kind", "breakpoints", "values", "at_limit"});
        const json& bp = require(v, path, "breakpoints");
        const json& vals = require(v, path, "values");
        const std::string bpp = key_path(path, "breakpoints");
        const std::string vp = key_path(path, "values");
        if (!bp.is_array() || !vals.is_array() || bp.size() != vals.size() + 1 || vals.empty()) {
            throw SchemaError(path, "step needs M values and M + 1 breakpoints");
        }
        std::vector<double> b;
        std::vector<cplx> c;
        for (std::size_t i = 0; i < bp.size(); ++i) b.push_back(parse_real(bp[i], index_path(bpp, i), ctx));
        for (std::size_t i = 0; i < vals.size(); ++i) c.push_back(parse_number(vals[i], index_path(vp, i), ctx));
        try {
            return fn::step(std::move(b), std::move(c));
        } catch (const InvalidArgument& e) {
            throw SchemaError(bpp, e.what());
        }
    }
    if (kind == "oscillation") {
        check_keys(v, path, {"kind", "center", "amplitude", "at_limit"});
        return fn::singular_oscillation(optional_real(v, "center", path, ctx, 0.0),
                                        optional_number(v, "amplitude", path, ctx, 1.0));
    }
    if (kind == "sum") {
        check_keys(v, path, {"kind", "terms", "at_limit"});
        return fn::sum(parse_list(require(v, path, "terms"), key_path(path, "terms"), ctx));
    }
    if (kind == "product") {
        check_keys(v, path, {"kind", "factors", "at_limit"});
        auto factors = parse_list(require(v, path, "factors"), key_path(path, "factors"), ctx);
        ScalarFunction acc = factors.front();
        for (std::size_t i = 1; i < factors.size(); ++i) acc = fn::product(acc, factors[i]);
        return acc;
    }
    throw SchemaError(key_path(path, "kind"), "unknown expression kind '" + kind + "'");
}

namespace {

void check_rows(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
        throw SchemaError(path, "expected " + std::to_string(rows) + " rows");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || static_cast<Eigen::Index>(v[i].size()) != cols) {
            throw SchemaError(index_path(path, i), "expected a row of " + std::to_string(cols) + " entries");
        }
    }
}

}  // namespace

CoefficientFunction parse_matrix_function(const json& v, const std::string& path, Eigen::Index rows,
                                          Eigen::Index cols, const ParamContext& ctx) {
    if (const json* o = limit_override(v, ctx); o != nullptr && v.contains("identity")) {
        return parse_matrix_function(*o, key_path(path, "at_limit"), rows, cols, ctx);
    }
    if (v.is_object() && v.contains("identity")) {
        check_keys(v, path, {"identity", "at_limit"});
        if (rows != cols) throw SchemaError(path, "identity form needs a square matrix");
        return scalar_times_identity(parse_scalar(v["identity"], key_path(path, "identity"), ctx), rows);
    }
    if (v.is_array() && !v.empty() && v[0].is_array() && !(v.size() == 2 && v[0].is_number())) {
        check_rows(v, path, rows, cols);
        std::vector<std::vector<ScalarFunction>> entries;
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::vector<ScalarFunction> row;
            for (std::size_t j = 0; j < v[i].size(); ++j) {
                row.push_back(parse_scalar(v[i][j], index_path(index_path(path, i), j), ctx));
            }
            entries.push_back(std::move(row));
        }
        return matrix_function(entries);
    }
    if (rows != cols) {
        throw SchemaError(path, "expected a nested " + std::to_string(rows) + "x" + std::to_string(cols) + " list");
    }
    return scalar_times_identity(parse_scalar(v, path, ctx), rows);
}

Mat parse_matrix(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols,
                 const ParamContext& ctx) {
    check_rows(v, path, rows, cols);
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const auto iu = static_cast<std::size_t>(i);
            const auto ju = static_cast<std::size_t>(j);
            out(i, j) = parse_number(v[iu][ju], index_path(index_path(path, iu), ju), ctx);
        }
    }
    return out;
}

Vec parse_vector(const json& v, const std::string& path, Eigen::Index size, const ParamContext& ctx) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
        throw SchemaError(path, "expected a list of " + std::to_string(size) + " numbers");
    }
    Vec out(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out(i) = parse_number(v[static_cast<std::size_t>(i)], index_path(path, static_cast<std::size_t>(i)), ctx);
    }
    return out;
}

Density parse_density(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols,
                      const ParamContext& ctx) {
    if (v.is_object() && (v.contains("step") || v.contains("terms") || v.contains("smooth"))) {
        if (const json* o = limit_override(v, ctx)) return parse_density(*o, key_path(path, "at_limit"), rows, cols, ctx);
        check_keys(v, path, {"step", "terms", "smooth", "at_limit"});
        if (v.size() - (v.contains("at_limit") ? 1 : 0) != 1) {
            throw SchemaError(path, "expected exactly one of step, terms or smooth");
        }
        if (v.contains("smooth")) {
            return Density(SmoothDensity{parse_matrix_function(v["smooth"], key_path(path, "smooth"), rows, cols, ctx)});
        }
        if (v.contains("terms")) {
            const json& ts = v["terms"];
            const std::string tp = key_path(path, "terms");
            if (!ts.is_array()) throw SchemaError(tp, "expected a list of densities");
            Density d(rows, cols);
            for (std::size_t i = 0; i < ts.size(); ++i) d += parse_density(ts[i], index_path(tp, i), rows, cols, ctx);
            return d;
        }
        const json& s = v["step"];
        const std::string sp = key_path(path, "step");
        check_keys(s, sp, {"breakpoints", "pieces"});
        const json& bp = require(s, sp, "breakpoints");
        const json& pieces = require(s, sp, "pieces");
        const std::string bpp = key_path(sp, "breakpoints");
        const std::string pp = key_path(sp, "pieces");
        if (!bp.is_array() || !pieces.is_array() || pieces.empty() || bp.size() != pieces.size() + 1) {
            throw SchemaError(sp, "step density needs M pieces and M + 1 breakpoints");
        }
        std::vector<double> b;
        std::vector<Mat> p;
        for (std::size_t i = 0; i < bp.size(); ++i) b.push_back(parse_real(bp[i], index_path(bpp, i), ctx));
        for (std::size_t i = 0; i < pieces.size(); ++i) p.push_back(parse_matrix(pieces[i], index_path(pp, i), rows, cols, ctx));
        try {
            return Density(StepMatrixFunction(std::move(b), std::move(p)));
        } catch (const InvalidArgument& e) {
            throw SchemaError(bpp, e.what());
        }
    }
    if (v.is_null()) return Density(rows, cols);
    return Density(SmoothDensity{parse_matrix_function(v, path, rows, cols, ctx)});
}

}  // namespace gbvp::cli
