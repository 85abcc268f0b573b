#pragma once

#include <initializer_list>
#include <string>

#include "json.hpp"

#include "gbvp/boundary.hpp"
#include "gbvp/functions.hpp"

namespace gbvp::cli {

using json = nlohmann::json;

/// Config does not match the schema; `path` locates the offending field.
class SchemaError : public InvalidArgument {
public:
    SchemaError(std::string path, const std::string& message)
        : InvalidArgument(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Parameter value used to evaluate affine / reciprocal numbers and at_limit overrides.
struct ParamContext {
    double mu = 0.0;
    bool at_limit = true;
};

std::string index_path(const std::string& path, std::size_t i);
std::string key_path(const std::string& path, const std::string& key);

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed);
const json& require(const json& obj, const std::string& path, const char* key);

/// number | [re, im] | {"affine": [c0, c1]} | {"reciprocal": [c0, c1]}, optional "at_limit".
cplx parse_number(const json& v, const std::string& path, const ParamContext& ctx);
double parse_real(const json& v, const std::string& path, const ParamContext& ctx);
int parse_int(const json& v, const std::string& path, int min_value);
double parse_exponent(const json& v, const std::string& path);

/// Named built-in: zero, constant, polynomial, exp, sin, cos, step, oscillation, sum, product.
ScalarFunction parse_scalar(const json& v, const std::string& path, const ParamContext& ctx);

/// Nested row-major list of scalar expressions, {"identity": expr}, or a scalar times I (square only).
CoefficientFunction parse_matrix_function(const json& v, const std::string& path, Eigen::Index rows,
                                          Eigen::Index cols, const ParamContext& ctx);

/// Nested row-major list of numbers.
Mat parse_matrix(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols,
                 const ParamContext& ctx);
Vec parse_vector(const json& v, const std::string& path, Eigen::Index size, const ParamContext& ctx);

/// Matrix expression (smooth), {"step": {...}}, {"terms": [...]}, optional "at_limit".
Density parse_density(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols,
                      const ParamContext& ctx);

}  // namespace gbvp::cli
