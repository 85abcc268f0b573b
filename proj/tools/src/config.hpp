#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expressions.hpp"

#include "gbvp/approx.hpp"
#include "gbvp/limits.hpp"

namespace gbvp::cli {

inline constexpr int kSchemaVersion = 1;

/// Every verdict name a command can emit; "expect" keys must come from this list.
inline constexpr const char* kVerdictKeys[] = {
    "well_posed",   "solution_error",  "condition_zero", "condition_I",       "condition_II",
    "operator_deviation", "b_alpha",   "b_bounded",      "b_primitive",       "b_density",
    "strong",       "uniform",         "solution_trend", "consistent",        "two_sided",
    "levels_well_posed", "sup_trend",  "operator_gap_trend",
};

struct Tolerances {
    double well_posed = kWellPosedTol;
    TrendOptions trend;
    double solution_error = 1e-6;
    double two_sided_bound = 50.0;
    double rescale = 10.0;
    double b_bound_factor = 10.0;
    std::optional<double> b_cap;
};

struct FamilyConfig {
    std::vector<ParameterPoint> points;
    ParameterPoint limit;
    bool two_sided = false;
};

struct PipelineConfig {
    std::vector<ApproximationLevel> levels;
    DensityRoute route = DensityRoute::Auto;
    int test_rhs = 8;
    int regulated_window = 64;
    double regulated_tol = 1e-6;
};

struct ProblemConfig {
    std::string name;
    double a = 0.0;
    double b = 1.0;
    int m = 1;
    int r = 1;
    int n = 0;
    double p = 2.0;
    std::size_t intervals = 4096;
    std::optional<double> anchor;
    Tolerances tol;
    std::optional<FamilyConfig> family;
    std::optional<PipelineConfig> pipeline;
    std::map<std::string, bool> expect;
    json doc;

    Grid grid(std::optional<std::size_t> override_intervals = std::nullopt) const;
    /// Parameter context of the limit problem (or the only problem without a family).
    ParamContext limit_context() const;
};

/// Parses and validates; every problem the config describes is built once as a dry run.
ProblemConfig parse_config(const json& doc);
ProblemConfig load_config(const std::string& path);

BoundaryValueProblem build_problem(const ProblemConfig& cfg, const ParamContext& ctx);
/// The optional "exact_solution" block as an m x 1 function.
std::optional<CoefficientFunction> exact_solution(const ProblemConfig& cfg);
ParameterFamily make_family(const ProblemConfig& cfg, const Grid& grid);

}  // namespace gbvp::cli
