#pragma once

#include <functional>
#include <vector>

#include "gbvp/grid.hpp"

namespace gbvp {

/// Scalar analytic function with exact derivatives up to max_order.
class ScalarFunction {
public:
    using Evaluator = std::function<cplx(double t, int order)>;

    ScalarFunction(int max_order, Evaluator evaluator);

    int max_order() const { return max_order_; }
    cplx operator()(double t, int order = 0) const;

private:
    int max_order_;
    Evaluator evaluator_;
};

/// Catalog of named built-ins. Every derivative is evaluated in closed form.
namespace fn {

ScalarFunction zero();
ScalarFunction constant(cplx value);
/// sum_k coefficients[k] * (t - center)^k
ScalarFunction polynomial(std::vector<cplx> coefficients, double center = 0.0);
/// scale * exp(rate * t)
ScalarFunction exponential(cplx scale, cplx rate);
/// amplitude * sin(frequency * t + phase)
ScalarFunction sine(cplx amplitude, double frequency, double phase = 0.0);
/// amplitude * cos(frequency * t + phase)
ScalarFunction cosine(cplx amplitude, double frequency, double phase = 0.0);
/// Right-continuous step function; only order 0 is available.
ScalarFunction step(std::vector<double> breakpoints, std::vector<cplx> values);
/// amplitude * sin(1/(t - center)), set to 0 at the center; order 0 only.
ScalarFunction singular_oscillation(double center, cplx amplitude = 1.0);
/// Pointwise sum; derivatives available to the smaller max_order.
ScalarFunction sum(std::vector<ScalarFunction> terms);
/// Pointwise product via the Leibniz rule.
ScalarFunction product(ScalarFunction f, ScalarFunction g);
ScalarFunction scaled(ScalarFunction f, cplx factor);

}  // namespace fn

/// Matrix function assembled entrywise from scalar built-ins.
CoefficientFunction matrix_function(const std::vector<std::vector<ScalarFunction>>& entries);
/// Column-vector function.
CoefficientFunction vector_function(const std::vector<ScalarFunction>& entries);
/// g(t) * I_m.
CoefficientFunction scalar_times_identity(const ScalarFunction& g, Eigen::Index m);
/// g(t) * M for a constant matrix M.
CoefficientFunction scalar_times_matrix(const ScalarFunction& g, const Mat& matrix);

/// Sum of same-shape coefficient functions.
CoefficientFunction add(const CoefficientFunction& x, const CoefficientFunction& y);
CoefficientFunction scale(const CoefficientFunction& x, cplx factor);

}  // namespace gbvp
