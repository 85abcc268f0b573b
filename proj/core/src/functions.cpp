#include "gbvp/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gbvp {

ScalarFunction::ScalarFunction(int max_order, Evaluator evaluator)
    : max_order_(max_order), evaluator_(std::move(evaluator)) {
    if (max_order < 0) throw InvalidArgument("scalar function max_order must be >= 0");
    if (!evaluator_) throw InvalidArgument("scalar function evaluator is empty");
}

cplx ScalarFunction::operator()(double t, int order) const {
    if (order < 0 || order > max_order_) {
        throw InvalidArgument("derivative order exceeds scalar function max_order");
    }
    return evaluator_(t, order);
}

namespace fn {

ScalarFunction zero() {
    return ScalarFunction(kAnyOrder, [](double, int) { return cplx{}; });
}

ScalarFunction constant(cplx value) {
    return ScalarFunction(kAnyOrder, [value](double, int order) {
        return order == 0 ? value : cplx{};
    });
}

ScalarFunction polynomial(std::vector<cplx> coefficients, double center) {
    return ScalarFunction(kAnyOrder, [c = std::move(coefficients), center](double t, int order) {
        const int degree = static_cast<int>(c.size()) - 1;
        if (order > degree) return cplx{};
        // Horner on the order-th derivative coefficients.
        const double x = t - center;
        cplx acc{};
        for (int k = degree; k >= order; --k) {
            double falling = 1.0;
            for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
            acc = acc * x + c[static_cast<std::size_t>(k)] * falling;
        }
        return acc;
    });
}

ScalarFunction exponential(cplx scale, cplx rate) {
    return ScalarFunction(kAnyOrder, [scale, rate](double t, int order) {
        cplx factor = scale;
        for (int k = 0; k < order; ++k) factor *= rate;
        return factor * std::exp(rate * t);
    });
}

namespace {

ScalarFunction shifted_sine(cplx amplitude, double frequency, double phase) {
    return ScalarFunction(kAnyOrder, [amplitude, frequency, phase](double t, int order) {
        const double shift = static_cast<double>(order) * std::numbers::pi / 2.0;
        return amplitude * std::pow(frequency, order) * std::sin(frequency * t + phase + shift);
    });
}

}  // namespace

ScalarFunction sine(cplx amplitude, double frequency, double phase) {
    return shifted_sine(amplitude, frequency, phase);
}

ScalarFunction cosine(cplx amplitude, double frequency, double phase) {
    return shifted_sine(amplitude, frequency, phase + std::numbers::pi / 2.0);
}

ScalarFunction step(std::vector<double> breakpoints, std::vector<cplx> values) {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size()) {
        throw InvalidArgument("step function needs M+1 breakpoints and M values");
    }
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
        std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end()) {
        throw InvalidArgument("step breakpoints must be strictly increasing");
    }
    return ScalarFunction(0, [bp = std::move(breakpoints), v = std::move(values)](double t, int) {
        if (t < bp.front() || t > bp.back()) return cplx{};
        auto it = std::upper_bound(bp.begin(), bp.end(), t);
        auto piece = static_cast<std::size_t>(std::distance(bp.begin(), it)) - 1;
        piece = std::min(piece, v.size() - 1);
        return v[piece];
    });
}

ScalarFunction singular_oscillation(double center, cplx amplitude) {
    return ScalarFunction(0, [center, amplitude](double t, int) {
        if (t == center) return cplx{};
        return amplitude * std::sin(1.0 / (t - center));
    });
}

ScalarFunction sum(std::vector<ScalarFunction> terms) {
    int order = kAnyOrder;
    for (const auto& f : terms) order = std::min(order, f.max_order());
    return ScalarFunction(order, [ts = std::move(terms)](double t, int d) {
        cplx acc{};
        for (const auto& f : ts) acc += f(t, d);
        return acc;
    });
}

ScalarFunction product(ScalarFunction f, ScalarFunction g) {
    const int order = std::min(f.max_order(), g.max_order());
    return ScalarFunction(order, [f = std::move(f), g = std::move(g)](double t, int d) {
        cplx acc{};
        double binom = 1.0;
        for (int i = 0; i <= d; ++i) {
            acc += binom * f(t, i) * g(t, d - i);
            binom = binom * static_cast<double>(d - i) / static_cast<double>(i + 1);
        }
        return acc;
    });
}

ScalarFunction scaled(ScalarFunction f, cplx factor) {
    const int order = f.max_order();
    return ScalarFunction(order, [f = std::move(f), factor](double t, int d) {
        return factor * f(t, d);
    });
}

}  // namespace fn

CoefficientFunction matrix_function(const std::vector<std::vector<ScalarFunction>>& entries) {
    if (entries.empty() || entries.front().empty()) {
        throw InvalidArgument("matrix function needs at least one entry");
    }
    const auto rows = static_cast<Eigen::Index>(entries.size());
    const auto cols = static_cast<Eigen::Index>(entries.front().size());
    int order = kAnyOrder;
    for (const auto& row : entries) {
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw InvalidArgument("matrix function rows have different lengths");
        }
        for (const auto& f : row) order = std::min(order, f.max_order());
    }
    return CoefficientFunction(rows, cols, order, [entries, rows, cols](double t, int d) {
        Mat out(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                out(i, j) = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](t, d);
            }
        }
        return out;
    });
}

CoefficientFunction vector_function(const std::vector<ScalarFunction>& entries) {
    std::vector<std::vector<ScalarFunction>> rows;
    rows.reserve(entries.size());
    for (const auto& e : entries) rows.push_back({e});
    return matrix_function(rows);
}

CoefficientFunction scalar_times_identity(const ScalarFunction& g, Eigen::Index m) {
    return scalar_times_matrix(g, Mat::Identity(m, m));
}

CoefficientFunction scalar_times_matrix(const ScalarFunction& g, const Mat& matrix) {
    const Mat mtx = matrix;
    return CoefficientFunction(mtx.rows(), mtx.cols(), g.max_order(),
                               [g, mtx](double t, int d) { return (g(t, d) * mtx).eval(); });
}

CoefficientFunction add(const CoefficientFunction& x, const CoefficientFunction& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw InvalidArgument("cannot add coefficient functions of different shapes");
    }
    return CoefficientFunction(x.rows(), x.cols(), std::min(x.max_order(), y.max_order()),
                               [x, y](double t, int d) { return (x(t, d) + y(t, d)).eval(); });
}

CoefficientFunction scale(const CoefficientFunction& x, cplx factor) {
    return CoefficientFunction(x.rows(), x.cols(), x.max_order(),
                               [x, factor](double t, int d) { return (factor * x(t, d)).eval(); });
}

}  // namespace gbvp
