#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gbvp/types.hpp"

namespace gbvp {

/**
 * Uniform grid on [a, b] with N intervals (N + 1 nodes).
 *
 * N must be even so that composite Simpson applies on the whole interval.
 * Node i is a + i*(b - a)/N; the grid is fully described by the (a, b, N)
 * triple and serializes as such.
 */
class Grid {
public:
    Grid(double a, double b, std::size_t intervals);

    double a() const { return a_; }
    double b() const { return b_; }
    std::size_t intervals() const { return intervals_; }
    std::size_t size() const { return intervals_ + 1; }
    double step() const { return (b_ - a_) / static_cast<double>(intervals_); }
    double length() const { return b_ - a_; }

    double node(std::size_t i) const {
        return a_ + static_cast<double>(i) * (b_ - a_) / static_cast<double>(intervals_);
    }

    bool contains(double t) const;

    /// Index of the node equal to t up to rel_tol * (b - a), if any.
    std::optional<std::size_t> find_node(double t, double rel_tol = 1e-9) const;

    /// Like find_node but throws InvalidArgument when t is not a node.
    std::size_t node_index(double t, const char* what = "point") const;

    /// Same interval refined by an integer factor.
    Grid refined(std::size_t factor) const { return Grid(a_, b_, intervals_ * factor); }

    friend bool operator==(const Grid& x, const Grid& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && x.intervals_ == y.intervals_;
    }

private:
    double a_;
    double b_;
    std::size_t intervals_;
};

/**
 * Integral of equally spaced samples with spacing h.
 *
 * Composite Simpson when the interval count is even; for odd counts the last
 * three intervals use Simpson's 3/8 rule. A single interval falls back to the
 * trapezoid rule.
 */
double integrate_samples(std::span<const double> values, double h);
cplx integrate_samples(std::span<const cplx> values, double h);

/// Quadrature weights used by integrate_samples for `count` samples.
std::vector<double> quadrature_weights(std::size_t count, double h);

/**
 * Sampled matrix-valued function on a grid with a stack of derivatives.
 *
 * Stores orders 0..max_order of a rows x cols complex matrix at every node.
 * Vector-valued functions use cols == 1.
 */
class GridFunction {
public:
    GridFunction(Grid grid, Eigen::Index rows, Eigen::Index cols, int max_order);

    const Grid& grid() const { return grid_; }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    int max_order() const { return max_order_; }

    Eigen::Map<Mat> at(int order, std::size_t node) {
        return Eigen::Map<Mat>(data_.data() + offset(order, node), rows_, cols_);
    }
    Eigen::Map<const Mat> at(int order, std::size_t node) const {
        return Eigen::Map<const Mat>(data_.data() + offset(order, node), rows_, cols_);
    }
    cplx& operator()(int order, std::size_t node, Eigen::Index row, Eigen::Index col = 0) {
        return data_[offset(order, node) + static_cast<std::size_t>(col * rows_ + row)];
    }
    cplx operator()(int order, std::size_t node, Eigen::Index row, Eigen::Index col = 0) const {
        return data_[offset(order, node) + static_cast<std::size_t>(col * rows_ + row)];
    }

    /// Values of one scalar component at all nodes for a derivative order.
    std::vector<cplx> component(int order, Eigen::Index row, Eigen::Index col = 0) const;

    /// Copy keeping orders 0..order only.
    GridFunction truncated(int order) const;
    /// Copy with the order stack extended (new orders zero) or truncated.
    GridFunction resized(int max_order) const;
    /// Column `col` as a vector-valued function.
    GridFunction column(Eigen::Index col) const;

    /// First (order, node) with a NaN or Inf sample.
    std::optional<std::pair<int, std::size_t>> first_non_finite() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(cplx scale);

    friend GridFunction operator+(GridFunction x, const GridFunction& y) { return x += y; }
    friend GridFunction operator-(GridFunction x, const GridFunction& y) { return x -= y; }
    friend GridFunction operator*(cplx s, GridFunction x) { return x *= s; }

private:
    std::size_t offset(int order, std::size_t node) const {
        return (static_cast<std::size_t>(order) * grid_.size() + node) * block_;
    }
    void check_compatible(const GridFunction& other) const;

    Grid grid_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    int max_order_;
    std::size_t block_;
    std::vector<cplx> data_;
};

/// Marker for coefficient functions whose derivatives exist to every order.
inline constexpr int kAnyOrder = std::numeric_limits<int>::max();

/**
 * Analytic matrix-valued function with exact derivatives.
 *
 * The evaluator maps (t, d) to the d-th derivative at t for d <= max_order.
 */
class CoefficientFunction {
public:
    using Evaluator = std::function<Mat(double t, int order)>;

    CoefficientFunction(Eigen::Index rows, Eigen::Index cols, int max_order, Evaluator evaluator);

    static CoefficientFunction zero(Eigen::Index rows, Eigen::Index cols);
    static CoefficientFunction constant(const Mat& value);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    int max_order() const { return max_order_; }

    Mat operator()(double t, int order = 0) const;

private:
    Eigen::Index rows_;
    Eigen::Index cols_;
    int max_order_;
    Evaluator evaluator_;
};

/// Samples orders 0..up_to of coef at every grid node.
GridFunction sample(const CoefficientFunction& coef, const Grid& grid, int up_to);

/**
 * L_p norm of the order-d samples.
 *
 * Matrix and vector functions use the sum of the component norms. p = kInfinity
 * takes the maximum over nodes per component, a lower bound on the true
 * essential supremum.
 */
double lp_norm(const GridFunction& f, int order, double p);

/// Sum of lp_norm over orders 0..order.
double sobolev_norm(const GridFunction& f, int order, double p);

/// Norm of one component given as samples; shared by densities and grid functions.
double component_lp_norm(std::span<const cplx> values, double h, double p);

}  // namespace gbvp
