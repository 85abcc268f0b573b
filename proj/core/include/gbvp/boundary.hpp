#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "gbvp/grid.hpp"

namespace gbvp {

/// Which one-sided limit to take at a discontinuity.
enum class Side { Left, Right };

/**
 * Piecewise-constant l x m matrix function.
 *
 * pieces[j] is the value on [breakpoints[j], breakpoints[j+1]). The function
 * is extended by zero outside [breakpoints.front(), breakpoints.back()].
 */
class StepMatrixFunction {
public:
    StepMatrixFunction(std::vector<double> breakpoints, std::vector<Mat> pieces);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Mat>& pieces() const { return pieces_; }
    Eigen::Index rows() const { return pieces_.front().rows(); }
    Eigen::Index cols() const { return pieces_.front().cols(); }

    Mat value(double t, Side side = Side::Right) const;
    /// Phi(tau_j+) - Phi(tau_j-) at breakpoint j, with the zero extension.
    Mat jump(std::size_t j) const;
    StepMatrixFunction scaled(cplx factor) const;

private:
    std::vector<double> breakpoints_;
    std::vector<Mat> pieces_;
};

/// Density given by an analytic function; assumed continuous on [a, b].
struct SmoothDensity {
    CoefficientFunction function;
};

/// Density given by node samples; linear between nodes.
struct SampledDensity {
    GridFunction samples;
};

/**
 * Taylor-remainder kernel of a point condition coef * y^(s)(tau).
 *
 * With q = top - 1 - s the kernel is sign * coef * (tau - t)^q / q! between t0
 * and tau (sign -1 when tau < t0). Against y^(top) it integrates to
 * coef * (y^(s)(tau) - Taylor polynomial of y^(s) at t0 evaluated at tau).
 */
struct TaylorKernel {
    double t0 = 0.0;
    double tau = 0.0;
    int s = 0;
    int top = 1;
    Mat coef;
};

using DensityTerm = std::variant<SmoothDensity, SampledDensity, StepMatrixFunction, TaylorKernel>;

/**
 * The density Phi of a canonical boundary operator, kept as a sum of terms.
 *
 * Step and kernel terms are integrated against y^(top) exactly through
 * y^(top-1) or the Taylor identity. Norms and primitives split the interval
 * at every breakpoint and use one-sided values there.
 */
class Density {
public:
    Density(Eigen::Index rows, Eigen::Index cols);
    explicit Density(DensityTerm term);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    const std::vector<DensityTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add(DensityTerm term);
    Density& operator+=(const Density& other);
    Density scaled(cplx factor) const;
    friend Density operator+(Density x, const Density& y) { return x += y; }
    friend Density operator-(Density x, const Density& y) { return x += y.scaled(-1.0); }

    Mat value(double t, Side side = Side::Right) const;
    /// Sorted distinct points where some term may jump.
    std::vector<double> breakpoints() const;

    /// Integral of Phi * y^(top) over y's grid; y may have several columns.
    Mat integrate_against(const GridFunction& y, int top) const;

    /// Sum of component L_p norms on [a, b]; `intervals` sets the resolution.
    double lp_norm(double a, double b, std::size_t intervals, double p) const;
    double lp_norm(const Grid& grid, double p) const {
        return lp_norm(grid.a(), grid.b(), grid.intervals(), p);
    }

    /// Integral of Phi over [u, v] (u <= v) using about `intervals` Simpson panels.
    Mat integral(double u, double v, std::size_t intervals) const;
    /// Primitive int_a^t Phi at every node of the grid.
    std::vector<Mat> primitive(const Grid& grid) const;

    /// Node samples, right limits except at b.
    GridFunction sample(const Grid& grid) const;

    /// The density as a single step function when every term is a step.
    std::optional<StepMatrixFunction> as_step() const;

private:
    void check_shape(Eigen::Index rows, Eigen::Index cols) const;
    template <class F>
    void for_each_panel(double u, double v, std::size_t intervals, F&& visit) const;

    Eigen::Index rows_;
    Eigen::Index cols_;
    std::vector<DensityTerm> terms_;
};

/// B y = sum_s alpha_s y^(s)(t0) + int Phi y^(n+r), with n + r = alphas.size().
struct CanonicalBoundaryOperator {
    double t0 = 0.0;
    std::vector<Mat> alphas;
    Density phi{1, 1};

    int top() const { return static_cast<int>(alphas.size()); }
    Eigen::Index rows() const { return phi.rows(); }
    Eigen::Index cols() const { return phi.cols(); }
    void validate() const;
};

/// B y = sum_s alpha_s y^(s)(t0) + sum_j beta_j y^(n+r-1)(t_j).
struct MultipointBoundaryOperator {
    double t0 = 0.0;
    std::vector<Mat> alphas;
    std::vector<double> points;
    std::vector<Mat> betas;

    int top() const { return static_cast<int>(alphas.size()); }
    Eigen::Index rows() const { return alphas.front().rows(); }
    Eigen::Index cols() const { return alphas.front().cols(); }
    void validate() const;
};

using BoundaryOperator = std::variant<CanonicalBoundaryOperator, MultipointBoundaryOperator>;

/// Acts columnwise: y is m x k with orders 0..n+r, the result is l x k.
Mat apply_canonical(const CanonicalBoundaryOperator& B, const GridFunction& y);
Mat apply_multipoint(const MultipointBoundaryOperator& B, const GridFunction& y);
Mat apply_boundary(const BoundaryOperator& B, const GridFunction& y);

int boundary_top(const BoundaryOperator& B);
Eigen::Index boundary_rows(const BoundaryOperator& B);
Eigen::Index boundary_cols(const BoundaryOperator& B);

/// Integration by parts of a step density; beta_j = -jump at each breakpoint, zero jumps dropped.
MultipointBoundaryOperator to_multipoint(std::vector<Mat> alphas, const StepMatrixFunction& phi,
                                         double t0);
/// Requires every density term to be a step function.
MultipointBoundaryOperator to_multipoint(const CanonicalBoundaryOperator& B);

/// gamma * max_s |alpha_s|_inf + ||Phi||_{p'} on the grid's interval.
double norm_bound(const CanonicalBoundaryOperator& B, double gamma, double p, const Grid& grid);

/**
 * Empirical constant gamma with sum_{s<top} max_t |y^(s)(t)|_inf <= gamma ||y||_{top,p}.
 *
 * Maximizes the ratio over monomials, sines and cosines of several frequencies
 * and seeded random combinations of them.
 */
double calibrate_embedding_constant(int top, const Grid& grid, double p, std::uint64_t seed = 7);

using BoundaryFunctional = std::function<Mat(const GridFunction&)>;

/// alpha_s = B applied to (t - t0)^s / s! * I_m, for s = 0..top-1.
std::vector<Mat> extract_alphas(const BoundaryFunctional& B, double t0, int top, Eigen::Index m,
                                const Grid& grid);

/// The term coef * y^(order)(tau) of a boundary row block.
struct PointCondition {
    double tau = 0.0;
    int order = 0;
    Mat coef;
};

/**
 * Canonical form of B y = sum_i coef_i y^(order_i)(tau_i) + int Phi y^(top).
 *
 * Each point condition contributes its Taylor coefficients at t0 to the alphas
 * and a TaylorKernel term to the density. Requires order < top.
 */
CanonicalBoundaryOperator canonicalize_points(const std::vector<PointCondition>& conditions,
                                              double t0, int top, Eigen::Index rows,
                                              Eigen::Index cols,
                                              std::optional<Density> extra_density = std::nullopt);

}  // namespace gbvp
