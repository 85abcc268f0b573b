#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gbvp/grid.hpp"

namespace gbvp {

/**
 * Linear system of m equations of order r:
 *
 *     y^(r) + A_{r-1} y^(r-1) + ... + A_0 y = f,
 *
 * with coefficients in W^n_p. `coefficients[j]` is A_j, the matrix multiplying
 * y^(j). Coefficients and rhs must provide exact derivatives up to order n.
 */
struct DifferentialSystem {
    int m = 1;
    int r = 1;
    int n = 0;
    std::vector<CoefficientFunction> coefficients;
    CoefficientFunction rhs = CoefficientFunction::zero(1, 1);

    void validate() const;
};

/// Block companion matrix K(t) of the first-order form x' + K x = g.
Mat companion(const DifferentialSystem& system, double t);

/// Matrix solutions Y_0..Y_{r-1} with Y_k^(j)(t0) = delta_kj I_m, stored to order n + r.
struct FundamentalSystem {
    double t0 = 0.0;
    std::size_t anchor = 0;
    std::vector<GridFunction> blocks;

    int order_count() const { return static_cast<int>(blocks.size()); }
    /// rm x rm matrix [Y_k^(j)(t_i)] with block row j, block column k.
    Mat wronskian(std::size_t node) const;
};

/// Right-hand side sampled at nodes (orders 0..n) and at the half-step points used by RK4.
struct ForcingSamples {
    std::vector<Vec> half_steps;
    GridFunction nodes;
};

/**
 * The operator L sampled once on a grid.
 *
 * Coefficients are evaluated at every node (with derivatives to order n, for
 * the Leibniz lifting) and at every midpoint, so repeated Cauchy solves with
 * different right-hand sides share the coefficient work.
 */
class DiscretizedSystem {
public:
    DiscretizedSystem(DifferentialSystem system, const Grid& grid);

    const DifferentialSystem& system() const { return system_; }
    const Grid& grid() const { return grid_; }
    int m() const { return system_.m; }
    int r() const { return system_.r; }
    int n() const { return system_.n; }

    ForcingSamples sample_forcing(const CoefficientFunction& f) const;
    const ForcingSamples& own_forcing() const { return forcing_; }

    /**
     * Fixed-step RK4 for x' = -K x + g from the anchor node in both directions.
     *
     * Returns the rm x k state at every node. A forcing term requires k == 1.
     */
    std::vector<Mat> propagate(const Mat& anchor_state, std::size_t anchor,
                               const ForcingSamples* forcing) const;

    /// Derivative stack 0..n+r from propagated states.
    GridFunction assemble(const std::vector<Mat>& states, const ForcingSamples* forcing) const;

    /// Completes the derivative stack to order n + r by differentiating the equation.
    GridFunction lift(const GridFunction& y, const ForcingSamples* forcing) const;

    GridFunction cauchy(std::span<const Vec> init, const ForcingSamples& forcing) const;
    FundamentalSystem fundamental(double t0) const;

    /// (L y - f)^(s) for s = 0..n; f omitted when forcing is null.
    GridFunction residual(const GridFunction& y, const ForcingSamples* forcing) const;

    /// Coefficient A_j^(order) at a node.
    Eigen::Map<const Mat> coefficient(int j, int order, std::size_t node) const {
        return coefficient_nodes_[static_cast<std::size_t>(j)].at(order, node);
    }

private:
    DifferentialSystem system_;
    Grid grid_;
    std::vector<GridFunction> coefficient_nodes_;
    std::vector<Mat> companion_half_;
    ForcingSamples forcing_;
};

enum class Forcing { Homogeneous, Inhomogeneous };

GridFunction solve_cauchy(const DifferentialSystem& system, std::span<const Vec> init,
                          const Grid& grid);

/// Fills orders (y.max_order()+1)..(n+r) of y; y must carry orders 0..r-1 at least.
GridFunction lift_derivatives(const DifferentialSystem& system, const GridFunction& y,
                              Forcing forcing = Forcing::Inhomogeneous);

/// t0 must be a grid node.
FundamentalSystem fundamental_system(const DifferentialSystem& system, double t0,
                                     const Grid& grid);

/// sum_k Y_k q_k across all stored derivative orders.
GridFunction general_solution(const FundamentalSystem& fs, std::span<const Vec> q);

/**
 * L y - f as an analytic function, for analytic y.
 *
 * Derivatives are available up to min(n, y.max_order() - r) and the
 * coefficients' own limits. Used to manufacture right-hand sides.
 */
CoefficientFunction apply_operator(const DifferentialSystem& system, const CoefficientFunction& y,
                                   Forcing forcing = Forcing::Homogeneous);

/// binom(n, k) as a double.
double binomial(int n, int k);

}  // namespace gbvp
