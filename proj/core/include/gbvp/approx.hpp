#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gbvp/bvp.hpp"

namespace gbvp {

struct ApproximationLevel {
    int k = 1;
    int poly_degree = 6;
    int partition_size = 8;
    int fejer_order = 4;
};

/// k = 1..levels with degree 2k+4, 4*2^k pieces and Fejer order 4^k.
std::vector<ApproximationLevel> default_schedule(int levels);

struct PolynomialFit {
    CoefficientFunction function;
    /// ||fit - coef||_{n,p} on the grid.
    double error = 0.0;
    int degree = 0;
};

inline constexpr double kMaxFitCondition = 1e12;

/**
 * Entrywise least squares in the discrete W^n_2 inner product.
 *
 * Uses a Legendre basis on the grid's interval; throws NumericalError when the
 * design matrix condition number exceeds kMaxFitCondition.
 */
PolynomialFit polynomial_fit(const CoefficientFunction& coef, int degree, const Grid& grid, double p,
                             int n);

/// Cesaro mean of order K of the Fourier series on [a, b] mapped to [-pi, pi]; order 0 entrywise.
GridFunction fejer_mean(const GridFunction& f, int K);

struct StepProjection {
    StepMatrixFunction step;
    /// ||step - phi||_{p'} for the exponent passed in.
    double error = 0.0;
};

/// Piece averages of phi over the partition; breakpoints must include a and b.
StepProjection step_project(const Density& phi, const std::vector<double>& partition, const Grid& grid,
                            double q = 2.0);
/// Piece averages of node samples; breakpoints must be grid nodes.
StepProjection step_project(const GridFunction& phi, const std::vector<double>& partition,
                            double q = 2.0);

/// a + (b - a) j / M for j = 0..M.
std::vector<double> uniform_partition(const Grid& grid, int pieces);

/// How the density is reduced to a step function.
enum class DensityRoute {
    /// Fejer smoothing before projection when p = 1, direct projection otherwise.
    Auto,
    Fejer,
    Direct,
};

struct ApproximantOptions {
    DensityRoute route = DensityRoute::Auto;
    std::optional<double> t0;
    double tol = kWellPosedTol;
};

struct Approximant {
    ApproximationLevel level;
    BoundaryValueProblem bvp;
    WellPosednessVerdict verdict;
    /// sum_j ||A_j,k - A_j,0||_{n,p}
    double coefficient_error = 0.0;
    /// ||f_k - f_0||_{n,p}
    double rhs_error = 0.0;
    /// ||Phi_k - Phi_0||_{p'} for p > 1, sup of the primitive difference for p = 1.
    double density_error = 0.0;
    /// coefficient_error + ||Phi_k - Phi_0||_{p'}: bounds the operator-norm distance.
    double operator_gap = 0.0;
};

/**
 * Multipoint problem with polynomial coefficients approximating a canonical bvp0.
 *
 * The alphas and c are kept; the density is replaced by a step function and
 * converted to point masses.
 */
Approximant build_approximant(const BoundaryValueProblem& bvp0, const ApproximationLevel& level, double p,
                              const Grid& grid, const ApproximantOptions& options = {});

struct PipelineRow {
    ApproximationLevel level;
    bool well_posed = false;
    double sigma_min = 0.0;
    double coefficient_error = 0.0;
    double density_error = 0.0;
    double operator_gap = 0.0;
    /// ||y_k - y_0||_{n+r,p} for the problem's own data.
    double solution_error = 0.0;
    /// max over test right-hand sides of ||y_k - y_0|| / (||f||_{n,p} + |c|).
    double sup_deviation = 0.0;
    std::vector<double> rhs_deviation;
};

struct PipelineReport {
    double p = 2.0;
    double sigma_min_0 = 0.0;
    std::uint64_t seed = 0;
    std::vector<PipelineRow> rows;
};

PipelineReport pipeline_report(const BoundaryValueProblem& bvp0, const std::vector<ApproximationLevel>& levels,
                               double p, int test_rhs_count, const Grid& grid, std::uint64_t seed = 1,
                               const ApproximantOptions& options = {});

/**
 * Heuristic check for finite one-sided limits of scalar node samples.
 *
 * A side of a node settles when the oscillation over window/4 nodes is at most
 * max(tol, half the oscillation over `window` nodes). Returns false when some
 * node settles on neither side.
 */
bool is_regulated(const GridFunction& phi, std::size_t window = 64, double tol = 1e-6);

}  // namespace gbvp
