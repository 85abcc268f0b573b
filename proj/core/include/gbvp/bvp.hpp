#pragma once

#include <memory>
#include <optional>

#include "gbvp/boundary.hpp"
#include "gbvp/ode.hpp"

namespace gbvp {

/// L y = f, B y = c with l = r*m boundary rows.
struct BoundaryValueProblem {
    DifferentialSystem system;
    BoundaryOperator boundary;
    Vec c;

    void validate() const;
};

inline constexpr double kWellPosedTol = 1e-8;

struct WellPosednessVerdict {
    Mat char_matrix;
    cplx det;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double tol = kWellPosedTol;
    bool well_posed = false;
    /// sigma_min within 10x of the threshold.
    bool ill_conditioned = false;
};

/// [B Y_0, ..., B Y_{r-1}] for an already computed fundamental system.
Mat characteristic_matrix(const BoundaryOperator& boundary, const FundamentalSystem& fs);
Mat characteristic_matrix(const DifferentialSystem& system, const BoundaryOperator& boundary,
                          double t0, const Grid& grid);

/// Well posed iff sigma_min > tol * max(sigma_max, 1).
WellPosednessVerdict well_posedness(const Mat& M, double tol = kWellPosedTol);

/**
 * Fundamental-matrix solver for one operator pair (L, B) on a grid.
 *
 * Construction integrates the fundamental system once and factors the
 * characteristic matrix; solve() can then be called for many (f, c) pairs.
 */
class BvpSolver {
public:
    BvpSolver(const BoundaryValueProblem& bvp, const Grid& grid, std::optional<double> t0 = std::nullopt,
              double tol = kWellPosedTol);

    const WellPosednessVerdict& verdict() const { return verdict_; }
    const DiscretizedSystem& discretized() const { return *system_; }
    const FundamentalSystem& fundamental() const { return fs_; }
    const BoundaryValueProblem& problem() const { return bvp_; }

    /// Solution for the problem's own f and c.
    GridFunction solve() const;
    /// Solution of L y = f, B y = c for another right-hand side pair.
    GridFunction solve(const ForcingSamples& f, const Vec& c) const;
    GridFunction solve(const CoefficientFunction& f, const Vec& c) const;

private:
    BoundaryValueProblem bvp_;
    std::shared_ptr<const DiscretizedSystem> system_;
    FundamentalSystem fs_;
    WellPosednessVerdict verdict_;
    Eigen::ColPivHouseholderQR<Mat> factor_;
};

/// Throws NumericalError when the problem is not well posed.
GridFunction solve(const BoundaryValueProblem& bvp, double t0, const Grid& grid);

/// ||L y - f||_{n,p} + |B y - c|_2 for a candidate with orders 0..n+r.
double discrepancy(const BoundaryValueProblem& bvp, const GridFunction& y, double p);
/// Same, reusing a discretization of the problem's operator.
double discrepancy(const DiscretizedSystem& system, const ForcingSamples& f,
                   const BoundaryOperator& boundary, const Vec& c, const GridFunction& y, double p);

}  // namespace gbvp
