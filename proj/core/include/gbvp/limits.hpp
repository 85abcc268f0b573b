#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gbvp/bvp.hpp"

namespace gbvp {

struct ParameterPoint {
    double mu = 0.0;
    double distance = 0.0;
    std::string label;
};

/**
 * Finite sample of a metric parameter space around a limit point mu0.
 *
 * `points` holds the sweep (distance > 0, strictly decreasing); `limit` has
 * distance 0. `build` returns the problem at a point; every problem must live
 * on `grid` with the same m, r, n.
 */
struct ParameterFamily {
    std::vector<ParameterPoint> points;
    ParameterPoint limit;
    std::function<BoundaryValueProblem(const ParameterPoint&)> build;
    Grid grid{0.0, 1.0, 4096};
    std::optional<double> t0;
    double tol = kWellPosedTol;

    void validate() const;
};

/// mu_j = mu0 + 2^-j for j = first..last, distance 2^-j.
std::vector<ParameterPoint> dyadic_points(double mu0, int first, int last);
/// mu_k = 1/k for k = first..last, distance 1/k, limit mu0 = 0 (the point at infinity).
std::vector<ParameterPoint> harmonic_points(int first, int last);

/// f(mu) and c(mu) multiplied by factor at every point.
ParameterFamily rescaled(const ParameterFamily& family, cplx factor);

struct TrendOptions {
    double decay = 0.1;
    int tail = 3;
    /// Values at or below this count as already converged.
    double floor = 1e-10;
};

struct TrendVerdict {
    bool pass = false;
    std::string reason;
};

/**
 * Evidence that a sequence ordered by decreasing distance tends to zero.
 *
 * Passes when the last value is at most `floor`, or when it is at most
 * decay * first and the last `tail` values are strictly decreasing.
 */
TrendVerdict trend_to_zero(const std::vector<double>& values, const TrendOptions& options = {});

struct ConditionReport {
    std::vector<double> distances;
    std::vector<double> deviations;
    TrendVerdict verdict;
};

/// m x m matrix test functions sampled with orders 0..n+r.
struct TestSet {
    std::vector<GridFunction> functions;
    std::vector<std::string> names;
};

/// t^s I_m for s <= top + 2 plus `random_count` seeded trigonometric g(t) I_m.
TestSet make_test_set(const Grid& grid, Eigen::Index m, int top, std::uint64_t seed,
                      int random_count = 10);

WellPosednessVerdict check_condition_zero(const ParameterFamily& family);

/// sum_j ||A_j(mu) - A_j(mu0)||_{n,p} per sweep point.
ConditionReport check_condition_I(const ParameterFamily& family, double p,
                                  const TrendOptions& options = {});

/// max over the test set of the largest column |B(mu)Y - B(mu0)Y|_2.
ConditionReport check_condition_II(const ParameterFamily& family, const TestSet& tests,
                                   const TrendOptions& options = {});

/// sup over the test set of ||(L(mu) - L(mu0))Y||_{n,p} / ||Y||_{n+r,p}.
ConditionReport operator_deviation_L(const ParameterFamily& family, const TestSet& tests, double p,
                                     const TrendOptions& options = {});

enum class ConvergenceMode { Strong, Uniform };

struct BConvergenceOptions {
    TrendOptions trend;
    /// Bound for (b) as a multiple of max(||Phi(mu0)||, ||Phi(first)||).
    double bound_factor = 10.0;
    std::optional<double> cap;
};

struct BConvergenceReport {
    std::vector<double> distances;
    std::vector<double> alpha_deviation;
    std::vector<double> phi_norm;
    double phi_norm_limit = 0.0;
    double phi_bound = 0.0;
    std::vector<double> primitive_deviation;
    std::vector<double> density_deviation;
    TrendVerdict a;
    bool b = false;
    TrendVerdict c;
    TrendVerdict d;

    bool strong() const { return a.pass && b && c.pass; }
    bool uniform() const { return a.pass && d.pass; }
    bool passes(ConvergenceMode mode) const { return mode == ConvergenceMode::Strong ? strong() : uniform(); }
};

/// Conditions (a)-(d) for canonical boundary operators; p must be finite.
BConvergenceReport check_B_convergence(const ParameterFamily& family, double p,
                                       const BConvergenceOptions& options = {});

struct ConvergenceRow {
    std::string label;
    double mu = 0.0;
    double distance = 0.0;
    bool well_posed = false;
    double sigma_min = 0.0;
    double coefficient_deviation = 0.0;
    double boundary_deviation = 0.0;
    double solution_deviation = 0.0;
    double discrepancy = 0.0;
    /// solution_deviation / discrepancy; empty when the discrepancy is below 1e-14.
    std::optional<double> ratio;
    std::string error;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    WellPosednessVerdict condition_zero;
    ConditionReport condition_I;
    ConditionReport condition_II;
    TrendVerdict solution_trend;
    bool conditions_pass = false;
    /// Conditions and solution trend agree (both pass or both fail).
    bool consistent = false;
    /// Smallest and largest distance with a well-posed instance.
    std::optional<std::pair<double, double>> well_posed_range;
    std::uint64_t seed = 0;
};

ConvergenceReport continuity_experiment(const ParameterFamily& family, double p,
                                        std::uint64_t seed = 1, const TrendOptions& options = {});

struct TwoSidedBoundReport {
    std::vector<ConvergenceRow> rows;
    std::vector<double> ratios;
    double gamma_lower = 0.0;
    double gamma_upper = 0.0;
    double spread = 0.0;
    double bound = 50.0;
    std::vector<double> rescaled_ratios;
    double rescale_factor = 10.0;
    double rescale_change = 0.0;
    bool pass = false;
};

/// rho(mu) = ||y(mu0) - y(mu)||_{n+r,p} / d(mu); also rerun with f, c scaled by rescale_factor.
TwoSidedBoundReport two_sided_bound_experiment(const ParameterFamily& family, double p,
                                               double bound = 50.0, double rescale_factor = 10.0);

}  // namespace gbvp
