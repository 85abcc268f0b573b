#include <gtest/gtest.h>

#include "gbvp/approx.hpp"
#include "gbvp/functions.hpp"
#include "oracles.hpp"

using namespace gbvp;

namespace {

Mat column(std::initializer_list<cplx> v) {
    Mat m(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (cplx x : v) m(i++, 0) = x;
    return m;
}

/// y'' + e^t y' + y = e^t, y(0) = 1, y'(0) + int phi y'' = 0.
BoundaryValueProblem pipeline_problem(Density phi) {
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {CoefficientFunction::constant(Mat::Identity(1, 1)),
                      scalar_times_identity(fn::exponential(1.0, 1.0), 1)};
    s.rhs = vector_function({fn::exponential(1.0, 1.0)});
    CanonicalBoundaryOperator B;
    B.t0 = 0.0;
    B.alphas = {column({1.0, 0.0}), column({0.0, 1.0})};
    B.phi = std::move(phi);
    Vec c(2);
    c << 1.0, 0.0;
    return {s, B, c};
}

}  // namespace

TEST(Schedule, Defaults) {
    const auto s = default_schedule(3);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].poly_degree, 6);
    EXPECT_EQ(s[0].partition_size, 8);
    EXPECT_EQ(s[0].fejer_order, 4);
    EXPECT_EQ(s[2].poly_degree, 10);
    EXPECT_EQ(s[2].partition_size, 32);
    EXPECT_EQ(s[2].fejer_order, 64);
}

TEST(PolynomialFit, ExactOnPolynomials) {
    const Grid g(0.0, 2.0, 256);
    const auto p = vector_function({fn::polynomial({1.0, -2.0, 0.5, 0.25})});
    const auto fit = polynomial_fit(p, 3, g, 2.0, 1);
    EXPECT_LT(fit.error, 1e-10);
    EXPECT_NEAR(std::abs(fit.function(1.3)(0, 0) - p(1.3)(0, 0)), 0.0, 1e-10);
}

TEST(PolynomialFit, ErrorDecreasesWithDegree) {
    const Grid g(0.0, 1.0, 512);
    const auto e = scalar_times_identity(fn::exponential(1.0, 2.0), 2);
    double prev = INFINITY;
    for (int d : {2, 4, 6, 8}) {
        const auto fit = polynomial_fit(e, d, g, 2.0, 0);
        EXPECT_LT(fit.error, prev);
        prev = fit.error;
    }
    EXPECT_LT(prev, 1e-5);
}

TEST(Fejer, PreservesConstantsAndMean) {
    const Grid g(0.0, 1.0, 512);
    const auto one = sample(vector_function({fn::constant(2.0)}), g, 0);
    const auto s = fejer_mean(one, 16);
    for (std::size_t i = 0; i < g.size(); i += 50) EXPECT_NEAR(std::abs(s(0, i, 0) - 2.0), 0.0, 1e-12);
    const auto step = sample(vector_function({fn::step({0.0, 0.5, 1.0}, {1.0, -1.0})}), g, 0);
    const auto w = quadrature_weights(g.size(), g.step());
    cplx m0{}, m1{};
    const auto sm = fejer_mean(step, 64);
    for (std::size_t i = 0; i < g.size(); ++i) {
        m0 += w[i] * step(0, i, 0);
        m1 += w[i] * sm(0, i, 0);
    }
    EXPECT_NEAR(std::abs(m0 - m1), 0.0, 1e-12);
    EXPECT_THROW(fejer_mean(one, 0), InvalidArgument);
}

TEST(StepProjection, ExactOnRefinedPartition) {
    const Grid g(0.0, 1.0, 256);
    const Density phi(StepMatrixFunction({0.0, 0.25, 1.0}, {column({1.0}), column({-2.0})}));
    const auto proj = step_project(phi, uniform_partition(g, 8), g, 2.0);
    EXPECT_LT(proj.error, 1e-12);
    const auto coarse = step_project(phi, uniform_partition(g, 2), g, 2.0);
    EXPECT_GT(coarse.error, 0.1);
}

TEST(StepProjection, ConvergesForSmoothDensity) {
    const Grid g(0.0, 1.0, 1024);
    const Density phi(SmoothDensity{scalar_times_identity(fn::cosine(1.0, std::numbers::pi), 1)});
    double prev = INFINITY;
    for (int pieces : {4, 8, 16, 32}) {
        const auto proj = step_project(phi, uniform_partition(g, pieces), g, 2.0);
        EXPECT_LT(proj.error, 0.6 * prev);
        prev = proj.error;
    }
}

TEST(UniformPartition, Endpoints) {
    const Grid g(-1.0, 3.0, 64);
    const auto p = uniform_partition(g, 8);
    ASSERT_EQ(p.size(), 9u);
    EXPECT_DOUBLE_EQ(p.front(), -1.0);
    EXPECT_DOUBLE_EQ(p.back(), 3.0);
    EXPECT_DOUBLE_EQ(p[2], 0.0);
}

TEST(Approximant, IsMultipointWithPolynomialCoefficients) {
    const Grid g(0.0, 1.0, 1024);
    const auto bvp0 = pipeline_problem(Density(SmoothDensity{
        matrix_function({{fn::zero()}, {fn::cosine(1.0, std::numbers::pi)}})}));
    const auto ap = build_approximant(bvp0, default_schedule(2)[1], 2.0, g);
    EXPECT_TRUE(std::holds_alternative<MultipointBoundaryOperator>(ap.bvp.boundary));
    EXPECT_TRUE(ap.verdict.well_posed);
    EXPECT_LT(ap.coefficient_error, 1e-8);
    EXPECT_GE(ap.operator_gap, ap.density_error);
}

TEST(Pipeline, SmoothProblemConverges) {
    const Grid g(0.0, 1.0, 1024);
    const auto bvp0 = pipeline_problem(Density(SmoothDensity{
        matrix_function({{fn::zero()}, {fn::cosine(1.0, std::numbers::pi)}})}));
    const auto rep = pipeline_report(bvp0, default_schedule(4), 2.0, 4, g, 3);
    ASSERT_EQ(rep.rows.size(), 4u);
    for (const auto& r : rep.rows) EXPECT_TRUE(r.well_posed);
    EXPECT_LE(rep.rows.back().sup_deviation, 0.1 * rep.rows.front().sup_deviation);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        EXPECT_LT(rep.rows[i].solution_error, rep.rows[i - 1].solution_error);
        EXPECT_EQ(rep.rows[i].rhs_deviation.size(), 4u);
    }
}

TEST(Regulated, StepVersusOscillation) {
    const Grid g(0.0, 1.0, 4096);
    const auto step = sample(vector_function({fn::step({0.0, 0.25, 0.75, 1.0}, {1.0, -0.5, 2.0})}), g, 0);
    const auto smooth = sample(vector_function({fn::cosine(1.0, 3.0)}), g, 0);
    const auto osc = sample(vector_function({fn::singular_oscillation(0.5)}), g, 0);
    EXPECT_TRUE(is_regulated(step));
    EXPECT_TRUE(is_regulated(smooth));
    EXPECT_FALSE(is_regulated(osc));
}
