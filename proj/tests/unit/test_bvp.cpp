#include <gtest/gtest.h>

#include <random>

#include "gbvp/bvp.hpp"
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

BoundaryOperator dirichlet(double a, double b) {
    return canonicalize_points({{a, 0, column({1.0, 0.0})}, {b, 0, column({0.0, 1.0})}}, a, 2, 2, 1);
}

BoundaryValueProblem dirichlet_sine() {
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {CoefficientFunction::zero(1, 1), CoefficientFunction::zero(1, 1)};
    s.rhs = vector_function({fn::sine(-std::numbers::pi * std::numbers::pi, std::numbers::pi)});
    return {s, dirichlet(0.0, 1.0), Vec::Zero(2)};
}

BoundaryValueProblem periodic() {
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {CoefficientFunction::constant(Mat::Identity(1, 1)), CoefficientFunction::zero(1, 1)};
    s.rhs = CoefficientFunction::zero(1, 1);
    const double T = 2.0 * std::numbers::pi;
    auto B = canonicalize_points({{0.0, 0, column({1.0, 0.0})},
                                  {T, 0, column({-1.0, 0.0})},
                                  {0.0, 1, column({0.0, 1.0})},
                                  {T, 1, column({0.0, -1.0})}},
                                 0.0, 2, 2, 1);
    return {s, B, Vec::Zero(2)};
}

}  // namespace

TEST(Bvp, ManufacturedDirichletSine) {
    const Grid g(0.0, 1.0, 4096);
    const auto bvp = dirichlet_sine();
    const BvpSolver solver(bvp, g);
    ASSERT_TRUE(solver.verdict().well_posed);
    const auto y = solver.solve();
    const auto exact = sample(vector_function({fn::sine(1.0, std::numbers::pi)}), g, 2);
    EXPECT_LT(sobolev_norm(y - exact, 2, 2.0), 1e-6);
    EXPECT_LT(discrepancy(bvp, y, 2.0), 1e-8);
}

TEST(Bvp, DirichletCharacteristicMatrix) {
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {CoefficientFunction::zero(1, 1), CoefficientFunction::zero(1, 1)};
    s.rhs = CoefficientFunction::zero(1, 1);
    const Grid g(0.0, 1.0, 64);
    const Mat M = characteristic_matrix(s, dirichlet(0.0, 1.0), 0.0, g);
    Mat expected(2, 2);
    expected << 1.0, 0.0, 1.0, 1.0;
    EXPECT_LT((M - expected).norm(), 1e-12);
    const auto v = well_posedness(M);
    EXPECT_TRUE(v.well_posed);
    EXPECT_GE(v.sigma_min, 0.1);
    EXPECT_NEAR(std::abs(v.det - 1.0), 0.0, 1e-12);
}

TEST(Bvp, PeriodicOscillatorIsSingular) {
    const Grid g(0.0, 2.0 * std::numbers::pi, 2048);
    const BvpSolver solver(periodic(), g);
    EXPECT_FALSE(solver.verdict().well_posed);
    EXPECT_LE(solver.verdict().sigma_min, 1e-6 * std::max(solver.verdict().sigma_max, 1.0));
    EXPECT_THROW(solver.solve(), NumericalError);
    EXPECT_THROW(solve(periodic(), 0.0, g), NumericalError);
}

TEST(Bvp, SolutionSatisfiesBoundaryConditions) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    const Grid g(0.0, 1.0, 512);
    DifferentialSystem s;
    s.m = 2;
    s.r = 1;
    Mat A(2, 2);
    A << 0.0, -1.0, 1.0, 0.5;
    s.coefficients = {scalar_times_matrix(fn::exponential(1.0, 0.3), A)};
    s.rhs = vector_function({fn::cosine(1.0, 2.0), fn::constant(cplx(0.0, 1.0))});
    MultipointBoundaryOperator B;
    B.t0 = 0.0;
    B.alphas = {Mat::Identity(2, 2)};
    B.points = {0.5, 1.0};
    Mat b1(2, 2), b2(2, 2);
    b1 << 0.0, 1.0, 0.0, 0.0;
    b2 << 0.0, 0.0, 1.0, 0.0;
    B.betas = {b1, b2};
    for (int trial = 0; trial < 5; ++trial) {
        Vec c(2);
        c << cplx(nd(rng), nd(rng)), nd(rng);
        const BoundaryValueProblem bvp{s, B, c};
        const BvpSolver solver(bvp, g);
        ASSERT_TRUE(solver.verdict().well_posed);
        const auto y = solver.solve();
        EXPECT_LT((apply_multipoint(B, y) - Mat(c)).norm(), 1e-10);
        EXPECT_LT(discrepancy(bvp, y, 2.0), 1e-8);
    }
}

TEST(Bvp, SolutionDoesNotDependOnAnchor) {
    const Grid g(0.0, 1.0, 1024);
    const auto bvp = dirichlet_sine();
    const auto y0 = BvpSolver(bvp, g, 0.0).solve();
    for (double t0 : {0.5, 1.0}) {
        const auto y = BvpSolver(bvp, g, t0).solve();
        EXPECT_LT(sobolev_norm(y - y0, 2, 2.0), 1e-9);
    }
}

TEST(Bvp, ManyRightHandSidesShareOneFactorization) {
    const Grid g(0.0, 1.0, 1024);
    const auto bvp = dirichlet_sine();
    const BvpSolver solver(bvp, g);
    // y = t^3 - t solves y'' = 6t with zero Dirichlet data.
    const auto y = solver.solve(vector_function({fn::polynomial({0.0, 6.0})}), Vec::Zero(2));
    const auto exact = sample(vector_function({fn::polynomial({0.0, -1.0, 0.0, 1.0})}), g, 2);
    EXPECT_LT(sobolev_norm(y - exact, 2, 2.0), 1e-10);
    // Linearity in (f, c).
    Vec c(2);
    c << 1.0, 2.0;
    const auto y1 = solver.solve(vector_function({fn::constant(1.0)}), c);
    const auto y2 = solver.solve(vector_function({fn::constant(2.0)}), 2.0 * c);
    EXPECT_LT(sobolev_norm(2.0 * y1 - y2, 2, 2.0), 1e-10);
}

TEST(Bvp, LiftedOrdersFollowTheSolution) {
    // y' = y with n = 1 and B y = y'(0) = 3: y = 3 e^t, orders 0..2 all equal.
    DifferentialSystem s;
    s.m = 1;
    s.r = 1;
    s.n = 1;
    s.coefficients = {CoefficientFunction::constant(Mat::Constant(1, 1, -1.0))};
    s.rhs = CoefficientFunction::zero(1, 1);
    CanonicalBoundaryOperator B;
    B.t0 = 0.0;
    B.alphas = {Mat::Zero(1, 1), Mat::Constant(1, 1, 1.0)};
    B.phi = Density(1, 1);
    const BoundaryValueProblem bvp{s, B, Vec::Constant(1, 3.0)};
    const Grid g(0.0, 1.0, 512);
    const auto y = BvpSolver(bvp, g).solve();
    ASSERT_EQ(y.max_order(), 2);
    for (std::size_t i = 0; i < g.size(); i += 64) {
        for (int d = 0; d <= 2; ++d) EXPECT_NEAR(std::abs(y(d, i, 0) - 3.0 * std::exp(g.node(i))), 0.0, 1e-9);
    }
}

TEST(Bvp, ValidateRejectsMismatchedShapes) {
    auto bvp = dirichlet_sine();
    bvp.c = Vec::Zero(3);
    EXPECT_THROW(bvp.validate(), InvalidArgument);
    bvp = dirichlet_sine();
    bvp.boundary = canonicalize_points({{0.0, 0, column({1.0})}}, 0.0, 2, 1, 1);
    EXPECT_THROW(bvp.validate(), InvalidArgument);
}
