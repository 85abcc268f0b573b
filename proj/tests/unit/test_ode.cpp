#include <gtest/gtest.h>

#include <random>

#include "gbvp/functions.hpp"
#include "gbvp/ode.hpp"
#include "oracles.hpp"

using namespace gbvp;

namespace {

/// y'' + y = 0.
DifferentialSystem oscillator() {
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {CoefficientFunction::constant(Mat::Identity(1, 1)), CoefficientFunction::zero(1, 1)};
    s.rhs = CoefficientFunction::zero(1, 1);
    return s;
}

double oscillator_sup_error(std::size_t N) {
    const Grid g(0.0, 2.0 * std::numbers::pi, N);
    const std::vector<Vec> init = {Vec::Constant(1, 1.0), Vec::Constant(1, 0.0)};
    const auto y = solve_cauchy(oscillator(), init, g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(y(0, i, 0) - std::cos(g.node(i))));
    return err;
}

}  // namespace

TEST(Ode, CompanionLayout) {
    DifferentialSystem s;
    s.m = 2;
    s.r = 2;
    Mat a0(2, 2), a1(2, 2);
    a0 << 1, 2, 3, 4;
    a1 << 5, 6, 7, 8;
    s.coefficients = {CoefficientFunction::constant(a0), CoefficientFunction::constant(a1)};
    s.rhs = CoefficientFunction::zero(2, 1);
    const Mat K = companion(s, 0.0);
    EXPECT_NEAR((K.block(0, 2, 2, 2) + Mat::Identity(2, 2)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(K.block(0, 0, 2, 2).norm(), 0.0, 1e-15);
    EXPECT_NEAR((K.block(2, 0, 2, 2) - a0).norm(), 0.0, 1e-15);
    EXPECT_NEAR((K.block(2, 2, 2, 2) - a1).norm(), 0.0, 1e-15);
}

TEST(Ode, ValidateRejectsBadShapes) {
    auto s = oscillator();
    s.coefficients.pop_back();
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = oscillator();
    s.rhs = CoefficientFunction::zero(2, 1);
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = oscillator();
    s.n = 1;
    s.coefficients[0] = scalar_times_identity(fn::step({0.0, 1.0}, {1.0}), 1);
    EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Ode, Rk4FourthOrder) {
    const double coarse = oscillator_sup_error(16);
    const double fine = oscillator_sup_error(64);
    EXPECT_GE(coarse / fine, 150.0);
    EXPECT_LT(oscillator_sup_error(4096), 1e-11);
}

TEST(Ode, PropagatesBothWaysFromInteriorAnchor) {
    const Grid g(0.0, 2.0, 512);
    const auto s = oscillator();
    const auto fs = fundamental_system(s, 1.0, g);
    for (std::size_t i = 0; i < g.size(); i += 37) {
        const double t = g.node(i) - 1.0;
        EXPECT_NEAR(std::abs(fs.blocks[0](0, i, 0) - std::cos(t)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(fs.blocks[1](0, i, 0) - std::sin(t)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(fs.blocks[1](1, i, 0) - std::cos(t)), 0.0, 1e-10);
    }
    EXPECT_THROW(fundamental_system(s, 1.001, g), InvalidArgument);
}

TEST(Ode, WronskianIsIdentityAtAnchorAndFollowsAbel) {
    // y'' + t y' + e^t y = 0: det W(t) = exp(-(t^2 - t0^2)/2).
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {scalar_times_identity(fn::exponential(1.0, 1.0), 1),
                      scalar_times_identity(fn::polynomial({0.0, 1.0}), 1)};
    s.rhs = CoefficientFunction::zero(1, 1);
    const Grid g(0.0, 1.0, 1024);
    const auto fs = fundamental_system(s, 0.5, g);
    const std::size_t anchor = g.node_index(0.5);
    EXPECT_NEAR((fs.wronskian(anchor) - Mat::Identity(2, 2)).norm(), 0.0, 1e-15);
    for (std::size_t i = 0; i < g.size(); i += 64) {
        const double t = g.node(i);
        EXPECT_NEAR(std::abs(fs.wronskian(i).determinant() - std::exp(-(t * t - 0.25) / 2.0)), 0.0, 1e-10);
    }
}

TEST(Ode, LiftMatchesExactHigherDerivatives) {
    // y = e^{2t} solves y'' + t y = (4 + t) e^{2t}; n = 2 lifts to order 4.
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.n = 2;
    s.coefficients = {scalar_times_identity(fn::polynomial({0.0, 1.0}), 1), CoefficientFunction::zero(1, 1)};
    s.rhs = vector_function({fn::product(fn::polynomial({4.0, 1.0}), fn::exponential(1.0, 2.0))});
    const Grid g(0.0, 1.0, 1024);
    const std::vector<Vec> init = {Vec::Constant(1, 1.0), Vec::Constant(1, 2.0)};
    const auto y = solve_cauchy(s, init, g);
    ASSERT_EQ(y.max_order(), 4);
    for (std::size_t i = 0; i < g.size(); i += 128) {
        for (int d = 0; d <= 4; ++d) {
            const double exact = std::pow(2.0, d) * std::exp(2.0 * g.node(i));
            EXPECT_NEAR(std::abs(y(d, i, 0) - exact), 0.0, 1e-9 * exact) << "order " << d;
        }
    }
}

TEST(Ode, ApplyOperatorOnExactSolutionGivesForcing) {
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {scalar_times_identity(fn::polynomial({0.0, 1.0}), 1), CoefficientFunction::zero(1, 1)};
    const auto y = vector_function({fn::exponential(1.0, 2.0)});
    const auto Ly = apply_operator(s, y);
    for (double t : {0.0, 0.3, 1.0}) EXPECT_NEAR(std::abs(Ly(t)(0, 0) - (4.0 + t) * std::exp(2.0 * t)), 0.0, 1e-12);
}

TEST(Ode, GeneralSolutionIsLinear) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    const Grid g(0.0, 1.0, 64);
    const auto fs = fundamental_system(oscillator(), 0.0, g);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec> q1 = {Vec::Constant(1, cplx(nd(rng), nd(rng))), Vec::Constant(1, nd(rng))};
        std::vector<Vec> q2 = {Vec::Constant(1, nd(rng)), Vec::Constant(1, cplx(0.0, nd(rng)))};
        std::vector<Vec> sum = {q1[0] + 2.0 * q2[0], q1[1] + 2.0 * q2[1]};
        const auto lhs = general_solution(fs, sum);
        const auto rhs = general_solution(fs, q1) + 2.0 * general_solution(fs, q2);
        EXPECT_LT(sobolev_norm(lhs - rhs, 2, 2.0), 1e-12);
    }
}

TEST(Ode, ComplexCoefficients) {
    // y' - i y = 0, y(0) = 1.
    DifferentialSystem s;
    s.m = 1;
    s.r = 1;
    s.coefficients = {CoefficientFunction::constant(Mat::Constant(1, 1, cplx(0.0, -1.0)))};
    s.rhs = CoefficientFunction::zero(1, 1);
    const Grid g(0.0, 3.0, 512);
    const std::vector<Vec> init = {Vec::Constant(1, 1.0)};
    const auto y = solve_cauchy(s, init, g);
    for (std::size_t i = 0; i < g.size(); i += 50) {
        EXPECT_NEAR(std::abs(y(0, i, 0) - std::polar(1.0, g.node(i))), 0.0, 1e-10);
    }
}

TEST(Ode, BlowUpIsReported) {
    DifferentialSystem s;
    s.m = 1;
    s.r = 1;
    s.coefficients = {CoefficientFunction::constant(Mat::Constant(1, 1, -1e6))};
    s.rhs = CoefficientFunction::zero(1, 1);
    const Grid g(0.0, 100.0, 16);
    const std::vector<Vec> init = {Vec::Constant(1, 1.0)};
    EXPECT_THROW(solve_cauchy(s, init, g), NumericalError);
}
