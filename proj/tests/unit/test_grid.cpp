#include <gtest/gtest.h>

#include <random>

#include "gbvp/functions.hpp"
#include "gbvp/grid.hpp"
#include "oracles.hpp"

using namespace gbvp;

TEST(Grid, NodesAndValidation) {
    const Grid g(0.0, 2.0, 8);
    EXPECT_EQ(g.size(), 9u);
    EXPECT_DOUBLE_EQ(g.node(0), 0.0);
    EXPECT_DOUBLE_EQ(g.node(8), 2.0);
    EXPECT_DOUBLE_EQ(g.step(), 0.25);
    EXPECT_EQ(g.find_node(0.75), std::optional<std::size_t>(3));
    EXPECT_FALSE(g.find_node(0.8).has_value());
    EXPECT_THROW(g.node_index(0.8), InvalidArgument);
    EXPECT_THROW(Grid(0.0, 1.0, 3), InvalidArgument);
    EXPECT_THROW(Grid(1.0, 1.0, 4), InvalidArgument);
    EXPECT_THROW(Grid(0.0, INFINITY, 4), InvalidArgument);
}

TEST(Grid, SimpsonIsExactForCubics) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
        const Grid g(-1.0, 2.0, 6);
        std::vector<double> v;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = g.node(i);
            v.push_back(c0 + c1 * t + c2 * t * t + c3 * t * t * t);
        }
        const double exact = oracle::integrate(
            [&](double t) { return c0 + c1 * t + c2 * t * t + c3 * t * t * t; }, -1.0, 2.0, 4, 4);
        EXPECT_NEAR(integrate_samples(v, g.step()), exact, 1e-12);
    }
}

TEST(Grid, LpNormMatchesGaussLegendre) {
    const Grid g(0.0, 1.0, 1024);
    const auto f = sample(vector_function({fn::exponential(1.0, 1.0)}), g, 0);
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
        const double ref = oracle::lp_norm([](double t) { return std::exp(t); }, 0.0, 1.0, p);
        EXPECT_NEAR(lp_norm(f, 0, p), ref, 1e-10) << "p=" << p;
    }
    EXPECT_NEAR(lp_norm(f, 0, kInfinity), std::exp(1.0), 1e-14);
}

TEST(Grid, ComponentNormsAdd) {
    const Grid g(0.0, 1.0, 256);
    const auto f = sample(vector_function({fn::sine(1.0, 2.0), fn::cosine(cplx(0.0, 3.0), 1.0)}), g, 0);
    const auto a = sample(vector_function({fn::sine(1.0, 2.0)}), g, 0);
    const auto b = sample(vector_function({fn::cosine(cplx(0.0, 3.0), 1.0)}), g, 0);
    for (double p : {1.0, 2.0, kInfinity}) {
        EXPECT_NEAR(lp_norm(f, 0, p), lp_norm(a, 0, p) + lp_norm(b, 0, p), 1e-13);
    }
}

TEST(Grid, NormAxioms) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid g(0.0, 1.0, 128);
    for (int trial = 0; trial < 25; ++trial) {
        const auto x = sample(vector_function({fn::polynomial({u(rng), u(rng), u(rng)})}), g, 0);
        const auto y = sample(vector_function({fn::sine(u(rng), 5.0 * u(rng), u(rng))}), g, 0);
        for (double p : {1.0, 2.0, 3.0, kInfinity}) {
            EXPECT_LE(lp_norm(x + y, 0, p), lp_norm(x, 0, p) + lp_norm(y, 0, p) + 1e-12);
            EXPECT_NEAR(lp_norm(cplx(0.0, -2.5) * x, 0, p), 2.5 * lp_norm(x, 0, p), 1e-12);
            EXPECT_GE(lp_norm(x, 0, p), 0.0);
        }
    }
}

TEST(Grid, SobolevNormSumsOrders) {
    const Grid g(0.0, 1.0, 64);
    const auto f = sample(vector_function({fn::sine(1.0, 3.0)}), g, 3);
    double sum = 0.0;
    for (int s = 0; s <= 3; ++s) sum += lp_norm(f, s, 2.0);
    EXPECT_NEAR(sobolev_norm(f, 3, 2.0), sum, 1e-14);
    EXPECT_THROW(lp_norm(f, 4, 2.0), InvalidArgument);
    EXPECT_THROW(lp_norm(f, 0, 0.5), InvalidArgument);
}

TEST(Grid, SimpsonConvergesAtFourthOrder) {
    auto err = [](std::size_t N) {
        const Grid g(0.0, 1.0, N);
        const auto f = sample(vector_function({fn::polynomial({0, 0, 0, 0, 1})}), g, 0);
        return std::abs(lp_norm(f, 0, 2.0) - 1.0 / 3.0);
    };
    EXPECT_GE(err(16) / err(64), 200.0);
}

TEST(GridFunction, ArithmeticAndShape) {
    const Grid g(0.0, 1.0, 4);
    GridFunction a(g, 2, 1, 1), b(g, 2, 1, 1);
    a(1, 2, 1) = 3.0;
    b(1, 2, 1) = cplx(0.0, 1.0);
    const auto c = a + b;
    EXPECT_EQ(c(1, 2, 1), cplx(3.0, 1.0));
    EXPECT_EQ((a - a)(1, 2, 1), cplx(0.0));
    EXPECT_EQ(a.resized(3).max_order(), 3);
    EXPECT_EQ(a.resized(3)(1, 2, 1), cplx(3.0));
    EXPECT_EQ(a.truncated(0).max_order(), 0);
    GridFunction other(g, 1, 1, 1);
    EXPECT_THROW(a += other, InvalidArgument);
    a(0, 3, 0) = cplx(NAN, 0.0);
    ASSERT_TRUE(a.first_non_finite().has_value());
    EXPECT_EQ(a.first_non_finite()->second, 3u);
}

TEST(Functions, DerivativesMatchFiniteDifferences) {
    const std::vector<ScalarFunction> fs = {
        fn::polynomial({1.0, -2.0, 0.5, 3.0}, 0.3), fn::exponential(cplx(1.0, 1.0), cplx(-0.5, 2.0)),
        fn::sine(2.0, 3.0, 0.4), fn::cosine(cplx(0.0, 1.0), 1.7, -0.2),
        fn::product(fn::sine(1.0, 2.0), fn::exponential(1.0, 0.7)),
        fn::sum({fn::cosine(1.0, 1.0), fn::polynomial({0.0, 1.0})})};
    const double h = 1e-4;
    for (const auto& f : fs) {
        for (double t : {0.1, 0.5, 0.9}) {
            for (int d = 0; d < 3; ++d) {
                const cplx fd = (f(t + h, d) - f(t - h, d)) / (2.0 * h);
                EXPECT_NEAR(std::abs(fd - f(t, d + 1)), 0.0, 1e-5 * (1.0 + std::abs(f(t, d + 1))));
            }
        }
    }
}

TEST(Functions, StepAndOscillationHaveNoDerivatives) {
    const auto s = fn::step({0.0, 0.5, 1.0}, {1.0, 2.0});
    EXPECT_EQ(s.max_order(), 0);
    EXPECT_EQ(s(0.25), cplx(1.0));
    EXPECT_EQ(s(0.5), cplx(2.0));
    EXPECT_THROW(s(0.2, 1), InvalidArgument);
    const auto o = fn::singular_oscillation(0.5);
    EXPECT_EQ(o(0.5), cplx(0.0));
    EXPECT_NEAR(o(0.5 + 1.0 / std::numbers::pi * 2.0).real(), 1.0, 1e-12);
}

TEST(Functions, MatrixHelpers) {
    Mat m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    const auto f = scalar_times_matrix(fn::exponential(1.0, 2.0), m);
    EXPECT_NEAR((f(0.3, 1) - 2.0 * std::exp(0.6) * m).norm(), 0.0, 1e-12);
    const auto id = scalar_times_identity(fn::constant(3.0), 2);
    EXPECT_NEAR((add(f, id)(0.0) - (m + 3.0 * Mat::Identity(2, 2))).norm(), 0.0, 1e-14);
    EXPECT_NEAR((scale(id, 2.0)(0.5) - 6.0 * Mat::Identity(2, 2)).norm(), 0.0, 1e-14);
    EXPECT_THROW(f(0.0, -1), InvalidArgument);
}
