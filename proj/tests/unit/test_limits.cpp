#include <gtest/gtest.h>

#include "gbvp/functions.hpp"
#include "gbvp/limits.hpp"
#include "gbvp/parallel.hpp"
#include "oracles.hpp"

using namespace gbvp;

namespace {

Mat column(std::initializer_list<cplx> v) {
    Mat m(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (cplx x : v) m(i++, 0) = x;
    return m;
}

/// y'' + (mu0 + shift(mu)) y = 1 with Dirichlet data on [0, 1].
ParameterFamily shifted_family(std::function<double(double)> shift, std::vector<ParameterPoint> points) {
    ParameterFamily fam;
    fam.points = std::move(points);
    fam.limit = {0.0, 0.0, "limit"};
    fam.grid = Grid(0.0, 1.0, 1024);
    fam.build = [shift](const ParameterPoint& pt) {
        DifferentialSystem s;
        s.m = 1;
        s.r = 2;
        s.coefficients = {CoefficientFunction::constant(Mat::Constant(1, 1, shift(pt.mu))),
                          CoefficientFunction::zero(1, 1)};
        s.rhs = vector_function({fn::constant(1.0)});
        auto B = canonicalize_points({{0.0, 0, column({1.0, 0.0})}, {1.0, 0, column({0.0, 1.0})}}, 0.0, 2, 2, 1);
        return BoundaryValueProblem{s, B, Vec::Zero(2)};
    };
    return fam;
}

/// y' = t, y(0) + int sin(t / mu) y' = 1 on [0, pi], harmonic mu = 1/k.
ParameterFamily sine_density_family(int last) {
    ParameterFamily fam;
    fam.points = harmonic_points(1, last);
    fam.limit = {0.0, 0.0, "limit"};
    fam.grid = Grid(0.0, std::numbers::pi, 4096);
    fam.build = [](const ParameterPoint& pt) {
        DifferentialSystem s;
        s.m = 1;
        s.r = 1;
        s.coefficients = {CoefficientFunction::zero(1, 1)};
        s.rhs = vector_function({fn::polynomial({0.0, 1.0})});
        CanonicalBoundaryOperator B;
        B.t0 = 0.0;
        B.alphas = {Mat::Identity(1, 1)};
        B.phi = pt.distance == 0.0 ? Density(1, 1)
                                   : Density(SmoothDensity{scalar_times_identity(fn::sine(1.0, 1.0 / pt.mu), 1)});
        return BoundaryValueProblem{s, B, Vec::Constant(1, 1.0)};
    };
    return fam;
}

}  // namespace

TEST(Trend, Verdicts) {
    EXPECT_TRUE(trend_to_zero({1.0, 0.5, 0.2, 0.05}).pass);
    EXPECT_FALSE(trend_to_zero({1.0, 0.5, 0.6, 0.05}).pass);  // tail not decreasing
    EXPECT_FALSE(trend_to_zero({1.0, 0.9, 0.8, 0.7}).pass);   // not enough decay
    EXPECT_TRUE(trend_to_zero({1.0, 2.0, 1e-12, 1e-12}).pass);  // below floor
    EXPECT_FALSE(trend_to_zero({1.0, NAN, 0.01, 0.001}).pass);
    TrendOptions loose;
    loose.decay = 0.95;
    EXPECT_TRUE(trend_to_zero({1.0, 0.9, 0.8, 0.7}, loose).pass);
    EXPECT_FALSE(trend_to_zero({}).pass);
}

TEST(Points, Generators) {
    const auto d = dyadic_points(1.0, 1, 3);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_DOUBLE_EQ(d[0].mu, 1.5);
    EXPECT_DOUBLE_EQ(d[2].distance, 0.125);
    const auto h = harmonic_points(2, 4);
    ASSERT_EQ(h.size(), 3u);
    EXPECT_DOUBLE_EQ(h[0].mu, 0.5);
    EXPECT_DOUBLE_EQ(h[2].distance, 0.25);
}

TEST(Conditions, SmoothFamilyConverges) {
    const auto fam = shifted_family([](double mu) { return mu; }, dyadic_points(0.0, 1, 8));
    const auto rep = continuity_experiment(fam, 2.0);
    EXPECT_TRUE(rep.condition_zero.well_posed);
    EXPECT_TRUE(rep.condition_I.verdict.pass);
    EXPECT_TRUE(rep.condition_II.verdict.pass);
    EXPECT_TRUE(rep.solution_trend.pass);
    EXPECT_TRUE(rep.consistent);
    ASSERT_TRUE(rep.well_posed_range.has_value());
    // Deviations scale linearly with mu for this family.
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        EXPECT_NEAR(rep.rows[i - 1].solution_deviation / rep.rows[i].solution_deviation, 2.0, 0.1);
    }
}

TEST(Conditions, SignFlipFamilyFailsTogether) {
    std::vector<ParameterPoint> pts;
    for (int j = 1; j <= 8; ++j) pts.push_back({j % 2 ? 1.0 : -1.0, std::ldexp(1.0, -j), "j"});
    const auto fam = shifted_family([](double mu) { return mu; }, pts);
    const auto rep = continuity_experiment(fam, 2.0);
    EXPECT_FALSE(rep.condition_I.verdict.pass);
    EXPECT_FALSE(rep.solution_trend.pass);
    EXPECT_TRUE(rep.consistent);
}

TEST(Conditions, ExperimentIsDeterministic) {
    const auto fam = shifted_family([](double mu) { return mu; }, dyadic_points(0.0, 1, 4));
    const auto a = continuity_experiment(fam, 2.0, 42);
    const auto b = continuity_experiment(fam, 2.0, 42);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].solution_deviation, b.rows[i].solution_deviation);
        EXPECT_EQ(a.condition_II.deviations[i], b.condition_II.deviations[i]);
    }
}

TEST(BConvergence, SineDensityStrongButNotUniform) {
    const auto fam = sine_density_family(64);
    const auto rep = check_B_convergence(fam, 2.0);
    EXPECT_TRUE(rep.a.pass);
    EXPECT_TRUE(rep.b);
    EXPECT_TRUE(rep.c.pass);
    EXPECT_FALSE(rep.d.pass);
    EXPECT_TRUE(rep.strong());
    EXPECT_FALSE(rep.uniform());
    for (std::size_t i = 0; i < rep.distances.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        EXPECT_NEAR(rep.primitive_deviation[i], oracle::sine_primitive_sup(k), 0.1 * oracle::sine_primitive_sup(k));
        EXPECT_NEAR(rep.density_deviation[i], oracle::sine_l2_norm(), 0.01 * oracle::sine_l2_norm());
    }
    EXPECT_TRUE(rep.passes(ConvergenceMode::Strong));
    EXPECT_THROW(check_B_convergence(fam, kInfinity), InvalidArgument);
}

TEST(BConvergence, CapOverridesReferenceBound) {
    const auto fam = sine_density_family(8);
    BConvergenceOptions opt;
    opt.cap = 0.5;
    EXPECT_FALSE(check_B_convergence(fam, 2.0, opt).b);
}

TEST(TwoSided, RatiosAreBoundedAndScaleFree) {
    ParameterFamily fam;
    fam.points = dyadic_points(0.0, 1, 8);
    fam.limit = {0.0, 0.0, "limit"};
    fam.grid = Grid(0.0, 1.0, 2048);
    fam.build = [](const ParameterPoint& pt) {
        DifferentialSystem s;
        s.m = 1;
        s.r = 1;
        s.coefficients = {CoefficientFunction::constant(Mat::Constant(1, 1, 1.0 + pt.mu))};
        s.rhs = vector_function({fn::constant(1.0)});
        auto B = canonicalize_points({{0.0, 0, column({1.0})}}, 0.0, 1, 1, 1);
        return BoundaryValueProblem{s, B, Vec::Zero(1)};
    };
    const auto rep = two_sided_bound_experiment(fam, 2.0);
    ASSERT_EQ(rep.ratios.size(), 8u);
    for (double r : rep.ratios) EXPECT_TRUE(std::isfinite(r) && r > 0.0);
    EXPECT_LE(rep.spread, 50.0);
    EXPECT_LE(rep.rescale_change, 0.01);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.gamma_lower, rep.gamma_upper);
}

TEST(TestSets, SeededAndShaped) {
    const Grid g(0.0, 1.0, 64);
    const auto a = make_test_set(g, 2, 3, 7);
    const auto b = make_test_set(g, 2, 3, 7);
    const auto c = make_test_set(g, 2, 3, 8);
    ASSERT_EQ(a.functions.size(), b.functions.size());
    EXPECT_EQ(a.functions.back()(0, 10, 0, 0), b.functions.back()(0, 10, 0, 0));
    EXPECT_NE(a.functions.back()(0, 10, 0, 0), c.functions.back()(0, 10, 0, 0));
    EXPECT_EQ(a.functions.front().rows(), 2);
    EXPECT_EQ(a.functions.front().max_order(), 3);
}

TEST(Parallel, KeepsOrderAndRethrows) {
    const auto v = parallel_map(100, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
    EXPECT_THROW(parallel_map(
                     10,
                     [](std::size_t i) {
                         if (i == 3) throw NumericalError("boom");
                         return 0;
                     },
                     3),
                 NumericalError);
}
