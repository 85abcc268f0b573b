#include <benchmark/benchmark.h>

#include <numbers>

#include "gbvp/approx.hpp"
#include "gbvp/functions.hpp"
#include "gbvp/limits.hpp"

using namespace gbvp;

namespace {

Mat column(std::initializer_list<cplx> v) {
    Mat m(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (cplx x : v) m(i++, 0) = x;
    return m;
}

BoundaryValueProblem dirichlet_sine() {
    DifferentialSystem s;
    s.m = 1;
    s.r = 2;
    s.coefficients = {CoefficientFunction::zero(1, 1), CoefficientFunction::zero(1, 1)};
    s.rhs = vector_function({fn::sine(-std::numbers::pi * std::numbers::pi, std::numbers::pi)});
    auto B = canonicalize_points({{0.0, 0, column({1.0, 0.0})}, {1.0, 0, column({0.0, 1.0})}}, 0.0, 2, 2, 1);
    return {s, B, Vec::Zero(2)};
}

/// m x m system y'' + A(t) y = f with A(t) = e^t * (random fixed matrix).
BoundaryValueProblem coupled(Eigen::Index m) {
    DifferentialSystem s;
    s.m = static_cast<int>(m);
    s.r = 2;
    Mat A = Mat::Random(m, m) * 0.5;
    s.coefficients = {scalar_times_matrix(fn::exponential(1.0, 1.0), A), CoefficientFunction::zero(m, m)};
    std::vector<ScalarFunction> f(static_cast<std::size_t>(m), fn::cosine(1.0, 2.0));
    s.rhs = vector_function(f);
    CanonicalBoundaryOperator B;
    B.t0 = 0.0;
    B.alphas = {Mat::Zero(2 * m, m), Mat::Zero(2 * m, m)};
    B.alphas[0].topRows(m) = Mat::Identity(m, m);
    B.alphas[1].bottomRows(m) = Mat::Identity(m, m);
    B.phi = Density(2 * m, m);
    return {s, B, Vec::Ones(2 * m)};
}

}  // namespace

static void BM_SolveDirichlet(benchmark::State& state) {
    const Grid g(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    const auto bvp = dirichlet_sine();
    for (auto _ : state) benchmark::DoNotOptimize(BvpSolver(bvp, g).solve());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveDirichlet)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

static void BM_SolveCoupled(benchmark::State& state) {
    const Grid g(0.0, 1.0, 2048);
    const auto bvp = coupled(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(BvpSolver(bvp, g).solve());
}
BENCHMARK(BM_SolveCoupled)->DenseRange(1, 4);

static void BM_RepeatedRhs(benchmark::State& state) {
    const Grid g(0.0, 1.0, 4096);
    const BvpSolver solver(dirichlet_sine(), g);
    const auto f = vector_function({fn::polynomial({0.0, 6.0})});
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(f, Vec::Zero(2)));
}
BENCHMARK(BM_RepeatedRhs);

static void BM_FejerMean(benchmark::State& state) {
    const Grid g(0.0, 1.0, 4096);
    const auto f = sample(vector_function({fn::step({0.0, 0.5, 1.0}, {1.0, 0.0})}), g, 0);
    for (auto _ : state) benchmark::DoNotOptimize(fejer_mean(f, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FejerMean)->RangeMultiplier(4)->Range(4, 256);

static void BM_PolynomialFit(benchmark::State& state) {
    const Grid g(0.0, 1.0, 4096);
    const auto e = scalar_times_identity(fn::exponential(1.0, 1.0), 2);
    for (auto _ : state) benchmark::DoNotOptimize(polynomial_fit(e, static_cast<int>(state.range(0)), g, 2.0, 1));
}
BENCHMARK(BM_PolynomialFit)->DenseRange(4, 16, 4);

static void BM_Canonicalize(benchmark::State& state) {
    const Grid g(0.0, 1.0, 1024);
    std::vector<PointCondition> conds;
    for (int i = 0; i < state.range(0); ++i) {
        conds.push_back({g.node(static_cast<std::size_t>(i * 7 % 1024)), i % 2, column({1.0, 0.5})});
    }
    for (auto _ : state) benchmark::DoNotOptimize(canonicalize_points(conds, 0.0, 2, 2, 1));
}
BENCHMARK(BM_Canonicalize)->Range(2, 64);
BENCHMARK_MAIN();
