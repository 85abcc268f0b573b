#include "gbvp/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gbvp/functions.hpp"
#include "gbvp/parallel.hpp"

namespace gbvp {

void ParameterFamily::validate() const {
    if (!build) throw InvalidArgument("parameter family has no builder");
    if (points.empty()) throw InvalidArgument("parameter family needs at least one sweep point");
    if (limit.distance != 0.0) throw InvalidArgument("limit point must have distance 0");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].distance > 0.0)) throw InvalidArgument("sweep distances must be positive");
        if (i > 0 && !(points[i].distance < points[i - 1].distance)) {
            throw InvalidArgument("sweep points must be sorted by strictly decreasing distance");
        }
    }
}

std::vector<ParameterPoint> dyadic_points(double mu0, int first, int last) {
    if (first > last) throw InvalidArgument("dyadic sweep needs first <= last");
    std::vector<ParameterPoint> pts;
    for (int j = first; j <= last; ++j) {
        const double d = std::ldexp(1.0, -j);
        pts.push_back({mu0 + d, d, "2^-" + std::to_string(j)});
    }
    return pts;
}

std::vector<ParameterPoint> harmonic_points(int first, int last) {
    if (first < 1 || first > last) throw InvalidArgument("harmonic sweep needs 1 <= first <= last");
    std::vector<ParameterPoint> pts;
    for (int k = first; k <= last; ++k) {
        const double d = 1.0 / static_cast<double>(k);
        pts.push_back({d, d, "k=" + std::to_string(k)});
    }
    return pts;
}

ParameterFamily rescaled(const ParameterFamily& family, cplx factor) {
    ParameterFamily out = family;
    out.build = [inner = family.build, factor](const ParameterPoint& pt) {
        BoundaryValueProblem bvp = inner(pt);
        bvp.system.rhs = scale(bvp.system.rhs, factor);
        bvp.c *= factor;
        return bvp;
    };
    return out;
}

TrendVerdict trend_to_zero(const std::vector<double>& values, const TrendOptions& options) {
    if (values.empty()) return {false, "no values"};
    for (double v : values) {
        if (!std::isfinite(v)) return {false, "non-finite value"};
    }
    const double last = values.back();
    if (last <= options.floor) return {true, "final value below floor"};
    std::ostringstream os;
    if (!(last <= options.decay * values.front())) {
        os << "final " << last << " exceeds " << options.decay << " x initial " << values.front();
        return {false, os.str()};
    }
    const auto tail = static_cast<std::size_t>(std::max(options.tail, 1));
    if (values.size() < tail) return {false, "fewer values than the tail length"};
    for (std::size_t i = values.size() - tail + 1; i < values.size(); ++i) {
        if (!(values[i] < values[i - 1])) {
            os << "tail not strictly decreasing at row " << i;
            return {false, os.str()};
        }
    }
    return {true, "decayed and decreasing"};
}

TestSet make_test_set(const Grid& grid, Eigen::Index m, int top, std::uint64_t seed,
                      int random_count) {
    TestSet set;
    for (int s = 0; s <= top + 2; ++s) {
        std::vector<cplx> c(static_cast<std::size_t>(s) + 1, cplx{});
        c.back() = 1.0;
        set.functions.push_back(sample(scalar_times_identity(fn::polynomial(c), m), grid, top));
        set.names.push_back("t^" + std::to_string(s));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> normal;
    for (int k = 0; k < random_count; ++k) {
        std::vector<ScalarFunction> terms;
        for (int i = 0; i < 3; ++i) {
            const cplx amp{normal(rng), normal(rng)};
            const double w = freq(rng);
            terms.push_back(fn::sine(amp, w, phase(rng)));
        }
        set.functions.push_back(sample(scalar_times_identity(fn::sum(std::move(terms)), m), grid, top));
        set.names.push_back("trig" + std::to_string(k));
    }
    return set;
}

namespace {

double coefficient_deviation(const DifferentialSystem& x, const DifferentialSystem& y,
                             const Grid& grid, double p) {
    double total = 0.0;
    for (int j = 0; j < x.r; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        total += sobolev_norm(sample(x.coefficients[jj], grid, x.n) - sample(y.coefficients[jj], grid, y.n),
                              x.n, p);
    }
    return total;
}

std::vector<Mat> apply_tests(const BoundaryOperator& B, const TestSet& tests) {
    std::vector<Mat> out;
    for (const auto& y : tests.functions) out.push_back(apply_boundary(B, y));
    return out;
}

double boundary_deviation(const BoundaryOperator& B, const std::vector<Mat>& reference,
                          const TestSet& tests) {
    double worst = 0.0;
    for (std::size_t i = 0; i < tests.functions.size(); ++i) {
        const Mat diff = apply_boundary(B, tests.functions[i]) - reference[i];
        worst = std::max(worst, diff.colwise().norm().maxCoeff());
    }
    return worst;
}

std::vector<double> distances(const ParameterFamily& family) {
    std::vector<double> d;
    for (const auto& pt : family.points) d.push_back(pt.distance);
    return d;
}

const CanonicalBoundaryOperator& canonical_of(const BoundaryValueProblem& bvp) {
    const auto* c = std::get_if<CanonicalBoundaryOperator>(&bvp.boundary);
    if (c == nullptr) throw InvalidArgument("boundary convergence checks need canonical operators");
    return *c;
}

double matrix_inf_norm(const Mat& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

WellPosednessVerdict check_condition_zero(const ParameterFamily& family) {
    const BvpSolver solver(family.build(family.limit), family.grid, family.t0, family.tol);
    return solver.verdict();
}

ConditionReport check_condition_I(const ParameterFamily& family, double p, const TrendOptions& options) {
    family.validate();
    const auto base = family.build(family.limit);
    ConditionReport rep;
    rep.distances = distances(family);
    rep.deviations = parallel_map(family.points.size(), [&](std::size_t i) {
        return coefficient_deviation(family.build(family.points[i]).system, base.system, family.grid, p);
    });
    rep.verdict = trend_to_zero(rep.deviations, options);
    return rep;
}

ConditionReport check_condition_II(const ParameterFamily& family, const TestSet& tests,
                                   const TrendOptions& options) {
    family.validate();
    const auto reference = apply_tests(family.build(family.limit).boundary, tests);
    ConditionReport rep;
    rep.distances = distances(family);
    rep.deviations = parallel_map(family.points.size(), [&](std::size_t i) {
        return boundary_deviation(family.build(family.points[i]).boundary, reference, tests);
    });
    rep.verdict = trend_to_zero(rep.deviations, options);
    return rep;
}

ConditionReport operator_deviation_L(const ParameterFamily& family, const TestSet& tests, double p,
                                     const TrendOptions& options) {
    family.validate();
    const DiscretizedSystem base(family.build(family.limit).system, family.grid);
    const int n = base.n();
    std::vector<GridFunction> base_res;
    std::vector<double> norms;
    for (const auto& y : tests.functions) {
        base_res.push_back(base.residual(y, nullptr));
        norms.push_back(sobolev_norm(y, n + base.r(), p));
    }
    ConditionReport rep;
    rep.distances = distances(family);
    rep.deviations = parallel_map(family.points.size(), [&](std::size_t i) {
        const DiscretizedSystem ds(family.build(family.points[i]).system, family.grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < tests.functions.size(); ++k) {
            const double diff = sobolev_norm(ds.residual(tests.functions[k], nullptr) - base_res[k], n, p);
            worst = std::max(worst, diff / norms[k]);
        }
        return worst;
    });
    rep.verdict = trend_to_zero(rep.deviations, options);
    return rep;
}

BConvergenceReport check_B_convergence(const ParameterFamily& family, double p,
                                       const BConvergenceOptions& options) {
    family.validate();
    if (p == kInfinity) throw InvalidArgument("boundary convergence checks require p < infinity");
    const double q = dual_exponent(p);
    const Grid& grid = family.grid;
    const auto base_bvp = family.build(family.limit);
    const CanonicalBoundaryOperator base = canonical_of(base_bvp);

    struct Row {
        double alpha, phi, primitive, density;
    };
    const auto rows = parallel_map(family.points.size(), [&](std::size_t i) {
        const auto bvp = family.build(family.points[i]);
        const auto& B = canonical_of(bvp);
        if (B.top() != base.top()) throw InvalidArgument("family changes n + r across points");
        Row row{};
        for (std::size_t s = 0; s < B.alphas.size(); ++s) {
            row.alpha = std::max(row.alpha, matrix_inf_norm(B.alphas[s] - base.alphas[s]));
        }
        row.phi = B.phi.lp_norm(grid, q);
        const Density diff = B.phi - base.phi;
        for (const auto& v : diff.primitive(grid)) row.primitive = std::max(row.primitive, v.cwiseAbs().sum());
        row.density = diff.lp_norm(grid, q);
        return row;
    });

    BConvergenceReport rep;
    rep.distances = distances(family);
    for (const auto& r : rows) {
        rep.alpha_deviation.push_back(r.alpha);
        rep.phi_norm.push_back(r.phi);
        rep.primitive_deviation.push_back(r.primitive);
        rep.density_deviation.push_back(r.density);
    }
    rep.phi_norm_limit = base.phi.lp_norm(grid, q);
    rep.phi_bound = options.cap.value_or(options.bound_factor *
                                         std::max(rep.phi_norm_limit, rep.phi_norm.front()));
    const double sup = *std::max_element(rep.phi_norm.begin(), rep.phi_norm.end());
    rep.b = std::isfinite(sup) && sup <= rep.phi_bound;
    rep.a = trend_to_zero(rep.alpha_deviation, options.trend);
    rep.c = trend_to_zero(rep.primitive_deviation, options.trend);
    rep.d = trend_to_zero(rep.density_deviation, options.trend);
    return rep;
}

namespace {

struct Baseline {
    BoundaryValueProblem bvp;
    GridFunction y;
};

std::vector<ConvergenceRow> sweep_rows(const ParameterFamily& family, double p, const Baseline& base,
                                       const TestSet& tests) {
    const auto reference = apply_tests(base.bvp.boundary, tests);
    const int top = base.bvp.system.n + base.bvp.system.r;
    return parallel_map(family.points.size(), [&](std::size_t i) {
        const auto& pt = family.points[i];
        ConvergenceRow row;
        row.label = pt.label;
        row.mu = pt.mu;
        row.distance = pt.distance;
        try {
            const auto bvp = family.build(pt);
            row.coefficient_deviation = coefficient_deviation(bvp.system, base.bvp.system, family.grid, p);
            row.boundary_deviation = boundary_deviation(bvp.boundary, reference, tests);
            const BvpSolver solver(bvp, family.grid, family.t0, family.tol);
            row.sigma_min = solver.verdict().sigma_min;
            row.well_posed = solver.verdict().well_posed;
            row.discrepancy = discrepancy(solver.discretized(), solver.discretized().own_forcing(),
                                          bvp.boundary, bvp.c, base.y, p);
            if (row.well_posed) {
                row.solution_deviation = sobolev_norm(solver.solve() - base.y, top, p);
                if (row.discrepancy > 1e-14) row.ratio = row.solution_deviation / row.discrepancy;
            }
        } catch (const Error& e) {
            row.well_posed = false;
            row.error = e.what();
        }
        return row;
    });
}

Baseline baseline(const ParameterFamily& family) {
    auto bvp = family.build(family.limit);
    const BvpSolver solver(bvp, family.grid, family.t0, family.tol);
    if (!solver.verdict().well_posed) {
        throw NumericalError("the limit problem is not well posed; condition (0) fails");
    }
    return {std::move(bvp), solver.solve()};
}

}  // namespace

ConvergenceReport continuity_experiment(const ParameterFamily& family, double p, std::uint64_t seed,
                                        const TrendOptions& options) {
    family.validate();
    ConvergenceReport rep;
    rep.seed = seed;
    rep.condition_zero = check_condition_zero(family);
    const auto base_bvp = family.build(family.limit);
    const int top = base_bvp.system.n + base_bvp.system.r;
    const TestSet tests = make_test_set(family.grid, base_bvp.system.m, top, seed);
    rep.condition_I = check_condition_I(family, p, options);
    rep.condition_II = check_condition_II(family, tests, options);
    rep.conditions_pass =
        rep.condition_zero.well_posed && rep.condition_I.verdict.pass && rep.condition_II.verdict.pass;
    if (!rep.condition_zero.well_posed) {
        rep.solution_trend = {false, "limit problem not well posed"};
        rep.consistent = true;
        return rep;
    }
    const Baseline base = baseline(family);
    rep.rows = sweep_rows(family, p, base, tests);

    std::vector<double> devs;
    for (const auto& row : rep.rows) {
        if (!row.well_posed) continue;
        devs.push_back(row.solution_deviation);
        if (!rep.well_posed_range) {
            rep.well_posed_range = std::pair{row.distance, row.distance};
        } else {
            rep.well_posed_range->first = std::min(rep.well_posed_range->first, row.distance);
            rep.well_posed_range->second = std::max(rep.well_posed_range->second, row.distance);
        }
    }
    rep.solution_trend = trend_to_zero(devs, options);
    rep.consistent = rep.conditions_pass == rep.solution_trend.pass;
    return rep;
}

TwoSidedBoundReport two_sided_bound_experiment(const ParameterFamily& family, double p, double bound,
                                               double rescale_factor) {
    family.validate();
    TwoSidedBoundReport rep;
    rep.bound = bound;
    rep.rescale_factor = rescale_factor;

    const auto run = [&](const ParameterFamily& fam, std::vector<ConvergenceRow>& rows) {
        const Baseline base = baseline(fam);
        const int top = base.bvp.system.n + base.bvp.system.r;
        const TestSet tests = make_test_set(fam.grid, base.bvp.system.m, top, 1, 0);
        rows = sweep_rows(fam, p, base, tests);
        std::vector<double> ratios;
        for (const auto& row : rows) ratios.push_back(row.ratio.value_or(std::nan("")));
        return ratios;
    };
    std::vector<ConvergenceRow> scaled_rows;
    const auto ratios = run(family, rep.rows);
    const auto scaled = run(rescaled(family, rescale_factor), scaled_rows);

    bool finite = true;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!rep.rows[i].ratio) continue;  // zero discrepancy rows are excluded
        const double r = ratios[i];
        if (!std::isfinite(r) || !(r > 0.0)) finite = false;
        rep.ratios.push_back(r);
        rep.rescaled_ratios.push_back(scaled[i]);
        if (std::isfinite(scaled[i])) {
            rep.rescale_change = std::max(rep.rescale_change, std::abs(scaled[i] - r) / r);
        } else {
            finite = false;
        }
    }
    if (rep.ratios.empty()) return rep;
    rep.gamma_lower = *std::min_element(rep.ratios.begin(), rep.ratios.end());
    rep.gamma_upper = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.spread = rep.gamma_upper / rep.gamma_lower;
    rep.pass = finite && rep.spread <= bound && rep.rescale_change <= 0.01;
    return rep;
}

}  // namespace gbvp
