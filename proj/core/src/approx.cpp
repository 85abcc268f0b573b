#include "gbvp/approx.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "gbvp/functions.hpp"
#include "gbvp/parallel.hpp"

namespace gbvp {

std::vector<ApproximationLevel> default_schedule(int levels) {
    if (levels < 1) throw InvalidArgument("schedule needs at least one level");
    std::vector<ApproximationLevel> out;
    for (int k = 1; k <= levels; ++k) {
        out.push_back({k, 2 * k + 4, 4 * (1 << k), 1 << (2 * k)});
    }
    return out;
}

namespace {

// table[d][j] = P_j^(d)(x) for d <= max_d, j <= degree.
std::vector<std::vector<double>> legendre_table(double x, int degree, int max_d) {
    std::vector<std::vector<double>> P(static_cast<std::size_t>(max_d) + 1,
                                       std::vector<double>(static_cast<std::size_t>(degree) + 1, 0.0));
    P[0][0] = 1.0;
    if (degree >= 1) {
        P[0][1] = x;
        if (max_d >= 1) P[1][1] = 1.0;
    }
    for (int j = 1; j < degree; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        for (int d = 0; d <= max_d; ++d) {
            const auto du = static_cast<std::size_t>(d);
            double v = (2.0 * j + 1.0) * x * P[du][ju];
            if (d > 0) v += (2.0 * j + 1.0) * d * P[du - 1][ju];
            v -= j * P[du][ju - 1];
            P[du][ju + 1] = v / (j + 1.0);
        }
    }
    return P;
}

}  // namespace

PolynomialFit polynomial_fit(const CoefficientFunction& coef, int degree, const Grid& grid, double p, int n) {
    if (n < 0 || degree < n) throw InvalidArgument("polynomial_fit needs degree >= n >= 0");
    if (coef.max_order() < n) throw InvalidArgument("coefficient lacks derivatives up to order n");
    const double a = grid.a();
    const double b = grid.b();
    const double scale = 2.0 / grid.length();
    const auto count = static_cast<Eigen::Index>(grid.size());
    const int basis = degree + 1;
    const auto w = quadrature_weights(grid.size(), grid.step());

    Eigen::MatrixXd design((n + 1) * count, basis);
    for (Eigen::Index i = 0; i < count; ++i) {
        const double t = grid.node(static_cast<std::size_t>(i));
        const auto P = legendre_table((2.0 * t - a - b) / (b - a), degree, n);
        const double sw = std::sqrt(w[static_cast<std::size_t>(i)]);
        for (int d = 0; d <= n; ++d) {
            for (int j = 0; j < basis; ++j) {
                design(d * count + i, j) = sw * std::pow(scale, d) * P[static_cast<std::size_t>(d)][static_cast<std::size_t>(j)];
            }
        }
    }
    const GridFunction samples = sample(coef, grid, n);
    const Eigen::Index rows = coef.rows();
    const Eigen::Index cols = coef.cols();
    Eigen::MatrixXd target((n + 1) * count, 2 * rows * cols);
    for (int d = 0; d <= n; ++d) {
        for (Eigen::Index i = 0; i < count; ++i) {
            const double sw = std::sqrt(w[static_cast<std::size_t>(i)]);
            const auto v = samples.at(d, static_cast<std::size_t>(i));
            for (Eigen::Index e = 0; e < rows * cols; ++e) {
                const cplx z = v(e % rows, e / rows);
                target(d * count + i, 2 * e) = sw * z.real();
                target(d * count + i, 2 * e + 1) = sw * z.imag();
            }
        }
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(basis, basis).triangularView<Eigen::Upper>();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : kInfinity;
    if (!(cond <= kMaxFitCondition)) {
        std::ostringstream os;
        os << "polynomial fit of degree " << degree << " is ill-conditioned (condition " << cond
           << "); lower the degree";
        throw NumericalError(os.str());
    }
    const Eigen::MatrixXd sol = qr.solve(target);

    std::vector<Mat> coeffs(static_cast<std::size_t>(basis), Mat::Zero(rows, cols));
    for (int j = 0; j < basis; ++j) {
        for (Eigen::Index e = 0; e < rows * cols; ++e) {
            coeffs[static_cast<std::size_t>(j)](e % rows, e / rows) = cplx{sol(j, 2 * e), sol(j, 2 * e + 1)};
        }
    }
    CoefficientFunction fit(rows, cols, kAnyOrder, [coeffs, degree, a, b, scale, rows, cols](double t, int d) {
        Mat out = Mat::Zero(rows, cols);
        if (d > degree) return out;
        const auto P = legendre_table((2.0 * t - a - b) / (b - a), degree, d);
        const double factor = std::pow(scale, d);
        for (int j = 0; j <= degree; ++j) {
            out += (factor * P[static_cast<std::size_t>(d)][static_cast<std::size_t>(j)]) * coeffs[static_cast<std::size_t>(j)];
        }
        return out;
    });
    const double error = sobolev_norm(sample(fit, grid, n) - samples, n, p);
    return {std::move(fit), error, degree};
}

GridFunction fejer_mean(const GridFunction& f, int K) {
    if (K < 1) throw InvalidArgument("Fejer order K must be >= 1");
    const Grid& grid = f.grid();
    const std::size_t count = grid.size();
    const auto w = quadrature_weights(count, grid.step());
    std::vector<cplx> rot(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * (grid.node(i) - grid.a()) / grid.length();
        rot[i] = std::polar(1.0, theta);
    }
    GridFunction out(grid, f.rows(), f.cols(), 0);
    std::vector<cplx> power(count);
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        for (Eigen::Index r = 0; r < f.rows(); ++r) {
            std::vector<cplx> acc(count, cplx{});
            // Harmonics j and -j together: e^{ij theta} built by repeated rotation.
            std::fill(power.begin(), power.end(), cplx{1.0, 0.0});
            for (int j = 0; j < K; ++j) {
                cplx plus{}, minus{};
                for (std::size_t i = 0; i < count; ++i) {
                    const cplx v = w[i] * f(0, i, r, c);
                    plus += v * std::conj(power[i]);
                    minus += v * power[i];
                }
                plus /= grid.length();
                minus /= grid.length();
                const double weight = 1.0 - static_cast<double>(j) / K;
                for (std::size_t i = 0; i < count; ++i) {
                    if (j == 0) {
                        acc[i] += weight * plus;
                    } else {
                        acc[i] += weight * (plus * power[i] + minus * std::conj(power[i]));
                    }
                }
                for (std::size_t i = 0; i < count; ++i) power[i] *= rot[i];
            }
            for (std::size_t i = 0; i < count; ++i) out(0, i, r, c) = acc[i];
        }
    }
    return out;
}

std::vector<double> uniform_partition(const Grid& grid, int pieces) {
    if (pieces < 1) throw InvalidArgument("partition needs at least one piece");
    std::vector<double> pts;
    const auto M = static_cast<std::size_t>(pieces);
    for (std::size_t j = 0; j <= M; ++j) {
        if (grid.intervals() % M == 0) {
            pts.push_back(grid.node(j * (grid.intervals() / M)));
        } else {
            pts.push_back(grid.a() + grid.length() * static_cast<double>(j) / static_cast<double>(M));
        }
    }
    return pts;
}

namespace {

void check_partition(const std::vector<double>& partition, double a, double b) {
    if (partition.size() < 2) throw InvalidArgument("partition needs at least two points");
    const double slack = 1e-12 * (b - a);
    if (std::abs(partition.front() - a) > slack || std::abs(partition.back() - b) > slack) {
        throw InvalidArgument("partition must start at a and end at b");
    }
    for (std::size_t j = 1; j < partition.size(); ++j) {
        if (!(partition[j - 1] < partition[j])) throw InvalidArgument("partition has an empty piece");
    }
}

}  // namespace

StepProjection step_project(const Density& phi, const std::vector<double>& partition, const Grid& grid,
                            double q) {
    check_partition(partition, grid.a(), grid.b());
    std::vector<Mat> pieces;
    for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
        const double u = partition[j];
        const double v = partition[j + 1];
        const auto panels = static_cast<std::size_t>(std::max(2.0, std::round((v - u) / grid.step())));
        pieces.push_back(phi.integral(u, v, panels) / (v - u));
    }
    StepMatrixFunction step(partition, std::move(pieces));
    const double error = (Density(step) - phi).lp_norm(grid, q);
    return {std::move(step), error};
}

StepProjection step_project(const GridFunction& phi, const std::vector<double>& partition, double q) {
    const Grid& grid = phi.grid();
    check_partition(partition, grid.a(), grid.b());
    std::vector<Mat> pieces;
    for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
        const auto i0 = grid.node_index(partition[j], "partition point");
        const auto i1 = grid.node_index(partition[j + 1], "partition point");
        Mat avg(phi.rows(), phi.cols());
        for (Eigen::Index c = 0; c < phi.cols(); ++c) {
            for (Eigen::Index r = 0; r < phi.rows(); ++r) {
                const auto vals = phi.component(0, r, c);
                const std::span<const cplx> piece(vals.data() + i0, i1 - i0 + 1);
                avg(r, c) = integrate_samples(piece, grid.step()) / (partition[j + 1] - partition[j]);
            }
        }
        pieces.push_back(std::move(avg));
    }
    StepMatrixFunction step(partition, std::move(pieces));
    const double error = (Density(step) - Density(SampledDensity{phi.truncated(0)})).lp_norm(grid, q);
    return {std::move(step), error};
}

Approximant build_approximant(const BoundaryValueProblem& bvp0, const ApproximationLevel& level, double p,
                              const Grid& grid, const ApproximantOptions& options) {
    bvp0.validate();
    if (p == kInfinity) throw InvalidArgument("the approximation pipeline requires p < infinity");
    const auto* B0 = std::get_if<CanonicalBoundaryOperator>(&bvp0.boundary);
    if (B0 == nullptr) throw InvalidArgument("the approximation pipeline needs a canonical boundary operator");
    const double q = dual_exponent(p);
    const int n = bvp0.system.n;

    Approximant out;
    out.level = level;
    DifferentialSystem sys = bvp0.system;
    for (auto& a : sys.coefficients) {
        auto fit = polynomial_fit(a, level.poly_degree, grid, p, n);
        out.coefficient_error += fit.error;
        a = std::move(fit.function);
    }
    {
        auto fit = polynomial_fit(sys.rhs, level.poly_degree, grid, p, n);
        out.rhs_error = fit.error;
        sys.rhs = std::move(fit.function);
    }

    const auto partition = uniform_partition(grid, level.partition_size);
    DensityRoute route = options.route;
    if (route == DensityRoute::Auto) route = p == 1.0 ? DensityRoute::Fejer : DensityRoute::Direct;
    StepMatrixFunction step = route == DensityRoute::Fejer
                                  ? step_project(fejer_mean(B0->phi.sample(grid), level.fejer_order), partition, q).step
                                  : step_project(B0->phi, partition, grid, q).step;

    const Density diff = Density(step) - B0->phi;
    const double density_norm = diff.lp_norm(grid, q);
    if (p == 1.0) {
        for (const auto& v : diff.primitive(grid)) out.density_error = std::max(out.density_error, v.cwiseAbs().sum());
    } else {
        out.density_error = density_norm;
    }
    out.operator_gap = out.coefficient_error + density_norm;

    out.bvp = BoundaryValueProblem{std::move(sys), to_multipoint(B0->alphas, step, B0->t0), bvp0.c};
    out.verdict = BvpSolver(out.bvp, grid, options.t0, options.tol).verdict();
    return out;
}

PipelineReport pipeline_report(const BoundaryValueProblem& bvp0, const std::vector<ApproximationLevel>& levels,
                               double p, int test_rhs_count, const Grid& grid, std::uint64_t seed,
                               const ApproximantOptions& options) {
    const BvpSolver solver0(bvp0, grid, options.t0, options.tol);
    if (!solver0.verdict().well_posed) throw NumericalError("bvp0 is not well posed");
    const int m = bvp0.system.m;
    const int n = bvp0.system.n;
    const int top = n + bvp0.system.r;
    const GridFunction y0 = solver0.solve();

    struct Rhs {
        ForcingSamples f;
        Vec c;
        double norm;
        GridFunction y0;
    };
    std::vector<Rhs> tests;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> normal;
    for (int k = 0; k < test_rhs_count; ++k) {
        std::vector<ScalarFunction> entries;
        for (int i = 0; i < m; ++i) {
            std::vector<ScalarFunction> terms;
            for (int h = 0; h < 3; ++h) terms.push_back(fn::sine(cplx{normal(rng), normal(rng)}, freq(rng), phase(rng)));
            entries.push_back(fn::sum(std::move(terms)));
        }
        Vec c(m * bvp0.system.r);
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = cplx{normal(rng), normal(rng)};
        ForcingSamples f = solver0.discretized().sample_forcing(vector_function(entries));
        const double norm = sobolev_norm(f.nodes, n, p) + c.norm();
        GridFunction y = solver0.solve(f, c);
        tests.push_back({std::move(f), std::move(c), norm, std::move(y)});
    }

    PipelineReport rep;
    rep.p = p;
    rep.seed = seed;
    rep.sigma_min_0 = solver0.verdict().sigma_min;
    rep.rows = parallel_map(levels.size(), [&](std::size_t li) {
        const Approximant ap = build_approximant(bvp0, levels[li], p, grid, options);
        PipelineRow row;
        row.level = ap.level;
        row.well_posed = ap.verdict.well_posed;
        row.sigma_min = ap.verdict.sigma_min;
        row.coefficient_error = ap.coefficient_error;
        row.density_error = ap.density_error;
        row.operator_gap = ap.operator_gap;
        if (!row.well_posed) return row;
        const BvpSolver solver(ap.bvp, grid, options.t0, options.tol);
        row.solution_error = sobolev_norm(solver.solve() - y0, top, p);
        for (const auto& t : tests) {
            // The same (f, c) is fed to both operators.
            const GridFunction yk = solver.solve(t.f, t.c);
            const double dev = sobolev_norm(yk - t.y0, top, p) / t.norm;
            row.rhs_deviation.push_back(dev);
            row.sup_deviation = std::max(row.sup_deviation, dev);
        }
        return row;
    });
    const bool any = std::any_of(rep.rows.begin(), rep.rows.end(), [](const PipelineRow& r) { return r.well_posed; });
    if (!any) throw NumericalError("no approximation level is well posed");
    return rep;
}

namespace {

// Largest distance from the sample nearest the node, over up to `width` samples.
double oscillation(const std::vector<cplx>& v, std::size_t node, std::size_t width, bool right) {
    double osc = 0.0;
    if (right) {
        if (node + 1 >= v.size()) return -1.0;
        const cplx ref = v[node + 1];
        for (std::size_t j = node + 1; j < v.size() && j <= node + width; ++j) osc = std::max(osc, std::abs(v[j] - ref));
    } else {
        if (node == 0) return -1.0;
        const cplx ref = v[node - 1];
        for (std::size_t j = node; j-- > 0 && node - j <= width;) osc = std::max(osc, std::abs(v[j] - ref));
    }
    return osc;
}

}  // namespace

bool is_regulated(const GridFunction& phi, std::size_t window, double tol) {
    if (window < 4) throw InvalidArgument("regulated-function window must be at least 4 nodes");
    for (Eigen::Index c = 0; c < phi.cols(); ++c) {
        for (Eigen::Index r = 0; r < phi.rows(); ++r) {
            const auto v = phi.component(0, r, c);
            for (std::size_t i = 0; i < v.size(); ++i) {
                bool settled = false;
                for (bool right : {false, true}) {
                    const double wide = oscillation(v, i, window, right);
                    if (wide < 0.0) continue;
                    const double narrow = oscillation(v, i, window / 4, right);
                    if (narrow <= std::max(tol, 0.5 * wide)) settled = true;
                }
                if (!settled) return false;
            }
        }
    }
    return true;
}

}  // namespace gbvp
