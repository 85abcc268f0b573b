#include "gbvp/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gbvp/functions.hpp"

namespace gbvp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f;
}

std::pair<Eigen::Index, Eigen::Index> term_shape(const DensityTerm& term) {
    return std::visit(overloaded{
                          [](const SmoothDensity& d) { return std::pair{d.function.rows(), d.function.cols()}; },
                          [](const SampledDensity& d) { return std::pair{d.samples.rows(), d.samples.cols()}; },
                          [](const StepMatrixFunction& d) { return std::pair{d.rows(), d.cols()}; },
                          [](const TaylorKernel& d) { return std::pair{d.coef.rows(), d.coef.cols()}; },
                      },
                      term);
}

Mat sampled_value(const GridFunction& g, double t) {
    const Grid& grid = g.grid();
    if (t < grid.a() || t > grid.b()) return Mat::Zero(g.rows(), g.cols());
    const double x = (t - grid.a()) / grid.step();
    auto i = static_cast<std::size_t>(std::floor(x));
    i = std::min(i, grid.intervals() - 1);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * g.at(0, i) + w * g.at(0, i + 1);
}

Mat kernel_value(const TaylorKernel& k, double t, Side side) {
    const double lo = std::min(k.t0, k.tau);
    const double hi = std::max(k.t0, k.tau);
    const bool inside = side == Side::Right ? (t >= lo && t < hi) : (t > lo && t <= hi);
    if (!inside) return Mat::Zero(k.coef.rows(), k.coef.cols());
    const int q = k.top - 1 - k.s;
    const double sign = k.tau >= k.t0 ? 1.0 : -1.0;
    return (sign * std::pow(k.tau - t, q) / factorial(q)) * k.coef;
}

Mat term_value(const DensityTerm& term, double t, Side side) {
    return std::visit(overloaded{
                          [&](const SmoothDensity& d) { return d.function(t, 0); },
                          [&](const SampledDensity& d) { return sampled_value(d.samples, t); },
                          [&](const StepMatrixFunction& d) { return d.value(t, side); },
                          [&](const TaylorKernel& d) { return kernel_value(d, t, side); },
                      },
                      term);
}

DensityTerm term_scaled(const DensityTerm& term, cplx factor) {
    return std::visit(overloaded{
                          [&](const SmoothDensity& d) -> DensityTerm { return SmoothDensity{scale(d.function, factor)}; },
                          [&](const SampledDensity& d) -> DensityTerm { return SampledDensity{factor * d.samples}; },
                          [&](const StepMatrixFunction& d) -> DensityTerm { return d.scaled(factor); },
                          [&](const TaylorKernel& d) -> DensityTerm {
                              TaylorKernel k = d;
                              k.coef *= factor;
                              return k;
                          },
                      },
                      term);
}

Mat weighted_sum(const Grid& grid, const GridFunction& y, int top,
                 const std::function<Mat(std::size_t)>& phi_at) {
    const auto w = quadrature_weights(grid.size(), grid.step());
    Mat acc;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Mat term = w[i] * (phi_at(i) * y.at(top, i));
        if (i == 0) acc = term;
        else acc += term;
    }
    return acc;
}

}  // namespace

StepMatrixFunction::StepMatrixFunction(std::vector<double> breakpoints, std::vector<Mat> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.empty() || breakpoints_.size() != pieces_.size() + 1) {
        throw InvalidArgument("step function needs M >= 1 pieces and M + 1 breakpoints");
    }
    for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
        if (!std::isfinite(breakpoints_[j])) throw InvalidArgument("step breakpoints must be finite");
        if (j > 0 && !(breakpoints_[j - 1] < breakpoints_[j])) {
            throw InvalidArgument("step breakpoints must be strictly increasing");
        }
    }
    for (const auto& p : pieces_) {
        if (p.rows() != pieces_.front().rows() || p.cols() != pieces_.front().cols() || p.size() == 0) {
            throw InvalidArgument("step pieces must share one non-empty shape");
        }
    }
}

Mat StepMatrixFunction::value(double t, Side side) const {
    const double lo = breakpoints_.front();
    const double hi = breakpoints_.back();
    const bool inside = side == Side::Right ? (t >= lo && t < hi) : (t > lo && t <= hi);
    if (!inside) return Mat::Zero(rows(), cols());
    const auto it = side == Side::Right ? std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t)
                                        : std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto j = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1;
    return pieces_[j];
}

Mat StepMatrixFunction::jump(std::size_t j) const {
    if (j >= breakpoints_.size()) throw InvalidArgument("breakpoint index out of range");
    return value(breakpoints_[j], Side::Right) - value(breakpoints_[j], Side::Left);
}

StepMatrixFunction StepMatrixFunction::scaled(cplx factor) const {
    std::vector<Mat> p = pieces_;
    for (auto& v : p) v *= factor;
    return StepMatrixFunction(breakpoints_, std::move(p));
}

Density::Density(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw InvalidArgument("density shape must be positive");
}

Density::Density(DensityTerm term) : rows_(0), cols_(0) {
    const auto [r, c] = term_shape(term);
    rows_ = r;
    cols_ = c;
    terms_.push_back(std::move(term));
}

void Density::check_shape(Eigen::Index rows, Eigen::Index cols) const {
    if (rows != rows_ || cols != cols_) {
        std::ostringstream os;
        os << "density term shape " << rows << "x" << cols << " does not match " << rows_ << "x"
           << cols_;
        throw InvalidArgument(os.str());
    }
}

void Density::add(DensityTerm term) {
    const auto [r, c] = term_shape(term);
    check_shape(r, c);
    if (const auto* k = std::get_if<TaylorKernel>(&term)) {
        if (k->s < 0 || k->s >= k->top) throw InvalidArgument("Taylor kernel needs 0 <= s < top");
    }
    terms_.push_back(std::move(term));
}

Density& Density::operator+=(const Density& other) {
    check_shape(other.rows_, other.cols_);
    for (const auto& t : other.terms_) terms_.push_back(t);
    return *this;
}

Density Density::scaled(cplx factor) const {
    Density out(rows_, cols_);
    for (const auto& t : terms_) out.terms_.push_back(term_scaled(t, factor));
    return out;
}

Mat Density::value(double t, Side side) const {
    Mat acc = Mat::Zero(rows_, cols_);
    for (const auto& term : terms_) acc += term_value(term, t, side);
    return acc;
}

std::vector<double> Density::breakpoints() const {
    std::vector<double> pts;
    for (const auto& term : terms_) {
        if (const auto* s = std::get_if<StepMatrixFunction>(&term)) {
            pts.insert(pts.end(), s->breakpoints().begin(), s->breakpoints().end());
        } else if (const auto* k = std::get_if<TaylorKernel>(&term)) {
            pts.push_back(k->t0);
            pts.push_back(k->tau);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

template <class F>
void Density::for_each_panel(double u, double v, std::size_t intervals, F&& visit) const {
    if (!(u < v)) return;
    intervals = std::max<std::size_t>(intervals, 1);
    std::vector<double> pts;
    pts.reserve(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        pts.push_back(u + (v - u) * static_cast<double>(i) / static_cast<double>(intervals));
    }
    pts.back() = v;
    for (double b : breakpoints()) {
        if (b > u && b < v) pts.push_back(b);
    }
    std::sort(pts.begin(), pts.end());
    const double merge = 1e-13 * (v - u);
    std::vector<double> cleaned;
    cleaned.reserve(pts.size());
    for (double x : pts) {
        if (cleaned.empty() || x - cleaned.back() > merge) cleaned.push_back(x);
    }
    cleaned.back() = v;
    for (std::size_t i = 0; i + 1 < cleaned.size(); ++i) {
        const double x0 = cleaned[i];
        const double x1 = cleaned[i + 1];
        visit(x0, x1, value(x0, Side::Right), value(0.5 * (x0 + x1), Side::Right),
              value(x1, Side::Left));
    }
}

double Density::lp_norm(double a, double b, std::size_t intervals, double p) const {
    if (!(p >= 1.0)) throw InvalidArgument("exponent p must satisfy p >= 1");
    if (terms_.empty()) return 0.0;
    Eigen::ArrayXXd acc = Eigen::ArrayXXd::Zero(rows_, cols_);
    const bool inf = p == kInfinity;
    for_each_panel(a, b, intervals, [&](double x0, double x1, const Mat& f0, const Mat& fm, const Mat& f1) {
        if (inf) {
            acc = acc.max(f0.cwiseAbs().array()).max(fm.cwiseAbs().array()).max(f1.cwiseAbs().array());
        } else {
            acc += (x1 - x0) / 6.0 *
                   (f0.cwiseAbs().array().pow(p) + 4.0 * fm.cwiseAbs().array().pow(p) +
                    f1.cwiseAbs().array().pow(p));
        }
    });
    if (inf) return acc.sum();
    return acc.max(0.0).pow(1.0 / p).sum();
}

Mat Density::integral(double u, double v, std::size_t intervals) const {
    Mat acc = Mat::Zero(rows_, cols_);
    for_each_panel(u, v, intervals, [&](double x0, double x1, const Mat& f0, const Mat& fm, const Mat& f1) {
        acc += (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    });
    return acc;
}

std::vector<Mat> Density::primitive(const Grid& grid) const {
    std::vector<Mat> out(grid.size(), Mat::Zero(rows_, cols_));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        out[i + 1] = out[i] + integral(grid.node(i), grid.node(i + 1), 1);
    }
    return out;
}

GridFunction Density::sample(const Grid& grid) const {
    GridFunction g(grid, rows_, cols_, 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        g.at(0, i) = value(grid.node(i), i + 1 == grid.size() ? Side::Left : Side::Right);
    }
    return g;
}

Mat Density::integrate_against(const GridFunction& y, int top) const {
    if (y.rows() != cols_) throw InvalidArgument("density columns must match the function's rows");
    if (top < 1 || y.max_order() < top) {
        throw InvalidArgument("density integration needs derivative order top = n + r");
    }
    const Grid& grid = y.grid();
    Mat acc = Mat::Zero(rows_, y.cols());
    for (const auto& term : terms_) {
        std::visit(
            overloaded{
                [&](const SmoothDensity& d) {
                    acc += weighted_sum(grid, y, top, [&](std::size_t i) { return d.function(grid.node(i), 0); });
                },
                [&](const SampledDensity& d) {
                    if (!(d.samples.grid() == grid)) {
                        throw InvalidArgument("sampled density lives on a different grid");
                    }
                    acc += weighted_sum(grid, y, top, [&](std::size_t i) { return Mat(d.samples.at(0, i)); });
                },
                [&](const StepMatrixFunction& d) {
                    const auto& bp = d.breakpoints();
                    for (std::size_t j = 0; j < d.pieces().size(); ++j) {
                        const double lo = std::max(bp[j], grid.a());
                        const double hi = std::min(bp[j + 1], grid.b());
                        if (!(lo < hi)) continue;
                        const auto i0 = grid.node_index(lo, "step breakpoint");
                        const auto i1 = grid.node_index(hi, "step breakpoint");
                        acc += d.pieces()[j] * (y.at(top - 1, i1) - y.at(top - 1, i0));
                    }
                },
                [&](const TaylorKernel& k) {
                    if (k.top != top) throw InvalidArgument("Taylor kernel order does not match n + r");
                    const auto it = grid.node_index(k.tau, "point condition");
                    const auto i0 = grid.node_index(k.t0, "anchor t0");
                    Mat v = y.at(k.s, it);
                    for (int q = k.s; q < top; ++q) {
                        v -= (std::pow(k.tau - k.t0, q - k.s) / factorial(q - k.s)) * y.at(q, i0);
                    }
                    acc += k.coef * v;
                },
            },
            term);
    }
    return acc;
}

std::optional<StepMatrixFunction> Density::as_step() const {
    std::vector<double> pts;
    for (const auto& term : terms_) {
        const auto* s = std::get_if<StepMatrixFunction>(&term);
        if (s == nullptr) return std::nullopt;
        pts.insert(pts.end(), s->breakpoints().begin(), s->breakpoints().end());
    }
    if (pts.empty()) return std::nullopt;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) return std::nullopt;
    std::vector<Mat> pieces;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) pieces.push_back(value(pts[j], Side::Right));
    return StepMatrixFunction(std::move(pts), std::move(pieces));
}

void CanonicalBoundaryOperator::validate() const {
    if (alphas.empty()) throw InvalidArgument("canonical operator needs n + r >= 1 alpha matrices");
    for (std::size_t s = 0; s < alphas.size(); ++s) {
        if (alphas[s].rows() != phi.rows() || alphas[s].cols() != phi.cols()) {
            throw InvalidArgument("alpha_" + std::to_string(s) + " shape differs from the density shape");
        }
    }
}

void MultipointBoundaryOperator::validate() const {
    if (alphas.empty()) throw InvalidArgument("multipoint operator needs n + r >= 1 alpha matrices");
    for (std::size_t s = 0; s < alphas.size(); ++s) {
        if (alphas[s].rows() != alphas.front().rows() || alphas[s].cols() != alphas.front().cols()) {
            throw InvalidArgument("alpha matrices must share one shape");
        }
    }
    if (points.size() != betas.size()) throw InvalidArgument("need exactly one beta per point");
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (j > 0 && !(points[j - 1] < points[j])) {
            throw InvalidArgument("multipoint points must be strictly increasing");
        }
        if (betas[j].rows() != rows() || betas[j].cols() != cols()) {
            throw InvalidArgument("beta_" + std::to_string(j) + " shape differs from alpha shape");
        }
    }
}

namespace {

Mat alpha_part(const std::vector<Mat>& alphas, double t0, const GridFunction& y) {
    const auto i0 = y.grid().node_index(t0, "anchor t0");
    Mat acc = Mat::Zero(alphas.front().rows(), y.cols());
    for (std::size_t s = 0; s < alphas.size(); ++s) acc += alphas[s] * y.at(static_cast<int>(s), i0);
    return acc;
}

}  // namespace

Mat apply_canonical(const CanonicalBoundaryOperator& B, const GridFunction& y) {
    B.validate();
    if (y.rows() != B.cols()) throw InvalidArgument("boundary operator width must equal m");
    if (y.max_order() < B.top()) throw InvalidArgument("canonical operator needs orders 0..n+r");
    return alpha_part(B.alphas, B.t0, y) + B.phi.integrate_against(y, B.top());
}

Mat apply_multipoint(const MultipointBoundaryOperator& B, const GridFunction& y) {
    B.validate();
    if (y.rows() != B.cols()) throw InvalidArgument("boundary operator width must equal m");
    if (y.max_order() < B.top() - 1) throw InvalidArgument("multipoint operator needs orders 0..n+r-1");
    Mat acc = alpha_part(B.alphas, B.t0, y);
    for (std::size_t j = 0; j < B.points.size(); ++j) {
        const auto i = y.grid().node_index(B.points[j], "multipoint node");
        acc += B.betas[j] * y.at(B.top() - 1, i);
    }
    return acc;
}

Mat apply_boundary(const BoundaryOperator& B, const GridFunction& y) {
    return std::visit(overloaded{
                          [&](const CanonicalBoundaryOperator& b) { return apply_canonical(b, y); },
                          [&](const MultipointBoundaryOperator& b) { return apply_multipoint(b, y); },
                      },
                      B);
}

int boundary_top(const BoundaryOperator& B) {
    return std::visit([](const auto& b) { return b.top(); }, B);
}

Eigen::Index boundary_rows(const BoundaryOperator& B) {
    return std::visit([](const auto& b) { return b.rows(); }, B);
}

Eigen::Index boundary_cols(const BoundaryOperator& B) {
    return std::visit([](const auto& b) { return b.cols(); }, B);
}

MultipointBoundaryOperator to_multipoint(std::vector<Mat> alphas, const StepMatrixFunction& phi,
                                         double t0) {
    MultipointBoundaryOperator out;
    out.t0 = t0;
    out.alphas = std::move(alphas);
    for (std::size_t j = 0; j < phi.breakpoints().size(); ++j) {
        const Mat jump = phi.jump(j);
        if ((jump.array() == cplx{}).all()) continue;
        out.points.push_back(phi.breakpoints()[j]);
        out.betas.push_back(-jump);
    }
    out.validate();
    return out;
}

MultipointBoundaryOperator to_multipoint(const CanonicalBoundaryOperator& B) {
    B.validate();
    if (B.phi.empty()) {
        MultipointBoundaryOperator out{B.t0, B.alphas, {}, {}};
        out.validate();
        return out;
    }
    const auto step = B.phi.as_step();
    if (!step) throw InvalidArgument("to_multipoint requires a step-function density");
    return to_multipoint(B.alphas, *step, B.t0);
}

double norm_bound(const CanonicalBoundaryOperator& B, double gamma, double p, const Grid& grid) {
    if (!(gamma > 0.0)) throw InvalidArgument("embedding constant gamma must be positive");
    B.validate();
    double alpha_max = 0.0;
    for (const auto& a : B.alphas) alpha_max = std::max(alpha_max, a.cwiseAbs().rowwise().sum().maxCoeff());
    return gamma * alpha_max + B.phi.lp_norm(grid, dual_exponent(p));
}

double calibrate_embedding_constant(int top, const Grid& grid, double p, std::uint64_t seed) {
    if (top < 1) throw InvalidArgument("top order must be >= 1");
    const double a = grid.a();
    const double len = grid.length();
    std::vector<ScalarFunction> basis;
    for (int d = 0; d <= top + 3; ++d) {
        std::vector<cplx> c(static_cast<std::size_t>(d) + 1, cplx{});
        c.back() = std::pow(1.0 / len, d);
        basis.push_back(fn::polynomial(c, a));
    }
    for (double k : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double w = 2.0 * 3.14159265358979323846 * k / len;
        basis.push_back(fn::sine(1.0, w, -w * a));
        basis.push_back(fn::cosine(1.0, w, -w * a));
    }
    std::vector<ScalarFunction> tests = basis;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 50; ++k) {
        std::vector<ScalarFunction> terms;
        for (const auto& b : basis) terms.push_back(fn::scaled(b, cplx{normal(rng), normal(rng)}));
        tests.push_back(fn::sum(std::move(terms)));
    }
    double gamma = 0.0;
    for (const auto& g : tests) {
        const GridFunction y = sample(scalar_times_identity(g, 1), grid, top);
        const double norm = sobolev_norm(y, top, p);
        if (!(norm > 0.0)) continue;
        double point = 0.0;
        for (int s = 0; s < top; ++s) point += lp_norm(y, s, kInfinity);
        gamma = std::max(gamma, point / norm);
    }
    return gamma;
}

std::vector<Mat> extract_alphas(const BoundaryFunctional& B, double t0, int top, Eigen::Index m,
                                const Grid& grid) {
    if (top < 1 || m < 1) throw InvalidArgument("extract_alphas needs top >= 1 and m >= 1");
    grid.node_index(t0, "anchor t0");
    std::vector<Mat> alphas;
    for (int s = 0; s < top; ++s) {
        GridFunction mono(grid, m, m, top);
        for (int d = 0; d <= s; ++d) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double v = std::pow(grid.node(i) - t0, s - d) / factorial(s - d);
                mono.at(d, i) = v * Mat::Identity(m, m);
            }
        }
        alphas.push_back(B(mono));
    }
    return alphas;
}

CanonicalBoundaryOperator canonicalize_points(const std::vector<PointCondition>& conditions,
                                              double t0, int top, Eigen::Index rows,
                                              Eigen::Index cols, std::optional<Density> extra_density) {
    if (top < 1) throw InvalidArgument("top order must be >= 1");
    CanonicalBoundaryOperator B;
    B.t0 = t0;
    B.alphas.assign(static_cast<std::size_t>(top), Mat::Zero(rows, cols));
    B.phi = extra_density ? *extra_density : Density(rows, cols);
    for (const auto& c : conditions) {
        if (c.order < 0 || c.order >= top) {
            std::ostringstream os;
            os << "point condition order " << c.order << " must lie in 0.." << top - 1;
            throw InvalidArgument(os.str());
        }
        if (c.coef.rows() != rows || c.coef.cols() != cols) {
            throw InvalidArgument("point condition coefficient has the wrong shape");
        }
        for (int q = c.order; q < top; ++q) {
            B.alphas[static_cast<std::size_t>(q)] +=
                (std::pow(c.tau - t0, q - c.order) / factorial(q - c.order)) * c.coef;
        }
        if (c.tau != t0) B.phi.add(TaylorKernel{t0, c.tau, c.order, top, c.coef});
    }
    B.validate();
    return B;
}

}  // namespace gbvp
