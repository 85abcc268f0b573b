#include "gbvp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gbvp {

Grid::Grid(double a, double b, std::size_t intervals) : a_(a), b_(b), intervals_(intervals) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw InvalidArgument("grid requires finite endpoints with a < b");
    }
    if (intervals < 2 || intervals % 2 != 0) {
        throw InvalidArgument("grid interval count must be even and at least 2");
    }
}

bool Grid::contains(double t) const {
    const double slack = 1e-12 * (b_ - a_);
    return t >= a_ - slack && t <= b_ + slack;
}

std::optional<std::size_t> Grid::find_node(double t, double rel_tol) const {
    if (!contains(t)) return std::nullopt;
    const double x = (t - a_) / step();
    const double idx = std::round(x);
    if (std::abs(t - node(static_cast<std::size_t>(idx))) > rel_tol * (b_ - a_)) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(idx);
}

std::size_t Grid::node_index(double t, const char* what) const {
    auto idx = find_node(t);
    if (!idx) {
        std::ostringstream os;
        os << what << " t=" << t << " is not a node of the grid [" << a_ << ", " << b_
           << "] with N=" << intervals_;
        throw InvalidArgument(os.str());
    }
    return *idx;
}

std::vector<double> quadrature_weights(std::size_t count, double h) {
    std::vector<double> w(count, 0.0);
    if (count < 2) return w;
    const std::size_t n = count - 1;
    if (n == 1) {
        w[0] = w[1] = h / 2.0;
        return w;
    }
    const std::size_t simpson_end = (n % 2 == 0) ? n : n - 3;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (n % 2 != 0) {
        const std::size_t j = simpson_end;
        w[j] += 3.0 * h / 8.0;
        w[j + 1] += 9.0 * h / 8.0;
        w[j + 2] += 9.0 * h / 8.0;
        w[j + 3] += 3.0 * h / 8.0;
    }
    return w;
}

namespace {

template <class T>
T integrate_impl(std::span<const T> values, double h) {
    const std::size_t count = values.size();
    if (count < 2) return T{};
    const std::size_t n = count - 1;
    if (n == 1) return (values[0] + values[1]) * (h / 2.0);
    const std::size_t simpson_end = (n % 2 == 0) ? n : n - 3;
    T odd{}, even{};
    for (std::size_t i = 1; i < simpson_end; i += 2) odd += values[i];
    for (std::size_t i = 2; i < simpson_end; i += 2) even += values[i];
    T total = (values[0] + values[simpson_end] + 4.0 * odd + 2.0 * even) * (h / 3.0);
    if (n % 2 != 0) {
        const std::size_t j = simpson_end;
        total += (values[j] + 3.0 * values[j + 1] + 3.0 * values[j + 2] + values[j + 3]) *
                 (3.0 * h / 8.0);
    }
    return total;
}

}  // namespace

double integrate_samples(std::span<const double> values, double h) {
    return integrate_impl(values, h);
}

cplx integrate_samples(std::span<const cplx> values, double h) {
    return integrate_impl(values, h);
}

GridFunction::GridFunction(Grid grid, Eigen::Index rows, Eigen::Index cols, int max_order)
    : grid_(grid), rows_(rows), cols_(cols), max_order_(max_order) {
    if (rows < 1 || cols < 1) throw InvalidArgument("grid function shape must be positive");
    if (max_order < 0) throw InvalidArgument("grid function max_order must be >= 0");
    block_ = static_cast<std::size_t>(rows * cols);
    data_.assign(static_cast<std::size_t>(max_order + 1) * grid_.size() * block_, cplx{});
}

std::vector<cplx> GridFunction::component(int order, Eigen::Index row, Eigen::Index col) const {
    if (order < 0 || order > max_order_) throw InvalidArgument("derivative order out of range");
    std::vector<cplx> out(grid_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(order, i, row, col);
    return out;
}

GridFunction GridFunction::truncated(int order) const {
    if (order < 0 || order > max_order_) throw InvalidArgument("derivative order out of range");
    return resized(order);
}

GridFunction GridFunction::resized(int max_order) const {
    GridFunction out(grid_, rows_, cols_, max_order);
    const std::size_t keep = static_cast<std::size_t>(std::min(max_order, max_order_) + 1) *
                             grid_.size() * block_;
    std::copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(keep), out.data_.begin());
    return out;
}

GridFunction GridFunction::column(Eigen::Index col) const {
    if (col < 0 || col >= cols_) throw InvalidArgument("column index out of range");
    GridFunction out(grid_, rows_, 1, max_order_);
    for (int d = 0; d <= max_order_; ++d) {
        for (std::size_t i = 0; i < grid_.size(); ++i) out.at(d, i) = at(d, i).col(col);
    }
    return out;
}

std::optional<std::pair<int, std::size_t>> GridFunction::first_non_finite() const {
    for (int d = 0; d <= max_order_; ++d) {
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (!at(d, i).allFinite()) return std::make_pair(d, i);
        }
    }
    return std::nullopt;
}

void GridFunction::check_compatible(const GridFunction& other) const {
    if (!(grid_ == other.grid_) || rows_ != other.rows_ || cols_ != other.cols_ ||
        max_order_ != other.max_order_) {
        throw InvalidArgument("grid functions differ in grid, shape or order stack");
    }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    check_compatible(other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    check_compatible(other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

GridFunction& GridFunction::operator*=(cplx scale) {
    for (auto& v : data_) v *= scale;
    return *this;
}

CoefficientFunction::CoefficientFunction(Eigen::Index rows, Eigen::Index cols, int max_order,
                                         Evaluator evaluator)
    : rows_(rows), cols_(cols), max_order_(max_order), evaluator_(std::move(evaluator)) {
    if (rows < 1 || cols < 1) throw InvalidArgument("coefficient shape must be positive");
    if (max_order < 0) throw InvalidArgument("coefficient max_order must be >= 0");
    if (!evaluator_) throw InvalidArgument("coefficient evaluator is empty");
}

CoefficientFunction CoefficientFunction::zero(Eigen::Index rows, Eigen::Index cols) {
    return CoefficientFunction(rows, cols, kAnyOrder,
                               [rows, cols](double, int) { return Mat::Zero(rows, cols).eval(); });
}

CoefficientFunction CoefficientFunction::constant(const Mat& value) {
    const Mat v = value;
    return CoefficientFunction(v.rows(), v.cols(), kAnyOrder, [v](double, int order) {
        return order == 0 ? v : Mat::Zero(v.rows(), v.cols()).eval();
    });
}

Mat CoefficientFunction::operator()(double t, int order) const {
    if (order < 0 || order > max_order_) {
        std::ostringstream os;
        os << "derivative order " << order << " exceeds coefficient max_order " << max_order_;
        throw InvalidArgument(os.str());
    }
    Mat v = evaluator_(t, order);
    if (v.rows() != rows_ || v.cols() != cols_) {
        throw InvalidArgument("coefficient evaluator returned a matrix of the wrong shape");
    }
    return v;
}

GridFunction sample(const CoefficientFunction& coef, const Grid& grid, int up_to) {
    if (up_to < 0 || up_to > coef.max_order()) {
        throw InvalidArgument("sample order exceeds the coefficient's available derivatives");
    }
    GridFunction out(grid, coef.rows(), coef.cols(), up_to);
    for (int d = 0; d <= up_to; ++d) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.node(i);
            Mat v = coef(t, d);
            if (!v.allFinite()) {
                std::ostringstream os;
                os << "coefficient evaluation failed (non-finite) at node " << i << ", t=" << t
                   << ", derivative order " << d;
                throw NumericalError(os.str());
            }
            out.at(d, i) = v;
        }
    }
    return out;
}

double component_lp_norm(std::span<const cplx> values, double h, double p) {
    if (p == kInfinity) {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
    std::vector<double> powered(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) powered[i] = std::pow(std::abs(values[i]), p);
    const double integral = integrate_samples(std::span<const double>(powered), h);
    return std::pow(std::max(integral, 0.0), 1.0 / p);
}

double lp_norm(const GridFunction& f, int order, double p) {
    if (order < 0 || order > f.max_order()) throw InvalidArgument("derivative order out of range");
    if (!(p >= 1.0)) throw InvalidArgument("exponent p must satisfy p >= 1");
    double total = 0.0;
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        for (Eigen::Index r = 0; r < f.rows(); ++r) {
            const auto values = f.component(order, r, c);
            total += component_lp_norm(values, f.grid().step(), p);
        }
    }
    return total;
}

double sobolev_norm(const GridFunction& f, int order, double p) {
    if (order < 0 || order > f.max_order()) throw InvalidArgument("derivative order out of range");
    double total = 0.0;
    for (int s = 0; s <= order; ++s) total += lp_norm(f, s, p);
    return total;
}

}  // namespace gbvp
