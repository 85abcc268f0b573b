#include "gbvp/ode.hpp"

#include <algorithm>
#include <sstream>

namespace gbvp {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
    return b;
}

void DifferentialSystem::validate() const {
    if (m < 1 || r < 1 || n < 0) throw InvalidArgument("system requires m >= 1, r >= 1, n >= 0");
    if (static_cast<int>(coefficients.size()) != r) {
        std::ostringstream os;
        os << "system of order r=" << r << " needs exactly " << r << " coefficients, got "
           << coefficients.size();
        throw InvalidArgument(os.str());
    }
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        const auto& a = coefficients[j];
        if (a.rows() != m || a.cols() != m) {
            throw InvalidArgument("coefficient A_" + std::to_string(j) + " must be m x m");
        }
        if (a.max_order() < n) {
            throw InvalidArgument("coefficient A_" + std::to_string(j) +
                                  " lacks derivatives up to order n");
        }
    }
    if (rhs.rows() != m || rhs.cols() != 1) throw InvalidArgument("right-hand side must be m x 1");
    if (rhs.max_order() < n) throw InvalidArgument("right-hand side lacks derivatives up to order n");
}

Mat companion(const DifferentialSystem& system, double t) {
    system.validate();
    const Eigen::Index m = system.m;
    const Eigen::Index rm = m * system.r;
    Mat k = Mat::Zero(rm, rm);
    for (int j = 0; j + 1 < system.r; ++j) {
        k.block(j * m, (j + 1) * m, m, m) = -Mat::Identity(m, m);
    }
    for (int j = 0; j < system.r; ++j) {
        k.block((system.r - 1) * m, j * m, m, m) = system.coefficients[static_cast<std::size_t>(j)](t, 0);
    }
    return k;
}

Mat FundamentalSystem::wronskian(std::size_t node) const {
    const int r = order_count();
    if (r == 0) throw InvalidArgument("empty fundamental system");
    const Eigen::Index m = blocks.front().rows();
    Mat w(r * m, r * m);
    for (int k = 0; k < r; ++k) {
        for (int j = 0; j < r; ++j) {
            w.block(j * m, k * m, m, m) = blocks[static_cast<std::size_t>(k)].at(j, node);
        }
    }
    return w;
}

namespace {

double half_point(const Grid& grid, std::size_t h) {
    if (h % 2 == 0) return grid.node(h / 2);
    return 0.5 * (grid.node(h / 2) + grid.node(h / 2 + 1));
}

}  // namespace

DiscretizedSystem::DiscretizedSystem(DifferentialSystem system, const Grid& grid)
    : system_(std::move(system)),
      grid_(grid),
      forcing_{{}, GridFunction(grid, 1, 1, 0)} {
    system_.validate();
    const Eigen::Index m = system_.m;
    const int r = system_.r;
    coefficient_nodes_.reserve(static_cast<std::size_t>(r));
    for (const auto& a : system_.coefficients) coefficient_nodes_.push_back(sample(a, grid_, system_.n));

    const std::size_t half_count = 2 * grid_.intervals() + 1;
    companion_half_.resize(half_count);
    Mat k = Mat::Zero(m * r, m * r);
    for (int j = 0; j + 1 < r; ++j) k.block(j * m, (j + 1) * m, m, m) = -Mat::Identity(m, m);
    for (std::size_t h = 0; h < half_count; ++h) {
        for (int j = 0; j < r; ++j) {
            if (h % 2 == 0) {
                k.block((r - 1) * m, j * m, m, m) = coefficient(j, 0, h / 2);
            } else {
                const double t = half_point(grid_, h);
                Mat a = system_.coefficients[static_cast<std::size_t>(j)](t, 0);
                if (!a.allFinite()) {
                    std::ostringstream os;
                    os << "coefficient A_" << j << " is non-finite at t=" << t;
                    throw NumericalError(os.str());
                }
                k.block((r - 1) * m, j * m, m, m) = a;
            }
        }
        companion_half_[h] = k;
    }
    forcing_ = sample_forcing(system_.rhs);
}

ForcingSamples DiscretizedSystem::sample_forcing(const CoefficientFunction& f) const {
    if (f.rows() != system_.m || f.cols() != 1) throw InvalidArgument("right-hand side must be m x 1");
    if (f.max_order() < system_.n) {
        throw InvalidArgument("right-hand side lacks derivatives up to order n");
    }
    ForcingSamples out{{}, sample(f, grid_, system_.n)};
    const std::size_t half_count = 2 * grid_.intervals() + 1;
    out.half_steps.resize(half_count);
    for (std::size_t h = 0; h < half_count; ++h) {
        if (h % 2 == 0) {
            out.half_steps[h] = out.nodes.at(0, h / 2);
        } else {
            const double t = half_point(grid_, h);
            Vec v = f(t, 0);
            if (!v.allFinite()) {
                std::ostringstream os;
                os << "right-hand side is non-finite at t=" << t;
                throw NumericalError(os.str());
            }
            out.half_steps[h] = v;
        }
    }
    return out;
}

std::vector<Mat> DiscretizedSystem::propagate(const Mat& anchor_state, std::size_t anchor,
                                              const ForcingSamples* forcing) const {
    const Eigen::Index m = system_.m;
    const Eigen::Index rm = m * system_.r;
    if (anchor_state.rows() != rm) throw InvalidArgument("anchor state must have r*m rows");
    if (forcing != nullptr && anchor_state.cols() != 1) {
        throw InvalidArgument("forced propagation needs a single state column");
    }
    if (anchor >= grid_.size()) throw InvalidArgument("anchor node out of range");

    const auto field = [&](std::size_t h, const Mat& x) {
        Mat dx = -companion_half_[h] * x;
        if (forcing != nullptr) dx.bottomRows(m) += forcing->half_steps[h];
        return dx;
    };
    const auto check = [&](const Mat& x, std::size_t node) {
        if (!x.allFinite()) {
            std::ostringstream os;
            os << "integration blew up at node " << node << " (t=" << grid_.node(node) << ")";
            throw NumericalError(os.str());
        }
    };

    std::vector<Mat> states(grid_.size());
    states[anchor] = anchor_state;
    check(anchor_state, anchor);
    const double h = grid_.step();
    for (std::size_t i = anchor; i < grid_.intervals(); ++i) {
        const Mat& x = states[i];
        const Mat k1 = field(2 * i, x);
        const Mat k2 = field(2 * i + 1, x + 0.5 * h * k1);
        const Mat k3 = field(2 * i + 1, x + 0.5 * h * k2);
        const Mat k4 = field(2 * i + 2, x + h * k3);
        states[i + 1] = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check(states[i + 1], i + 1);
    }
    for (std::size_t i = anchor; i > 0; --i) {
        const Mat& x = states[i];
        const Mat k1 = field(2 * i, x);
        const Mat k2 = field(2 * i - 1, x - 0.5 * h * k1);
        const Mat k3 = field(2 * i - 1, x - 0.5 * h * k2);
        const Mat k4 = field(2 * i - 2, x - h * k3);
        states[i - 1] = x - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check(states[i - 1], i - 1);
    }
    return states;
}

GridFunction DiscretizedSystem::assemble(const std::vector<Mat>& states,
                                         const ForcingSamples* forcing) const {
    if (states.size() != grid_.size()) throw InvalidArgument("state count must match the grid");
    const Eigen::Index m = system_.m;
    const Eigen::Index k = states.front().cols();
    GridFunction y(grid_, m, k, system_.r - 1);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        for (int j = 0; j < system_.r; ++j) y.at(j, i) = states[i].middleRows(j * m, m);
    }
    return lift(y, forcing);
}

GridFunction DiscretizedSystem::lift(const GridFunction& y, const ForcingSamples* forcing) const {
    const int r = system_.r;
    const int top = system_.n + r;
    if (y.rows() != system_.m) throw InvalidArgument("lift: function must have m rows");
    if (!(y.grid() == grid_)) throw InvalidArgument("lift: function lives on a different grid");
    if (y.max_order() < r - 1) throw InvalidArgument("lift: needs orders 0..r-1");
    if (y.max_order() >= top) return y;

    GridFunction out = y.resized(top);
    const int first = y.max_order() + 1;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        for (int q = first; q <= top; ++q) {
            const int s = q - r;
            Mat value = Mat::Zero(out.rows(), out.cols());
            if (forcing != nullptr) value.colwise() += Vec(forcing->nodes.at(s, i));
            for (int j = 0; j < r; ++j) {
                for (int d = 0; d <= s; ++d) {
                    value -= binomial(s, d) * coefficient(j, d, i) * out.at(j + s - d, i);
                }
            }
            out.at(q, i) = value;
        }
    }
    return out;
}

GridFunction DiscretizedSystem::residual(const GridFunction& y, const ForcingSamples* forcing) const {
    const int r = system_.r;
    const int n = system_.n;
    if (y.rows() != system_.m) throw InvalidArgument("residual: function must have m rows");
    if (!(y.grid() == grid_)) throw InvalidArgument("residual: function lives on a different grid");
    if (y.max_order() < n + r) throw InvalidArgument("residual: needs derivative orders 0..n+r");
    GridFunction out(grid_, y.rows(), y.cols(), n);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        for (int s = 0; s <= n; ++s) {
            Mat value = y.at(r + s, i);
            for (int j = 0; j < r; ++j) {
                for (int d = 0; d <= s; ++d) {
                    value += binomial(s, d) * coefficient(j, d, i) * y.at(j + s - d, i);
                }
            }
            if (forcing != nullptr) value.colwise() -= Vec(forcing->nodes.at(s, i));
            out.at(s, i) = value;
        }
    }
    return out;
}

GridFunction DiscretizedSystem::cauchy(std::span<const Vec> init, const ForcingSamples& forcing) const {
    const Eigen::Index m = system_.m;
    if (static_cast<int>(init.size()) != system_.r) {
        throw InvalidArgument("Cauchy problem needs exactly r initial vectors");
    }
    Mat x0(m * system_.r, 1);
    for (int j = 0; j < system_.r; ++j) {
        if (init[static_cast<std::size_t>(j)].size() != m) {
            throw InvalidArgument("initial vectors must have m components");
        }
        x0.middleRows(j * m, m) = init[static_cast<std::size_t>(j)];
    }
    return assemble(propagate(x0, 0, &forcing), &forcing);
}

FundamentalSystem DiscretizedSystem::fundamental(double t0) const {
    const Eigen::Index m = system_.m;
    const int r = system_.r;
    const std::size_t anchor = grid_.node_index(t0, "fundamental system anchor");
    const GridFunction full =
        assemble(propagate(Mat::Identity(m * r, m * r), anchor, nullptr), nullptr);
    FundamentalSystem fs;
    fs.t0 = grid_.node(anchor);
    fs.anchor = anchor;
    for (int k = 0; k < r; ++k) {
        GridFunction block(grid_, m, m, full.max_order());
        for (int d = 0; d <= full.max_order(); ++d) {
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                block.at(d, i) = full.at(d, i).middleCols(k * m, m);
            }
        }
        fs.blocks.push_back(std::move(block));
    }
    return fs;
}

GridFunction solve_cauchy(const DifferentialSystem& system, std::span<const Vec> init,
                          const Grid& grid) {
    const DiscretizedSystem ds(system, grid);
    return ds.cauchy(init, ds.own_forcing());
}

GridFunction lift_derivatives(const DifferentialSystem& system, const GridFunction& y,
                              Forcing forcing) {
    const DiscretizedSystem ds(system, y.grid());
    return ds.lift(y, forcing == Forcing::Inhomogeneous ? &ds.own_forcing() : nullptr);
}

FundamentalSystem fundamental_system(const DifferentialSystem& system, double t0,
                                     const Grid& grid) {
    if (!grid.contains(t0)) throw InvalidArgument("anchor t0 must lie in [a, b]");
    return DiscretizedSystem(system, grid).fundamental(t0);
}

GridFunction general_solution(const FundamentalSystem& fs, std::span<const Vec> q) {
    if (fs.blocks.empty()) throw InvalidArgument("empty fundamental system");
    if (q.size() != fs.blocks.size()) throw InvalidArgument("need one vector q_k per block Y_k");
    const auto& first = fs.blocks.front();
    for (const auto& v : q) {
        if (v.size() != first.cols()) throw InvalidArgument("q_k block size must equal m");
    }
    GridFunction y(first.grid(), first.rows(), 1, first.max_order());
    for (int d = 0; d <= first.max_order(); ++d) {
        for (std::size_t i = 0; i < first.grid().size(); ++i) {
            Vec acc = Vec::Zero(first.rows());
            for (std::size_t k = 0; k < fs.blocks.size(); ++k) acc += fs.blocks[k].at(d, i) * q[k];
            y.at(d, i) = acc;
        }
    }
    return y;
}

CoefficientFunction apply_operator(const DifferentialSystem& system, const CoefficientFunction& y,
                                   Forcing forcing) {
    system.validate();
    if (y.rows() != system.m) throw InvalidArgument("apply_operator: function must have m rows");
    if (y.max_order() < system.r) throw InvalidArgument("apply_operator: needs derivatives to order r");
    int order = y.max_order() == kAnyOrder ? kAnyOrder : y.max_order() - system.r;
    for (const auto& a : system.coefficients) order = std::min(order, a.max_order());
    if (forcing == Forcing::Inhomogeneous) order = std::min(order, system.rhs.max_order());
    const bool with_rhs = forcing == Forcing::Inhomogeneous;
    return CoefficientFunction(y.rows(), y.cols(), order, [system, y, with_rhs](double t, int s) {
        Mat value = y(t, system.r + s);
        for (int j = 0; j < system.r; ++j) {
            for (int d = 0; d <= s; ++d) {
                value += binomial(s, d) * system.coefficients[static_cast<std::size_t>(j)](t, d) *
                         y(t, j + s - d);
            }
        }
        if (with_rhs) value.colwise() -= Vec(system.rhs(t, s));
        return value;
    });
}

}  // namespace gbvp
