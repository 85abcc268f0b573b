#include "gbvp/bvp.hpp"

#include <sstream>

namespace gbvp {

void BoundaryValueProblem::validate() const {
    system.validate();
    std::visit([](const auto& b) { b.validate(); }, boundary);
    const Eigen::Index ell = static_cast<Eigen::Index>(system.r) * system.m;
    if (boundary_rows(boundary) != ell) {
        std::ostringstream os;
        os << "boundary operator has " << boundary_rows(boundary) << " rows, expected r*m = " << ell;
        throw InvalidArgument(os.str());
    }
    if (boundary_cols(boundary) != system.m) throw InvalidArgument("boundary operator width must equal m");
    if (boundary_top(boundary) != system.n + system.r) {
        std::ostringstream os;
        os << "boundary operator has " << boundary_top(boundary) << " alpha matrices, expected n+r = "
           << system.n + system.r;
        throw InvalidArgument(os.str());
    }
    if (c.size() != ell) throw InvalidArgument("boundary data c must have r*m entries");
}

Mat characteristic_matrix(const BoundaryOperator& boundary, const FundamentalSystem& fs) {
    if (fs.blocks.empty()) throw InvalidArgument("empty fundamental system");
    const Eigen::Index m = fs.blocks.front().rows();
    const Eigen::Index ell = boundary_rows(boundary);
    Mat M(ell, m * fs.order_count());
    for (int k = 0; k < fs.order_count(); ++k) {
        M.middleCols(k * m, m) = apply_boundary(boundary, fs.blocks[static_cast<std::size_t>(k)]);
    }
    return M;
}

Mat characteristic_matrix(const DifferentialSystem& system, const BoundaryOperator& boundary,
                          double t0, const Grid& grid) {
    return characteristic_matrix(boundary, fundamental_system(system, t0, grid));
}

WellPosednessVerdict well_posedness(const Mat& M, double tol) {
    if (M.rows() != M.cols() || M.rows() == 0) throw InvalidArgument("characteristic matrix must be square");
    WellPosednessVerdict v;
    v.char_matrix = M;
    v.tol = tol;
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& s = svd.singularValues();
    v.sigma_max = s(0);
    v.sigma_min = s(s.size() - 1);
    v.det = M.determinant();
    const double threshold = tol * std::max(v.sigma_max, 1.0);
    v.well_posed = v.sigma_min > threshold;
    v.ill_conditioned = v.well_posed && v.sigma_min <= 10.0 * threshold;
    return v;
}

BvpSolver::BvpSolver(const BoundaryValueProblem& bvp, const Grid& grid, std::optional<double> t0,
                     double tol)
    : bvp_(bvp) {
    bvp_.validate();
    system_ = std::make_shared<const DiscretizedSystem>(bvp_.system, grid);
    const double anchor = t0.value_or(grid.a());
    if (!grid.contains(anchor)) throw InvalidArgument("anchor t0 must lie in [a, b]");
    fs_ = system_->fundamental(anchor);
    verdict_ = well_posedness(characteristic_matrix(bvp_.boundary, fs_), tol);
    if (verdict_.well_posed) factor_.compute(verdict_.char_matrix);
}

GridFunction BvpSolver::solve() const { return solve(system_->own_forcing(), bvp_.c); }

GridFunction BvpSolver::solve(const CoefficientFunction& f, const Vec& c) const {
    return solve(system_->sample_forcing(f), c);
}

GridFunction BvpSolver::solve(const ForcingSamples& f, const Vec& c) const {
    if (!verdict_.well_posed) {
        std::ostringstream os;
        os << "problem is not well posed: sigma_min=" << verdict_.sigma_min
           << ", sigma_max=" << verdict_.sigma_max;
        throw NumericalError(os.str());
    }
    const Eigen::Index m = bvp_.system.m;
    if (c.size() != verdict_.char_matrix.rows()) throw InvalidArgument("boundary data c must have r*m entries");
    std::vector<Vec> zero(static_cast<std::size_t>(bvp_.system.r), Vec::Zero(m));
    GridFunction y = system_->cauchy(zero, f);
    const Vec rhs = c - apply_boundary(bvp_.boundary, y);
    const Vec q = factor_.solve(rhs);
    std::vector<Vec> blocks;
    for (int k = 0; k < bvp_.system.r; ++k) blocks.push_back(q.segment(k * m, m));
    y += general_solution(fs_, blocks);
    if (const auto bad = y.first_non_finite()) {
        std::ostringstream os;
        os << "solution is non-finite at node " << bad->second << ", order " << bad->first;
        throw NumericalError(os.str());
    }
    return y;
}

GridFunction solve(const BoundaryValueProblem& bvp, double t0, const Grid& grid) {
    return BvpSolver(bvp, grid, t0).solve();
}

double discrepancy(const DiscretizedSystem& system, const ForcingSamples& f,
                   const BoundaryOperator& boundary, const Vec& c, const GridFunction& y, double p) {
    const int n = system.n();
    if (y.max_order() < n + system.r()) throw InvalidArgument("candidate needs derivative orders 0..n+r");
    const GridFunction res = system.residual(y.truncated(n + system.r()), &f);
    const Vec bc = apply_boundary(boundary, y);
    return sobolev_norm(res, n, p) + (bc - c).norm();
}

double discrepancy(const BoundaryValueProblem& bvp, const GridFunction& y, double p) {
    bvp.validate();
    const DiscretizedSystem ds(bvp.system, y.grid());
    return discrepancy(ds, ds.own_forcing(), bvp.boundary, bvp.c, y, p);
}

}  // namespace gbvp
