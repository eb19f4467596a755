#include "cstrain/l1_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "cstrain/core_linalg.hpp"
#include "cstrain/errors.hpp"
#include "cstrain/lp.hpp"

namespace cstrain {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_options(const SolverOptions& opts) {
    if (!(opts.feas_tol > 0.0) || !(opts.gap_tol > 0.0))
        fail("InvalidArgument", "solver tolerances must be strictly positive");
    if (opts.max_iters < 1) fail("InvalidArgument", "max_iters must be >= 1");
}

LpOptions lp_options_from(const SolverOptions& opts) {
    LpOptions lp;
    double target = 0.1 * std::min(opts.feas_tol, opts.gap_tol);
    lp.feas_tol = std::max(1e-11, target);
    lp.gap_tol = std::max(1e-11, target);
    lp.max_iters = std::min(opts.max_iters, 500);
    return lp;
}

// Degenerate vertices can pin the interior-point residuals just above the
// internal target; the iterate is still acceptable when it meets the
// caller's contract.
bool lp_acceptable(const LpResult& lp, const SolverOptions& opts) {
    if (lp.status == LpStatus::Optimal) return true;
    return lp.primal_infeas <= opts.feas_tol && lp.dual_infeas <= opts.feas_tol &&
           lp.gap <= opts.gap_tol;
}

double relative_residual(const Eigen::MatrixXd& m, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
    return (m * x - b).norm() / std::max(b.norm(), 1.0);
}

Eigen::MatrixXd columns_of(const Eigen::MatrixXd& m,
                           const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd sub(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        sub.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
    return sub;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::MaxIters: return "MaxIters";
        case SolveStatus::Infeasible: return "Infeasible";
    }
    return "?";
}

L1Solution basis_pursuit(const DenseMatrix& m, const Eigen::VectorXd& b,
                         const SolverOptions& opts) {
    validate_options(opts);
    if (static_cast<std::size_t>(b.size()) != m.rows())
        fail("ShapeMismatch", "rows(M) must equal len(b)");

    const Eigen::Index n = static_cast<Eigen::Index>(m.cols());
    Eigen::MatrixXd em = m.to_eigen();

    L1Solution sol;
    sol.x = Eigen::VectorXd::Zero(n);
    if (b.norm() == 0.0) {
        sol.status = SolveStatus::Optimal;
        return sol;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(em,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * sv(0)) ++rank;

    // Range check doubles as the infeasibility detector.
    Eigen::VectorXd ub = svd.matrixU().leftCols(rank).transpose() * b;
    double range_resid =
        (b - svd.matrixU().leftCols(rank) * ub).norm() / std::max(b.norm(), 1.0);
    if (rank == 0 || range_resid > opts.feas_tol) {
        sol.status = SolveStatus::Infeasible;
        sol.feas_residual = rank == 0 ? 1.0 : range_resid;
        return sol;
    }

    // Orthonormalized constraints: V_r' x = Sigma_r^-1 U_r' b, rescaled to a
    // unit right-hand side so the interior start is well matched.
    Eigen::VectorXd bhat = ub.array() / sv.head(rank).array();
    double beta = bhat.norm();
    Eigen::MatrixXd vr = svd.matrixV().leftCols(rank);

    Eigen::MatrixXd a_lp(rank, 2 * n);
    a_lp.leftCols(n) = vr.transpose();
    a_lp.rightCols(n) = -vr.transpose();
    Eigen::VectorXd c_lp = Eigen::VectorXd::Ones(2 * n);
    Eigen::VectorXd upper = Eigen::VectorXd::Constant(2 * n, kInf);

    LpResult lp = solve_lp(a_lp, bhat / beta, c_lp, upper, lp_options_from(opts));
    sol.iterations = lp.iterations;
    sol.x = beta * (lp.x.head(n) - lp.x.tail(n));

    if (opts.polish) {
        double tau = default_support_threshold(sol.x);
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(sol.x(i)) > tau) support.push_back(i);
        if (!support.empty()) {
            Eigen::MatrixXd msub = columns_of(em, support);
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(msub);
            Eigen::VectorXd xs = cod.solve(b);
            Eigen::VectorXd cand = Eigen::VectorXd::Zero(n);
            for (std::size_t j = 0; j < support.size(); ++j)
                cand(support[j]) = xs(static_cast<Eigen::Index>(j));
            double obj0 = sol.x.lpNorm<1>();
            bool feasible = relative_residual(em, cand, b) <= opts.feas_tol;
            bool no_worse = cand.lpNorm<1>() <=
                            obj0 + std::max(opts.gap_tol, 1e-12) * std::max(1.0, obj0);
            if (feasible && no_worse) sol.x = cand;
        }
    }

    sol.objective = sol.x.lpNorm<1>();
    sol.feas_residual = relative_residual(em, sol.x, b);
    sol.status = (lp_acceptable(lp, opts) && sol.feas_residual <= opts.feas_tol)
                     ? SolveStatus::Optimal
                     : SolveStatus::MaxIters;
    return sol;
}

Eigen::VectorXd min_l1_hyperplane(const DenseMatrix& y,
                                  const Eigen::VectorXd& r,
                                  const SolverOptions& opts) {
    validate_options(opts);
    if (static_cast<std::size_t>(r.size()) != y.rows())
        fail("ShapeMismatch", "rows(Y) must equal len(r)");
    const Eigen::Index n = static_cast<Eigen::Index>(y.rows());
    const Eigen::Index q = static_cast<Eigen::Index>(y.cols());
    Eigen::MatrixXd ey = y.to_eigen();

    Eigen::VectorXd ch = ey.transpose() * r;
    if (ch.lpNorm<Eigen::Infinity>() <= 1e-12)
        fail("DegenerateConstraint", "Y'r vanishes; hyperplane unreachable");

    Eigen::VectorXd w0 = ch / ch.squaredNorm();
    if (q == 1) return w0;

    // Feasible set is w0 + null(ch'); minimize ||Y w||_1 over the null
    // coordinates, i.e. a least-absolute-deviations problem in xi.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ch);
    Eigen::MatrixXd qfull = qr.householderQ();
    Eigen::MatrixXd nullb = qfull.rightCols(q - 1);

    Eigen::MatrixXd g = ey * nullb;
    Eigen::VectorXd h = ey * w0;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(g,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index rg = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * sv(0)) ++rg;
    if (rg == 0) return w0;

    Eigen::MatrixXd ur = svd.matrixU().leftCols(rg);

    // Row weights 1 + O(1e-9) break ties between equally cheap supports
    // toward a deterministic vertex; interior-point iterates otherwise land
    // in the center of a non-unique optimal face.
    Eigen::VectorXd eta(n);
    for (Eigen::Index i = 0; i < n; ++i)
        eta(i) = 1.0 + 1e-9 * static_cast<double>(i + 1) /
                           static_cast<double>(n);

    // Weighted LAD dual as a box LP over mu = lambda + eta in [0, 2 eta]:
    //   min (-h)' mu  s.t.  Ur' mu = Ur' eta;
    // the equality multipliers at the optimum are the LAD minimizer xi.
    double gamma = std::max(1.0, h.lpNorm<Eigen::Infinity>());
    Eigen::MatrixXd a_lp = ur.transpose();
    Eigen::VectorXd b_lp = ur.transpose() * eta;
    Eigen::VectorXd c_lp = -h / gamma;
    Eigen::VectorXd upper = 2.0 * eta;

    LpResult lp = solve_lp(a_lp, b_lp, c_lp, upper, lp_options_from(opts));
    if (!lp_acceptable(lp, opts))
        fail("MaxIters", "hyperplane l1 solve did not converge");
    Eigen::VectorXd xi = gamma * lp.y;

    if (opts.polish) {
        Eigen::VectorXd rho = ur * xi + h;
        double tau = default_support_threshold(rho);
        std::vector<Eigen::Index> zero_set;
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(rho(i)) <= tau) zero_set.push_back(i);
        if (static_cast<Eigen::Index>(zero_set.size()) >= rg) {
            Eigen::MatrixXd uz(static_cast<Eigen::Index>(zero_set.size()), rg);
            Eigen::VectorXd hz(static_cast<Eigen::Index>(zero_set.size()));
            for (std::size_t j = 0; j < zero_set.size(); ++j) {
                uz.row(static_cast<Eigen::Index>(j)) = ur.row(zero_set[j]);
                hz(static_cast<Eigen::Index>(j)) = h(zero_set[j]);
            }
            Eigen::VectorXd xi2 =
                uz.colPivHouseholderQr().solve(-hz);
            Eigen::VectorXd rho2 = ur * xi2 + h;
            if (rho2.lpNorm<1>() <= rho.lpNorm<1>() * (1.0 + 1e-9) + 1e-12)
                xi = xi2;
        }
    }

    Eigen::VectorXd v =
        svd.matrixV().leftCols(rg) * (xi.array() / sv.head(rg).array()).matrix();
    return w0 + nullb * v;
}

Eigen::VectorXd l1_oracle_bruteforce(const DenseMatrix& m,
                                     const Eigen::VectorXd& b) {
    if (static_cast<std::size_t>(b.size()) != m.rows())
        fail("ShapeMismatch", "rows(M) must equal len(b)");
    if (m.cols() > 14)
        fail("TooLarge", "oracle limited to 14 columns");

    const Eigen::Index n = static_cast<Eigen::Index>(m.cols());
    const Eigen::Index rows = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXd em = m.to_eigen();
    const double feas_tol = 1e-9;

    bool found = false;
    double best_obj = kInf;
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);

    if (b.norm() <= feas_tol * std::max(b.norm(), 1.0)) return best;

    Eigen::Index max_size = std::min(rows, n);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 1; k <= max_size; ++k) {
        idx.assign(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            Eigen::MatrixXd sub = columns_of(em, idx);
            Eigen::VectorXd xs = sub.colPivHouseholderQr().solve(b);
            if ((sub * xs - b).norm() <= feas_tol * std::max(b.norm(), 1.0)) {
                double obj = xs.lpNorm<1>();
                if (obj < best_obj) {
                    best_obj = obj;
                    best.setZero();
                    for (std::size_t j = 0; j < idx.size(); ++j)
                        best(idx[j]) = xs(static_cast<Eigen::Index>(j));
                    found = true;
                }
            }
            // next lexicographic combination of size k
            Eigen::Index i = k;
            while (i > 0 &&
                   idx[static_cast<std::size_t>(i - 1)] == n - k + (i - 1))
                --i;
            if (i == 0) break;
            ++idx[static_cast<std::size_t>(i - 1)];
            for (Eigen::Index j = i; j < k; ++j)
                idx[static_cast<std::size_t>(j)] =
                    idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    if (!found) fail("Infeasible", "no support reproduces b");
    return best;
}

}  // namespace cstrain
