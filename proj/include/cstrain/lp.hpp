#pragma once

#include <Eigen/Core>

namespace cstrain {

struct LpOptions {
    double feas_tol = 1e-10;
    double gap_tol = 1e-10;
    int max_iters = 200;
};

enum class LpStatus { Optimal, MaxIters };

struct LpResult {
    Eigen::VectorXd x;  // primal
    Eigen::VectorXd y;  // equality multipliers
    Eigen::VectorXd z;  // lower-bound duals
    Eigen::VectorXd w;  // upper-bound duals (zero where unbounded)
    double objective = 0.0;
    double primal_infeas = 0.0;  // relative, at exit
    double dual_infeas = 0.0;
    double gap = 0.0;
    int iterations = 0;
    LpStatus status = LpStatus::MaxIters;
};

/// Dense Mehrotra predictor-corrector interior-point solver for
///   min c'x   s.t.   A x = b,   0 <= x <= upper
/// where upper may be +infinity per coordinate. Each iteration factors the
/// normal-equations matrix A diag(1/theta) A' once (LLT, escalating ridge
/// on breakdown). Intended for small, well-scaled problems; callers
/// pre-normalize rows and right-hand sides.
LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, const Eigen::VectorXd& upper,
                  const LpOptions& opts = {});

}  // namespace cstrain
