#pragma once

#include <Eigen/Core>

#include "cstrain/dense_matrix.hpp"

namespace cstrain {

struct SolverOptions {
    double feas_tol = 1e-9;  // relative feasibility
    double gap_tol = 1e-9;   // relative optimality gap
    int max_iters = 50000;
    bool polish = true;  // equality-constrained least squares on the support
};

enum class SolveStatus { Optimal, MaxIters, Infeasible };

const char* to_string(SolveStatus s);

struct L1Solution {
    Eigen::VectorXd x;
    double objective = 0.0;      // ||x||_1
    double feas_residual = 0.0;  // ||Mx-b||_2 / max(||b||_2, 1)
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIters;
};

/// min ||x||_1 subject to Mx = b. Equality rows are orthonormalized through
/// an SVD pre-pass, which also detects b outside range(M) (Infeasible) and
/// drops dependent rows; the LP split x = u - v then runs through the
/// interior-point core, followed by the polish step.
L1Solution basis_pursuit(const DenseMatrix& m, const Eigen::VectorXd& b,
                         const SolverOptions& opts = {});

/// min ||Y w||_1 subject to r'Y w = 1. Throws DegenerateConstraint when
/// ||Y'r||_inf <= 1e-12 and MaxIters when the solver stalls.
Eigen::VectorXd min_l1_hyperplane(const DenseMatrix& y,
                                  const Eigen::VectorXd& r,
                                  const SolverOptions& opts = {});

/// Test oracle: enumerates every column support of size <= rows(M) in
/// lexicographic order, solves each subsystem by least squares, and returns
/// the feasible candidate of minimal l1 norm. Throws TooLarge above 14
/// columns and Infeasible when no support fits b.
Eigen::VectorXd l1_oracle_bruteforce(const DenseMatrix& m,
                                     const Eigen::VectorXd& b);

}  // namespace cstrain
