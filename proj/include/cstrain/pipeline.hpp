#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "cstrain/dense_matrix.hpp"
#include "cstrain/dictlearn.hpp"
#include "cstrain/l1_solver.hpp"
#include "cstrain/rand_models.hpp"

namespace cstrain {

struct RecoveryResult {
    Eigen::VectorXd x;  // length n
    Eigen::VectorXd z;  // combinator in the learned coordinates, length p
    std::optional<std::size_t> u_used;
    std::size_t support = 0;
    SolveStatus solver_status = SolveStatus::MaxIters;
};

/// Recovery with prior knowledge X_bar: scales columns to unit norm, solves
///   min ||z||_1  s.t.  (sqrt(n)/||A||_F) A X_bar S z = (sqrt(n)/||A||_F) b
/// and returns x = X_bar S z.
RecoveryResult sparse_recovery(const DenseMatrix& a, const Eigen::VectorXd& b,
                               const DenseMatrix& x_bar,
                               const SolverOptions& opts = {});

struct TrainResult {
    FactorizationResult factorization;
    std::vector<std::size_t> kept_columns;  // indices l with ||Y_l||_0 <= u
    std::vector<std::size_t> discarded;
};

/// Training for maximal sparsity u: per-column basis pursuit on B, the
/// u-sparsity filter, then sparse factorization of the kept columns.
/// expected_p > 0 additionally requires at least expected_p kept columns of
/// numerical rank expected_p (NotEnoughEasy otherwise).
TrainResult train(const DenseMatrix& a, const DenseMatrix& b_samples,
                  std::size_t u, RngStream rng, const SolverOptions& opts = {},
                  std::size_t expected_p = 0);

struct SweepTimings {
    double train_seconds = 0.0;
    double recover_seconds = 0.0;
};

/// Runs train + sparse_recovery for every u in u_candidates (each gets a
/// derived rng sub-stream, so the sweep order cannot affect results) and
/// returns the recovered x of minimal support, ties to the smallest u.
/// Failing candidates are skipped; AllFailed when none succeeds.
RecoveryResult train_and_recover(const DenseMatrix& a, const Eigen::VectorXd& b,
                                 const DenseMatrix& b_samples,
                                 const std::vector<std::size_t>& u_candidates,
                                 RngStream rng, const SolverOptions& opts = {},
                                 std::size_t expected_p = 0,
                                 TrainResult* chosen_train = nullptr,
                                 SweepTimings* timings = nullptr);

struct SuggestKnobs {
    double c_n = 1.0;
    double c2 = 1.0;
    double beta_m = 1.0;
};

struct SuggestedDims {
    std::size_t n, p, q, s, t, t_bar, u, m;
    double theta;
};

/// Desk-scale sizing recipe: n = ceil(c_n p^2 ln^2 p), s = ceil(2n/p)
/// (saturating theta >= 2/p), u = s t, m = ceil(beta_m t sqrt(n) ln n),
/// q = 2p, t_bar <= t with s*t_bar <= m/2. Throws InfeasibleKnobs when
/// theta lands above c2/sqrt(p).
SuggestedDims suggest_parameters(std::size_t p, std::size_t t,
                                 const SuggestKnobs& knobs = {});

}  // namespace cstrain
