#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cstrain/dense_matrix.hpp"
#include "cstrain/l1_solver.hpp"
#include "cstrain/rand_models.hpp"

namespace cstrain {

/// Output of the row-pairing stage: candidate i came from pairings[i].
/// Degenerate pairs are recorded in skipped instead.
struct CandidateSet {
    std::vector<Eigen::VectorXd> candidates;
    std::vector<std::pair<std::size_t, std::size_t>> pairings;
    std::vector<std::pair<std::size_t, std::size_t>> skipped;
};

/// Pairs the rows of Y uniformly at random into floor(n/2) disjoint groups
/// (one row dropped when n is odd) and solves, per pair (j1, j2),
///   min_w ||Y w||_1  s.t.  (e_j1 + e_j2)' Y w = 1,
/// keeping the candidate Y w. Throws AllDegenerate when every pair fails.
CandidateSet er_spud_dc(const DenseMatrix& y, RngStream rng,
                        const SolverOptions& opts = {});

/// Iteratively selects the candidate of minimal support whose addition keeps
/// sigma_min > rank_tol * sigma_max of the selected set, ties by candidate
/// index, until no candidate increases the rank. tau_supp < 0 selects the
/// per-candidate adaptive default threshold.
DenseMatrix greedy_sparsest_full_rank(const CandidateSet& cands,
                                      double tau_supp, double rank_tol = 1e-8);

struct FactorizationResult {
    DenseMatrix x_bar;   // n x p, full column rank
    DenseMatrix z_bar;   // p x q
    double residual;     // ||X_bar Z_bar - Y||_F / ||Y||_F
};

/// Sparse matrix factorization Y = X_bar Z_bar up to signed scaled
/// permutation: ER-SpUD(DC) candidates, greedy sparsest-full-rank selection,
/// then Z_bar by least squares. Throws FactorizationFailed when the relative
/// residual exceeds 1e-8 or nothing was selected.
FactorizationResult sparse_factorization(const DenseMatrix& y, RngStream rng,
                                         const SolverOptions& opts = {});

}  // namespace cstrain
