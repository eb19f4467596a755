#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cstrain/dense_matrix.hpp"
#include "cstrain/rand_models.hpp"

namespace cstrain {

/// Diagonal column scaling: entry k is 1/||X_k||_2 of the source matrix.
struct ScalingDiagonal {
    std::vector<double> inverse_norms;
};

/// Throws ZeroColumn if any column norm is below 1e-300.
ScalingDiagonal scaling_matrix(const DenseMatrix& x);

/// X * diag(s.inverse_norms).
DenseMatrix apply_scaling(const DenseMatrix& x, const ScalingDiagonal& s);

/// Spectral norm: full SVD up to 512 columns, power iteration (tolerance
/// 1e-12, 10000-iteration cap, fixed deterministic start) above.
double spectral_norm(const DenseMatrix& a);

/// ||A||_F^2 / ||A||^2. Throws ZeroMatrix on the zero matrix.
double stable_rank(const DenseMatrix& a);

/// Number of singular values above rel_tol times the largest.
std::size_t numerical_rank(const DenseMatrix& a, double rel_tol = 1e-8);

/// Default numerical-zero threshold: 1e-6 * max(1, max |x_i|).
double default_support_threshold(const Eigen::VectorXd& x);

/// Count of entries with |x_i| > tau_supp.
std::size_t support_size(const Eigen::VectorXd& x, double tau_supp);

/// Per-column support_size with a common threshold.
std::vector<std::size_t> column_supports(const DenseMatrix& x, double tau_supp);

struct RipEstimate {
    std::size_t sparsity_t = 0;
    double epsilon = 0.0;
    std::size_t supports_checked = 0;
    double sigma_min = 0.0;  // min over supports of sigma_min(M_T)
    double sigma_max = 0.0;  // max over supports of sigma_max(M_T)
    bool exhaustive = true;  // false => sampled lower bound
};

/// binomial(n, k), saturating at 2^63 to stay comparison-safe.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k);

/// Exhaustive (t, eps)-RIP constant over all column subsets of size t.
/// Throws TooManySupports when binomial(cols, t) exceeds max_supports;
/// callers may fall back to rip_constant_sampled.
RipEstimate rip_constant(const DenseMatrix& m, std::size_t t,
                         std::uint64_t max_supports = 1000000);

/// Randomized lower bound on the RIP constant from `samples` uniform
/// supports; the result is flagged exhaustive = false.
RipEstimate rip_constant_sampled(const DenseMatrix& m, std::size_t t,
                                 std::size_t samples, RngStream rng);

/// Column correspondence found by greedy maximal |cosine| matching.
/// matched implies cand_j ~ signs[j] * scales[j] * ref_{permutation[j]}
/// with per-column relative residual <= the tolerance used.
struct EquivalenceReport {
    bool matched = false;
    std::vector<std::size_t> permutation;  // candidate column -> reference column
    std::vector<int> signs;                // +1 / -1
    std::vector<double> scales;            // > 0
    double max_residual = 0.0;
};

/// Greedy one-to-one matching on |normalized inner product|; ties broken by
/// lowest candidate then reference column index.
EquivalenceReport match_up_to_signed_scaled_permutation(
    const DenseMatrix& x_ref, const DenseMatrix& x_cand, double tol);

}  // namespace cstrain
