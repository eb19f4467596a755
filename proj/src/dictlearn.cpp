#include "cstrain/dictlearn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "cstrain/core_linalg.hpp"
#include "cstrain/errors.hpp"

namespace cstrain {

CandidateSet er_spud_dc(const DenseMatrix& y, RngStream rng,
                        const SolverOptions& opts) {
    const std::size_t n = y.rows();
    if (n < 2) fail("ShapeMismatch", "ER-SpUD needs at least two rows");

    // Pairing is drawn before any solve so parallel schedules cannot change it.
    SplitMix64 eng(rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(eng.next_below(n - i));
        std::swap(perm[i], perm[j]);
    }

    CandidateSet out;
    const std::size_t groups = n / 2;
    for (std::size_t g = 0; g < groups; ++g) {
        std::size_t j1 = perm[2 * g], j2 = perm[2 * g + 1];
        Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        r(static_cast<Eigen::Index>(j1)) = 1.0;
        r(static_cast<Eigen::Index>(j2)) = 1.0;
        try {
            Eigen::VectorXd w = min_l1_hyperplane(y, r, opts);
            out.candidates.push_back(y.map() * w);
            out.pairings.emplace_back(j1, j2);
        } catch (const domain_error&) {
            out.skipped.emplace_back(j1, j2);
        }
    }
    if (out.candidates.empty())
        fail("AllDegenerate", "every row pairing was degenerate");
    return out;
}

DenseMatrix greedy_sparsest_full_rank(const CandidateSet& cands,
                                      double tau_supp, double rank_tol) {
    if (cands.candidates.empty()) fail("NoCandidates", "empty candidate set");
    const std::size_t count = cands.candidates.size();
    const Eigen::Index n = cands.candidates.front().size();

    std::vector<std::size_t> supports(count);
    for (std::size_t i = 0; i < count; ++i) {
        double tau = tau_supp >= 0.0
                         ? tau_supp
                         : default_support_threshold(cands.candidates[i]);
        supports[i] = support_size(cands.candidates[i], tau);
    }

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return supports[a] < supports[b];
                     });

    std::vector<Eigen::VectorXd> selected;
    std::vector<bool> used(count, false);
    while (true) {
        bool grew = false;
        for (std::size_t oi = 0; oi < count && !grew; ++oi) {
            std::size_t i = order[oi];
            if (used[i]) continue;
            Eigen::MatrixXd trial(n,
                                  static_cast<Eigen::Index>(selected.size() + 1));
            for (std::size_t j = 0; j < selected.size(); ++j)
                trial.col(static_cast<Eigen::Index>(j)) = selected[j];
            trial.col(static_cast<Eigen::Index>(selected.size())) =
                cands.candidates[i];
            Eigen::BDCSVD<Eigen::MatrixXd> svd(trial);
            const auto& sv = svd.singularValues();
            double smax = sv(0);
            double smin = sv(sv.size() - 1);
            if (smax > 0.0 && smin > rank_tol * smax) {
                selected.push_back(cands.candidates[i]);
                used[i] = true;
                grew = true;
            }
        }
        if (!grew) break;
    }
    if (selected.empty()) fail("NoCandidates", "no candidate has nonzero rank");

    DenseMatrix out(static_cast<std::size_t>(n), selected.size());
    auto m = out.map();
    for (std::size_t j = 0; j < selected.size(); ++j)
        m.col(static_cast<Eigen::Index>(j)) = selected[j];
    return out;
}

FactorizationResult sparse_factorization(const DenseMatrix& y, RngStream rng,
                                         const SolverOptions& opts) {
    CandidateSet cands = er_spud_dc(y, rng, opts);
    DenseMatrix x_bar = [&] {
        try {
            return greedy_sparsest_full_rank(cands, -1.0);
        } catch (const domain_error&) {
            fail("FactorizationFailed", "no usable candidates");
        }
    }();

    Eigen::MatrixXd ex = x_bar.to_eigen();
    Eigen::MatrixXd ey = y.to_eigen();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ex);
    Eigen::MatrixXd z = qr.solve(ey);

    double ynorm = ey.norm();
    double residual = ynorm == 0.0 ? 1.0 : (ex * z - ey).norm() / ynorm;
    if (residual > 1e-8)
        fail("FactorizationFailed",
             "relative residual " + std::to_string(residual) + " exceeds 1e-8");

    FactorizationResult res{std::move(x_bar), DenseMatrix::from_eigen(z),
                            residual};
    return res;
}

}  // namespace cstrain
