#include "cstrain/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cstrain/core_linalg.hpp"
#include "cstrain/errors.hpp"

namespace cstrain {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

RecoveryResult sparse_recovery(const DenseMatrix& a, const Eigen::VectorXd& b,
                               const DenseMatrix& x_bar,
                               const SolverOptions& opts) {
    if (a.cols() != x_bar.rows())
        fail("ShapeMismatch", "cols(A) must equal rows(X_bar)");
    if (static_cast<std::size_t>(b.size()) != a.rows())
        fail("ShapeMismatch", "rows(A) must equal len(b)");

    ScalingDiagonal s = scaling_matrix(x_bar);
    DenseMatrix xs = apply_scaling(x_bar, s);

    double fro = a.map().norm();
    if (fro == 0.0) fail("ZeroMatrix", "sensing matrix is zero");
    double kappa = std::sqrt(static_cast<double>(a.cols())) / fro;

    Eigen::MatrixXd m_rec = kappa * (a.map() * xs.map());
    L1Solution sol =
        basis_pursuit(DenseMatrix::from_eigen(m_rec), kappa * b, opts);

    RecoveryResult res;
    res.z = sol.x;
    res.x = xs.map() * sol.x;
    res.support = support_size(res.x, default_support_threshold(res.x));
    res.solver_status = sol.status;
    return res;
}

TrainResult train(const DenseMatrix& a, const DenseMatrix& b_samples,
                  std::size_t u, RngStream rng, const SolverOptions& opts,
                  std::size_t expected_p) {
    if (a.rows() != b_samples.rows())
        fail("ShapeMismatch", "rows(A) must equal rows(B)");

    const std::size_t q = b_samples.cols();
    std::vector<std::size_t> kept, discarded;
    std::vector<Eigen::VectorXd> columns;
    for (std::size_t l = 0; l < q; ++l) {
        L1Solution sol = basis_pursuit(a, b_samples.col_vector(l), opts);
        bool easy = sol.status == SolveStatus::Optimal &&
                    support_size(sol.x, default_support_threshold(sol.x)) <= u;
        if (easy) {
            kept.push_back(l);
            columns.push_back(sol.x);
        } else {
            discarded.push_back(l);
        }
    }
    if (kept.empty())
        fail("NotEnoughEasy", "no training column passed the u-sparsity filter");

    DenseMatrix y_bar(a.cols(), kept.size());
    auto ym = y_bar.map();
    for (std::size_t j = 0; j < columns.size(); ++j)
        ym.col(static_cast<Eigen::Index>(j)) = columns[j];

    if (expected_p > 0) {
        if (kept.size() < expected_p)
            fail("NotEnoughEasy",
                 "kept " + std::to_string(kept.size()) + " columns, need " +
                     std::to_string(expected_p));
        if (numerical_rank(y_bar) < expected_p)
            fail("NotEnoughEasy", "kept columns have deficient rank");
    }

    TrainResult res{sparse_factorization(y_bar, rng, opts), std::move(kept),
                    std::move(discarded)};
    return res;
}

RecoveryResult train_and_recover(const DenseMatrix& a, const Eigen::VectorXd& b,
                                 const DenseMatrix& b_samples,
                                 const std::vector<std::size_t>& u_candidates,
                                 RngStream rng, const SolverOptions& opts,
                                 std::size_t expected_p,
                                 TrainResult* chosen_train,
                                 SweepTimings* timings) {
    if (u_candidates.empty())
        fail("InvalidArgument", "u_candidates must be nonempty");
    for (std::size_t u : u_candidates)
        if (u < 1 || u > a.cols())
            fail("InvalidArgument", "each u must lie in [1, n]");

    bool found = false;
    std::size_t best_u = 0;
    RecoveryResult best;
    TrainResult best_train{FactorizationResult{DenseMatrix(1, 1),
                                               DenseMatrix(1, 1), 0.0},
                           {},
                           {}};
    SweepTimings tm;

    for (std::size_t u : u_candidates) {
        try {
            auto t0 = std::chrono::steady_clock::now();
            TrainResult tr = train(a, b_samples, u, rng.child(u), opts, expected_p);
            tm.train_seconds += seconds_since(t0);

            t0 = std::chrono::steady_clock::now();
            RecoveryResult rec =
                sparse_recovery(a, b, tr.factorization.x_bar, opts);
            tm.recover_seconds += seconds_since(t0);

            if (rec.solver_status != SolveStatus::Optimal) continue;
            bool better = !found || rec.support < best.support ||
                          (rec.support == best.support && u < best_u);
            if (better) {
                best = rec;
                best_u = u;
                best_train = std::move(tr);
                found = true;
            }
        } catch (const domain_error&) {
            // a failing u is skipped; only the correct u has to appear
        }
    }
    if (!found) fail("AllFailed", "no u candidate produced a recovery");

    best.u_used = best_u;
    if (chosen_train) *chosen_train = std::move(best_train);
    if (timings) *timings = tm;
    return best;
}

SuggestedDims suggest_parameters(std::size_t p, std::size_t t,
                                 const SuggestKnobs& knobs) {
    if (p < 2) fail("InvalidArgument", "need p >= 2");
    if (t < 1) fail("InvalidArgument", "need t >= 1");

    double lp = std::log(static_cast<double>(p));
    auto n = static_cast<std::size_t>(
        std::ceil(knobs.c_n * static_cast<double>(p) * static_cast<double>(p) *
                  lp * lp));
    n = std::max<std::size_t>(n, 2);
    auto s = static_cast<std::size_t>(
        std::ceil(2.0 * static_cast<double>(n) / static_cast<double>(p)));
    double theta = static_cast<double>(s) / static_cast<double>(n);
    if (theta > knobs.c2 / std::sqrt(static_cast<double>(p)))
        fail("InfeasibleKnobs",
             "theta = " + std::to_string(theta) + " exceeds c2/sqrt(p)");

    SuggestedDims d;
    d.p = p;
    d.t = t;
    d.n = n;
    d.s = s;
    d.theta = theta;
    d.u = s * t;
    d.m = static_cast<std::size_t>(
        std::ceil(knobs.beta_m * static_cast<double>(t) *
                  std::sqrt(static_cast<double>(n)) *
                  std::log(static_cast<double>(n))));
    d.m = std::max<std::size_t>(d.m, 1);
    d.q = 2 * p;
    std::size_t cap = d.m / (2 * s);
    d.t_bar = std::max<std::size_t>(1, std::min<std::size_t>(t, cap));
    return d;
}

}  // namespace cstrain
