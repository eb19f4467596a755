#include "cstrain/core_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include <Eigen/Dense>

#include "cstrain/errors.hpp"

namespace cstrain {

ScalingDiagonal scaling_matrix(const DenseMatrix& x) {
    ScalingDiagonal s;
    s.inverse_norms.resize(x.cols());
    auto m = x.map();
    for (std::size_t k = 0; k < x.cols(); ++k) {
        double norm = m.col(static_cast<Eigen::Index>(k)).norm();
        if (norm < 1e-300)
            fail("ZeroColumn", "column " + std::to_string(k) + " has zero norm");
        s.inverse_norms[k] = 1.0 / norm;
    }
    return s;
}

DenseMatrix apply_scaling(const DenseMatrix& x, const ScalingDiagonal& s) {
    if (s.inverse_norms.size() != x.cols())
        fail("ShapeMismatch", "scaling length does not match column count");
    DenseMatrix out = x;
    auto m = out.map();
    for (std::size_t k = 0; k < x.cols(); ++k)
        m.col(static_cast<Eigen::Index>(k)) *= s.inverse_norms[k];
    return out;
}

double spectral_norm(const DenseMatrix& a) {
    Eigen::MatrixXd m = a.to_eigen();
    if (a.cols() <= 512) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
        return svd.singularValues()(0);
    }
    // Power iteration on A^T A with a fixed, slightly tilted start so a
    // symmetric matrix cannot leave the iterate orthogonal to the top
    // singular vector.
    Eigen::VectorXd v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = 1.0 + static_cast<double>(i) / static_cast<double>(v.size() + 1);
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd av = m * v;
        double next = av.norm();
        if (next == 0.0) return 0.0;
        v = m.transpose() * av;
        v.normalize();
        if (std::abs(next - sigma) <= 1e-12 * next) return next;
        sigma = next;
    }
    return sigma;
}

double stable_rank(const DenseMatrix& a) {
    double fro2 = a.map().squaredNorm();
    if (fro2 == 0.0) fail("ZeroMatrix", "stable rank of the zero matrix");
    double s = spectral_norm(a);
    return fro2 / (s * s);
}

std::size_t numerical_rank(const DenseMatrix& a, double rel_tol) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a.to_eigen());
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0)) ++r;
    return r;
}

double default_support_threshold(const Eigen::VectorXd& x) {
    double mx = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
    return 1e-6 * std::max(1.0, mx);
}

std::size_t support_size(const Eigen::VectorXd& x, double tau_supp) {
    if (tau_supp < 0.0) fail("InvalidArgument", "tau_supp must be >= 0");
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x(i)) > tau_supp) ++n;
    return n;
}

std::vector<std::size_t> column_supports(const DenseMatrix& x, double tau_supp) {
    std::vector<std::size_t> out(x.cols());
    for (std::size_t k = 0; k < x.cols(); ++k)
        out[k] = support_size(x.col_vector(k), tau_supp);
    return out;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    const std::uint64_t cap = 1ull << 63;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n - k + i) / i is exact at every step
        std::uint64_t num = n - k + i;
        if (r > cap / num) return cap;
        r = r * num / i;
    }
    return r;
}

namespace {

// sigma_min/sigma_max of the submatrix of M with the given columns, via the
// eigenvalues of its Gram matrix.
std::pair<double, double> support_sigma(const Eigen::MatrixXd& m,
                                        const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd sub(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        sub.col(static_cast<Eigen::Index>(j)) =
            m.col(static_cast<Eigen::Index>(cols[j]));
    Eigen::MatrixXd gram = sub.transpose() * sub;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram,
                                                      Eigen::EigenvaluesOnly);
    double lo = std::max(es.eigenvalues().minCoeff(), 0.0);
    double hi = std::max(es.eigenvalues().maxCoeff(), 0.0);
    return {std::sqrt(lo), std::sqrt(hi)};
}

RipEstimate finish_estimate(std::size_t t, std::size_t checked, double smin,
                            double smax, bool exhaustive) {
    RipEstimate est;
    est.sparsity_t = t;
    est.supports_checked = checked;
    est.sigma_min = smin;
    est.sigma_max = smax;
    est.exhaustive = exhaustive;
    est.epsilon = std::max(1.0 - smin, smax - 1.0);
    return est;
}

}  // namespace

RipEstimate rip_constant(const DenseMatrix& m, std::size_t t,
                         std::uint64_t max_supports) {
    if (t < 1 || t > m.cols())
        fail("InvalidArgument", "need 1 <= t <= cols");
    std::uint64_t total = binomial_capped(m.cols(), t);
    if (total > max_supports)
        fail("TooManySupports",
             "binomial(" + std::to_string(m.cols()) + "," + std::to_string(t) +
                 ") = " + std::to_string(total) + " exceeds budget " +
                 std::to_string(max_supports));

    Eigen::MatrixXd em = m.to_eigen();
    std::vector<std::size_t> idx(t);
    for (std::size_t i = 0; i < t; ++i) idx[i] = i;

    double smin = std::numeric_limits<double>::infinity();
    double smax = 0.0;
    std::size_t checked = 0;
    while (true) {
        auto [lo, hi] = support_sigma(em, idx);
        smin = std::min(smin, lo);
        smax = std::max(smax, hi);
        ++checked;
        // next lexicographic combination
        std::size_t i = t;
        while (i > 0 && idx[i - 1] == m.cols() - t + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < t; ++j) idx[j] = idx[j - 1] + 1;
    }
    return finish_estimate(t, checked, smin, smax, true);
}

RipEstimate rip_constant_sampled(const DenseMatrix& m, std::size_t t,
                                 std::size_t samples, RngStream rng) {
    if (t < 1 || t > m.cols())
        fail("InvalidArgument", "need 1 <= t <= cols");
    if (samples < 1) fail("InvalidArgument", "need samples >= 1");
    Eigen::MatrixXd em = m.to_eigen();
    SplitMix64 eng(rng);
    double smin = std::numeric_limits<double>::infinity();
    double smax = 0.0;
    std::vector<std::size_t> idx(m.cols());
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < m.cols(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < t; ++i) {
            std::size_t j =
                i + static_cast<std::size_t>(eng.next_below(m.cols() - i));
            std::swap(idx[i], idx[j]);
        }
        std::vector<std::size_t> support(idx.begin(), idx.begin() + t);
        auto [lo, hi] = support_sigma(em, support);
        smin = std::min(smin, lo);
        smax = std::max(smax, hi);
    }
    return finish_estimate(t, samples, smin, smax, false);
}

EquivalenceReport match_up_to_signed_scaled_permutation(
    const DenseMatrix& x_ref, const DenseMatrix& x_cand, double tol) {
    if (x_ref.rows() != x_cand.rows() || x_ref.cols() != x_cand.cols())
        fail("ShapeMismatch", "matched matrices must share a shape");
    const std::size_t p = x_ref.cols();
    auto ref = x_ref.map();
    auto cand = x_cand.map();

    std::vector<double> ref_norm(p), cand_norm(p);
    for (std::size_t k = 0; k < p; ++k) {
        ref_norm[k] = ref.col(static_cast<Eigen::Index>(k)).norm();
        cand_norm[k] = cand.col(static_cast<Eigen::Index>(k)).norm();
        if (ref_norm[k] < 1e-300 || cand_norm[k] < 1e-300)
            fail("ZeroColumn", "column " + std::to_string(k) + " has zero norm");
    }

    // All candidate/reference pairs ranked by |cosine|, ties by candidate
    // index then reference index, assigned greedily one-to-one.
    struct Entry {
        double score;
        std::size_t cand, ref;
    };
    std::vector<Entry> entries;
    entries.reserve(p * p);
    for (std::size_t c = 0; c < p; ++c)
        for (std::size_t r = 0; r < p; ++r) {
            double ip = cand.col(static_cast<Eigen::Index>(c))
                            .dot(ref.col(static_cast<Eigen::Index>(r)));
            entries.push_back({std::abs(ip) / (cand_norm[c] * ref_norm[r]), c, r});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.cand != b.cand) return a.cand < b.cand;
        return a.ref < b.ref;
    });

    EquivalenceReport rep;
    rep.permutation.assign(p, 0);
    rep.signs.assign(p, 1);
    rep.scales.assign(p, 1.0);
    std::vector<bool> cand_used(p, false), ref_used(p, false);
    std::size_t assigned = 0;
    for (const Entry& e : entries) {
        if (assigned == p) break;
        if (cand_used[e.cand] || ref_used[e.ref]) continue;
        cand_used[e.cand] = true;
        ref_used[e.ref] = true;
        rep.permutation[e.cand] = e.ref;
        ++assigned;
    }

    double worst = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t r = rep.permutation[c];
        auto rc = ref.col(static_cast<Eigen::Index>(r));
        auto cc = cand.col(static_cast<Eigen::Index>(c));
        double gamma = rc.dot(cc) / (ref_norm[r] * ref_norm[r]);
        if (gamma == 0.0) {
            // orthogonal pair; leave +1/scale 1, residual will reject
            worst = std::max(worst, 1.0);
            continue;
        }
        rep.signs[c] = gamma < 0.0 ? -1 : 1;
        rep.scales[c] = std::abs(gamma);
        double resid = (cc - gamma * rc).norm() / cand_norm[c];
        worst = std::max(worst, resid);
    }
    rep.max_residual = worst;
    rep.matched = worst <= tol;
    return rep;
}

}  // namespace cstrain
