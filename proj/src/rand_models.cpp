#include "cstrain/rand_models.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cstrain/errors.hpp"

namespace cstrain {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

const char* to_string(EntryDist d) {
    switch (d) {
        case EntryDist::StandardGaussian: return "gaussian";
        case EntryDist::Rademacher: return "rademacher";
        case EntryDist::UniformSym: return "uniform";
    }
    return "?";
}

EntryDist entry_dist_from_string(const std::string& s) {
    if (s == "gaussian") return EntryDist::StandardGaussian;
    if (s == "rademacher") return EntryDist::Rademacher;
    if (s == "uniform") return EntryDist::UniformSym;
    fail("InvalidSpec", "unknown entry distribution: " + s);
}

void validate(const ModelSpec& spec) {
    if (!(spec.theta > 0.0) || !(spec.theta <= 1.0))
        fail("InvalidSpec", "theta must lie in (0,1]");
    if (!(spec.nu > 0.0) || !std::isfinite(spec.nu))
        fail("InvalidSpec", "nu must be a positive real");
    if (!(spec.k_psi2 > 0.0))
        fail("InvalidSpec", "k_psi2 must be positive");
    if ((spec.dist == EntryDist::StandardGaussian ||
         spec.dist == EntryDist::Rademacher) &&
        spec.nu != 1.0)
        fail("InvalidSpec", "this distribution is normalized to nu = 1");
}

bool satisfies_restricted_model(const ModelSpec& spec) {
    validate(spec);
    // All three laws are symmetric with P(R = 0) = 0; the moments and the
    // tail function are known in closed form.
    double abs_mean = 0.0, second = spec.nu * spec.nu;
    switch (spec.dist) {
        case EntryDist::StandardGaussian:
            abs_mean = std::sqrt(2.0 / std::numbers::pi);
            break;
        case EntryDist::Rademacher:
            abs_mean = 1.0;
            break;
        case EntryDist::UniformSym:
            // uniform on [-a, a] with a = sqrt(3) nu
            abs_mean = std::sqrt(3.0) * spec.nu / 2.0;
            break;
    }
    if (abs_mean < 0.1 || abs_mean > 1.0) return false;
    if (second > 1.0 + 1e-15) return false;

    // Tail check on a grid; exact survival functions per law.
    for (int i = 1; i <= 400; ++i) {
        double tau = i * 0.02;
        double surv = 0.0;
        switch (spec.dist) {
            case EntryDist::StandardGaussian:
                surv = std::erfc(tau / std::sqrt(2.0));
                break;
            case EntryDist::Rademacher:
                surv = tau < 1.0 ? 1.0 : 0.0;
                break;
            case EntryDist::UniformSym: {
                double a = std::sqrt(3.0) * spec.nu;
                surv = tau < a ? 1.0 - tau / a : 0.0;
                break;
            }
        }
        if (surv > 2.0 * std::exp(-tau * tau / 2.0) + 1e-15) return false;
    }
    return true;
}

std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

RngStream RngStream::child(std::uint64_t tag) const {
    return RngStream{master_seed, mix64(stream_id ^ mix64(tag + kGolden))};
}

SplitMix64::SplitMix64(RngStream stream)
    : state_(mix64(stream.master_seed) ^ mix64(mix64(stream.stream_id) + kGolden)) {}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_unit() - 1.0;
        v = 2.0 * next_unit() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
    if (bound == 0) fail("InvalidSpec", "next_below(0)");
    __uint128_t m = static_cast<__uint128_t>(next()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        std::uint64_t t = (0 - bound) % bound;
        while (lo < t) {
            m = static_cast<__uint128_t>(next()) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double SplitMix64::next_sign() {
    return (next() >> 63) ? -1.0 : 1.0;
}

namespace {

double draw_value(SplitMix64& eng, const ModelSpec& spec) {
    switch (spec.dist) {
        case EntryDist::StandardGaussian:
            return eng.next_gaussian();
        case EntryDist::Rademacher:
            return eng.next_sign();
        case EntryDist::UniformSym:
            return std::sqrt(3.0) * spec.nu * (2.0 * eng.next_unit() - 1.0);
    }
    return 0.0;
}

// First k slots of a partial Fisher-Yates shuffle of 0..p-1.
std::vector<std::size_t> draw_support(SplitMix64& eng, std::size_t p,
                                      std::size_t k) {
    std::vector<std::size_t> idx(p);
    for (std::size_t i = 0; i < p; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(eng.next_below(p - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

double draw_signed_magnitude(SplitMix64& eng) {
    double mag = 1.0 + eng.next_unit();
    return mag * eng.next_sign();
}

void fill_sparse_column(MatrixMap m, std::size_t col, std::size_t k,
                        SplitMix64& eng) {
    auto support = draw_support(eng, static_cast<std::size_t>(m.rows()), k);
    for (std::size_t r : support)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) =
            draw_signed_magnitude(eng);
}

}  // namespace

DenseMatrix gen_component_matrix(std::size_t n, std::size_t p,
                                 const ModelSpec& spec, RngStream rng) {
    validate(spec);
    if (n < 1 || p < 1) fail("BadShape", "component matrix needs n, p >= 1");
    DenseMatrix x(n, p);
    SplitMix64 eng(rng);
    auto m = x.map();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < p; ++k) {
            bool on = eng.next_unit() < spec.theta;
            if (on)
                m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                    draw_value(eng, spec);
        }
    return x;
}

Eigen::VectorXd gen_sparse_combinator(std::size_t p, std::size_t k,
                                      RngStream rng) {
    if (p < 1) fail("BadShape", "combinator needs p >= 1");
    if (k < 1 || k > p) fail("BadSparsity", "need 1 <= k <= p");
    DenseMatrix z(p, 1);
    SplitMix64 eng(rng);
    fill_sparse_column(z.map(), 0, k, eng);
    return z.col_vector(0);
}

DenseMatrix gen_training_matrix(std::size_t p, std::size_t q,
                                std::size_t k_easy, RngStream rng) {
    if (p < 1) fail("BadShape", "training matrix needs p >= 1");
    if (q < p) fail("BadShape", "training matrix needs q >= p");
    if (k_easy < 1 || k_easy > p) fail("BadSparsity", "need 1 <= k_easy <= p");

    DenseMatrix z(p, q);
    SplitMix64 eng(rng);
    auto m = z.map();
    // Staggered block: column i covers {i, i+1, ..., i+k_easy-1} mod p with
    // the diagonal entry scaled to dominate the column, so the block is
    // strictly column-diagonally dominant and hence rank p.
    for (std::size_t i = 0; i < p; ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            draw_signed_magnitude(eng) * 2.0 * static_cast<double>(k_easy);
        for (std::size_t d = 1; d < k_easy; ++d) {
            std::size_t r = (i + d) % p;
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                draw_signed_magnitude(eng);
        }
    }
    for (std::size_t c = p; c < q; ++c) fill_sparse_column(m, c, k_easy, eng);
    return z;
}

DenseMatrix gen_gaussian_sensing(std::size_t m, std::size_t n, RngStream rng) {
    if (m < 1 || n < 1) fail("BadShape", "sensing matrix needs m, n >= 1");
    DenseMatrix a(m, n);
    SplitMix64 eng(rng);
    double scale = 1.0 / std::sqrt(static_cast<double>(m));
    auto mm = a.map();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            mm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                scale * eng.next_gaussian();
    return a;
}

}  // namespace cstrain
