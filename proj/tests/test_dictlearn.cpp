#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "cstrain/core_linalg.hpp"
#include "cstrain/dictlearn.hpp"
#include "cstrain/errors.hpp"
#include "cstrain/rand_models.hpp"

using namespace cstrain;

namespace {

std::string error_name(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const domain_error& e) {
        return e.name();
    }
    return "";
}

ModelSpec restricted(double theta) {
    ModelSpec s;
    s.theta = theta;
    s.dist = EntryDist::StandardGaussian;
    return s;
}

Eigen::VectorXd unit(std::size_t n, std::size_t j) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(j)) = 1.0;
    return v;
}

// count of X's columns present among the candidates up to sign/scale
std::size_t columns_recovered(const DenseMatrix& x, const CandidateSet& c) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < x.cols(); ++k) {
        Eigen::VectorXd col = x.col_vector(k);
        for (const auto& s : c.candidates) {
            double cosv = std::abs(col.dot(s)) / (col.norm() * s.norm());
            if (cosv >= 1.0 - 1e-8) {
                ++hits;
                break;
            }
        }
    }
    return hits;
}

}  // namespace

TEST_CASE("two rows give exactly one pairing") {
    DenseMatrix y(2, 2, {1.0, 0.3, -0.2, 0.9});
    CandidateSet c = er_spud_dc(y, RngStream{1, 1});
    REQUIRE(c.candidates.size() == 1);
    REQUIRE(c.pairings.size() == 1);
    CHECK(c.skipped.empty());
    auto [j1, j2] = c.pairings[0];
    CHECK(c.candidates[0](static_cast<Eigen::Index>(j1)) +
              c.candidates[0](static_cast<Eigen::Index>(j2)) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero input is all-degenerate; one row is a shape error") {
    DenseMatrix zero(6, 3);
    CHECK(error_name([&] { er_spud_dc(zero, RngStream{1, 1}); }) ==
          "AllDegenerate");
    DenseMatrix one_row(1, 3, {1, 2, 3});
    CHECK(error_name([&] { er_spud_dc(one_row, RngStream{1, 1}); }) ==
          "ShapeMismatch");
}

TEST_CASE("pairing is deterministic and disjoint") {
    DenseMatrix y = gen_gaussian_sensing(9, 4, RngStream{50, 0});
    CandidateSet a = er_spud_dc(y, RngStream{51, 7});
    CandidateSet b = er_spud_dc(y, RngStream{51, 7});
    REQUIRE(a.pairings == b.pairings);
    REQUIRE(a.candidates.size() == b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i)
        CHECK(a.candidates[i] == b.candidates[i]);

    CHECK(a.pairings.size() + a.skipped.size() == 4);  // floor(9/2), one row dropped
    std::vector<bool> seen(9, false);
    for (auto [j1, j2] : a.pairings) {
        CHECK_FALSE(seen[j1]);
        CHECK_FALSE(seen[j2]);
        seen[j1] = seen[j2] = true;
    }
}

TEST_CASE("candidates satisfy the pairing constraint and live in span(Y)") {
    DenseMatrix y = gen_gaussian_sensing(20, 4, RngStream{52, 3});
    CandidateSet c = er_spud_dc(y, RngStream{53, 3});
    Eigen::MatrixXd ey = y.to_eigen();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ey);
    for (std::size_t i = 0; i < c.candidates.size(); ++i) {
        const auto& s = c.candidates[i];
        auto [j1, j2] = c.pairings[i];
        CHECK(std::abs(s(static_cast<Eigen::Index>(j1)) +
                       s(static_cast<Eigen::Index>(j2)) - 1.0) <= 1e-9);
        Eigen::VectorXd proj = ey * qr.solve(s);
        CHECK((s - proj).norm() <= 1e-9 * std::max(1.0, s.norm()));
    }
}

TEST_CASE("candidates contain the component columns under the model") {
    // theta = 0.5 saturates 2/p = c2/sqrt(p) at p = 4; Z = identity.
    // At n = 64 the optimizer (verified against a vertex-enumeration brute
    // force) recovers all four columns in 13/20 seeds and 72/80 columns
    // overall; n = 128 recovers everything. Thresholds frozen from those
    // measurements with one seed of slack.
    int all4 = 0;
    std::size_t cols = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        DenseMatrix x =
            gen_component_matrix(64, 4, restricted(0.5), RngStream{60, seed});
        CandidateSet c = er_spud_dc(x, RngStream{61, seed});
        std::size_t rec = columns_recovered(x, c);
        cols += rec;
        if (rec == 4) ++all4;
    }
    CHECK(all4 >= 12);
    CHECK(cols >= 70);

    int good = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        DenseMatrix x =
            gen_component_matrix(128, 4, restricted(0.5), RngStream{62, seed});
        CandidateSet c = er_spud_dc(x, RngStream{63, seed});
        if (columns_recovered(x, c) == 4) ++good;
    }
    CHECK(good >= 16);  // >= 80% of seeds
}

TEST_CASE("greedy selection follows support order and rank") {
    const std::size_t n = 4;
    CandidateSet dup;
    dup.candidates = {unit(n, 0), unit(n, 0), unit(n, 1)};
    dup.pairings = {{0, 1}, {1, 2}, {2, 3}};
    DenseMatrix sel = greedy_sparsest_full_rank(dup, 0.0);
    REQUIRE(sel.cols() == 2);
    CHECK((sel.col_vector(0) - unit(n, 0)).norm() == 0.0);
    CHECK((sel.col_vector(1) - unit(n, 1)).norm() == 0.0);

    CandidateSet mix;
    mix.candidates = {unit(n, 0) + unit(n, 1), unit(n, 0), unit(n, 1)};
    mix.pairings = {{0, 1}, {1, 2}, {2, 3}};
    DenseMatrix sel2 = greedy_sparsest_full_rank(mix, 0.0);
    REQUIRE(sel2.cols() == 2);
    CHECK((sel2.col_vector(0) - unit(n, 0)).norm() == 0.0);
    CHECK((sel2.col_vector(1) - unit(n, 1)).norm() == 0.0);

    CandidateSet par;
    par.candidates = {unit(n, 2), 2.0 * unit(n, 2), -0.5 * unit(n, 2)};
    par.pairings = {{0, 1}, {1, 2}, {2, 3}};
    DenseMatrix sel3 = greedy_sparsest_full_rank(par, 0.0);
    CHECK(sel3.cols() == 1);

    CHECK(error_name([] {
              greedy_sparsest_full_rank(CandidateSet{}, 0.0);
          }) == "NoCandidates");
}

TEST_CASE("factorization recovers both factors with an identity-like Z") {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DenseMatrix x =
            gen_component_matrix(64, 4, restricted(0.5), RngStream{70, seed});
        // Z = signed scaled permutation of identity(4)
        DenseMatrix z = gen_training_matrix(4, 4, 1, RngStream{71, seed});
        DenseMatrix y = DenseMatrix::from_eigen(x.map() * z.map());
        try {
            FactorizationResult f = sparse_factorization(y, RngStream{72, seed});
            REQUIRE(f.residual <= 1e-8);
            REQUIRE(f.x_bar.cols() == 4);
            auto rx = match_up_to_signed_scaled_permutation(x, f.x_bar, 1e-6);
            // Z_bar must be the inverse scaled permutation: compare row
            // structure through transposes.
            DenseMatrix zt = DenseMatrix::from_eigen(z.to_eigen().transpose());
            DenseMatrix zbt =
                DenseMatrix::from_eigen(f.z_bar.to_eigen().transpose());
            auto rz = match_up_to_signed_scaled_permutation(zt, zbt, 1e-6);
            if (rx.matched && rz.matched) ++good;
        } catch (const domain_error&) {
        }
    }
    CHECK(good >= 8);
}

TEST_CASE("factorization at model sizes with a staggered Z") {
    // smaller sibling of the acceptance sizes: p = 4 forces theta = 0.5
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DenseMatrix x =
            gen_component_matrix(256, 4, restricted(0.5), RngStream{80, seed});
        DenseMatrix z = gen_training_matrix(4, 8, 2, RngStream{81, seed});
        DenseMatrix y = DenseMatrix::from_eigen(x.map() * z.map());
        try {
            FactorizationResult f = sparse_factorization(y, RngStream{82, seed});
            Eigen::MatrixXd recon = f.x_bar.to_eigen() * f.z_bar.to_eigen();
            CHECK((recon - y.to_eigen()).norm() <= 1e-8 * y.to_eigen().norm());
            if (f.x_bar.cols() == 4 &&
                match_up_to_signed_scaled_permutation(x, f.x_bar, 1e-6).matched)
                ++good;
        } catch (const domain_error&) {
        }
    }
    CHECK(good >= 8);
}

TEST_CASE("noise with more directions than candidates fails the residual") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DenseMatrix y = gen_gaussian_sensing(8, 10, RngStream{90, seed});
        CHECK(error_name([&] {
                  sparse_factorization(y, RngStream{91, seed});
              }) == "FactorizationFailed");
    }
}

TEST_CASE("generated component matrices have full column rank") {
    int full = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        DenseMatrix x = gen_component_matrix(512, 6, restricted(2.0 / 6.0),
                                             RngStream{95, seed});
        if (numerical_rank(x) == 6) ++full;
    }
    CHECK(full >= 95);
}
