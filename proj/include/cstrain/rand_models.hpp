#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "cstrain/dense_matrix.hpp"

namespace cstrain {

/// Law of the subgaussian factor R in the Bernoulli-Subgaussian model.
enum class EntryDist { StandardGaussian, Rademacher, UniformSym };

const char* to_string(EntryDist d);
EntryDist entry_dist_from_string(const std::string& s);

/// Bernoulli-Subgaussian parameters: entries are Omega*R with
/// Omega ~ Bernoulli(theta) and R ~ dist, E[R^2] = nu^2.
struct ModelSpec {
    double theta = 0.25;
    EntryDist dist = EntryDist::StandardGaussian;
    double nu = 1.0;
    double k_psi2 = 1.0;  // psi_2 bound K, informational
};

/// Throws InvalidSpec unless theta in (0,1], nu > 0, and nu = 1 for the
/// StandardGaussian/Rademacher laws.
void validate(const ModelSpec& spec);

/// Numeric check of the restricted-model conditions: R symmetric with no
/// atom at zero, E|R| in [1/10, 1], E[R^2] <= 1, and the Gaussian tail
/// bound P(|R| > tau) <= 2 exp(-tau^2/2) (evaluated in closed form per law).
bool satisfies_restricted_model(const ModelSpec& spec);

/// Addressable random stream: identical (master_seed, stream_id) yields an
/// identical draw sequence everywhere.
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    /// Derived sub-stream; child(a) != child(b) for a != b by finalizer mixing.
    RngStream child(std::uint64_t tag) const;
};

/// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
std::uint64_t mix64(std::uint64_t z);

/// Counter-free splittable engine. The state is
/// mix64(master_seed) ^ mix64(mix64(stream_id) + golden), so nearby seeds
/// and stream ids decorrelate. Gaussians come from the Marsaglia polar
/// method (log/sqrt only, pair-cached).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    explicit SplitMix64(RngStream stream);

    std::uint64_t next();
    /// Uniform in [0,1), 53-bit resolution.
    double next_unit();
    /// Standard normal.
    double next_gaussian();
    /// Uniform integer in [0, bound), unbiased (Lemire).
    std::uint64_t next_below(std::uint64_t bound);
    /// +1.0 or -1.0 from the top bit of one draw.
    double next_sign();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// X_jk = Omega_jk * R_jk, entries drawn in row-major order (mask then
/// value), n rows by p columns.
DenseMatrix gen_component_matrix(std::size_t n, std::size_t p,
                                 const ModelSpec& spec, RngStream rng);

/// Exactly k nonzeros, support uniform without replacement, magnitudes
/// uniform in [1,2] with independent signs.
Eigen::VectorXd gen_sparse_combinator(std::size_t p, std::size_t k,
                                      RngStream rng);

/// p-by-q combinator matrix: the first p columns are k_easy-sparse with
/// staggered cyclic supports (column i holds index i) and a dominant
/// diagonal entry, which forces rank p; the remaining q-p columns are
/// k_easy-sparse draws.
DenseMatrix gen_training_matrix(std::size_t p, std::size_t q,
                                std::size_t k_easy, RngStream rng);

/// i.i.d. N(0, 1/m) entries, so columns have unit expected squared norm.
DenseMatrix gen_gaussian_sensing(std::size_t m, std::size_t n, RngStream rng);

}  // namespace cstrain
