#pragma once

// Seeded pseudorandom fixtures. Everything here is reproducible for a given
// engine state.

#include <cstdint>
#include <random>

#include "rqm/algebra.hpp"
#include "rqm/linear_map.hpp"

namespace rqm {

using Rng = std::mt19937_64;

CMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);
/// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
CMatrix random_unitary(std::size_t n, Rng& rng);

Element random_element(const Algebra& a, Rng& rng);
/// G G* normalized to unit total trace, G Gaussian per block.
State random_state(const Algebra& a, Rng& rng);
State random_state(const Algebra& a, std::uint64_t seed);
std::vector<double> random_probability_vector(std::size_t n, Rng& rng);

/// All multiplicity vectors k >= 0 with sum_j k_j * sizes[j] == target.
std::vector<std::vector<std::size_t>> multiplicity_solutions(const std::vector<std::size_t>& sizes,
                                                             std::size_t target);

/// True iff a unital *-morphism domain -> codomain exists.
bool has_unital_morphism(const Algebra& domain, const Algebra& codomain);

/// The representation b -> ⊕_j (I_{k_j} ⊗ b_j) of `domain` on sum_j k_j n_j dimensions.
LinearMap multiplicity_representation(const Algebra& domain, const std::vector<std::size_t>& multiplicities);

/// A unital morphism chosen by random multiplicities and random unitary
/// conjugation per target block. Throws ErrorCode::UnsupportedShape if none exists.
LinearMap random_morphism(const Algebra& domain, const Algebra& codomain, Rng& rng);

/// A unital CP map from random Kraus operators normalized to sum K*K = 1.
LinearMap random_cp_unital(const Algebra& domain, const Algebra& codomain, Rng& rng,
                           std::size_t kraus_per_block = 2);

}  // namespace rqm
