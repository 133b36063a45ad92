#pragma once

// Seeded random operators and states for property tests, scans and the
// lhv-check command.

#include <cstdint>
#include <random>

#include "bellmom/inequalities.hpp"
#include "bellmom/qcore.hpp"

namespace bellmom {

using Rng = std::mt19937_64;

/// Engine for independent substream `stream` of `seed`. Streams with distinct
/// (seed, stream, purpose) triples are seeded through distinct seed_seq inputs.
Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose = 0);

namespace random {

/// Entries with Gaussian real and imaginary parts, Hermitian-symmetrized.
qcore::ComplexMatrix hermitian(std::size_t dim, Rng& rng, double scale = 1.0);
/// Haar-distributed unitary (Gram-Schmidt of a complex Ginibre matrix).
qcore::ComplexMatrix unitary(std::size_t dim, Rng& rng);
/// Rank-`rank` orthogonal projector onto a random subspace.
qcore::ComplexMatrix projector(std::size_t dim, Rng& rng, std::size_t rank = 1);
/// Unit vector uniform on the complex sphere.
std::vector<qcore::Complex> unit_vector(std::size_t dim, Rng& rng);
qcore::BipartiteState state(std::size_t dim_a, std::size_t dim_b, Rng& rng);

/// Gaussian coefficients rescaled so that sum_i |t_i|_2^2 = 1 (spectral
/// norms). That makes sum_i (a^T t_i b)^2 <= |a|^2 |b|^2, so the resulting
/// inequality holds for every classical assignment.
ineq::SallesCoefficients salles_coefficients(int terms, int choices_a, int choices_b, Rng& rng);

}  // namespace random
}  // namespace bellmom
