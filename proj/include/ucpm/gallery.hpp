#ifndef UCPM_GALLERY_HPP
#define UCPM_GALLERY_HPP

#include <cstdint>

#include "ucpm/measures.hpp"

namespace ucpm {

// State on a concretely represented algebra, given by density-like data:
// omega(x) = tr(W x). W must be PSD with trace 1 within atol.
CpMap state_instance(const AlgebraPtr& algebra, const Matrix& density,
                     const Tolerance& tol = {});

// The ambient algebra M_n(A), materialized as the closure of the matrices
// E_st (x) b_i inside (n d) x (n d).
AlgebraPtr matrix_amplification(const AlgebraPtr& algebra, Index n,
                                const Tolerance& tol = {});

// Entrywise pushforward: a state measure on A becomes a measure of maps
// [a_st] -> [omega'(a_st)] on M_n(A) with the same weights.
DiscreteMeasure example_entrywise(const DiscreteMeasure& state_measure,
                                  Index n, const Tolerance& tol = {});

// Diagonal pushforward: atoms a -> omega'(a) * I_n on the original algebra.
DiscreteMeasure example_diagonal(const DiscreteMeasure& state_measure,
                                 Index n, const Tolerance& tol = {});

// Seeded random UCP map on the full algebra M_d, realized as the
// compression a -> X^* (a (x) 1_rank) X of a Gaussian-orthonormal isometry.
CpMap random_ucp(Index d, Index n, Index kraus_rank, std::uint64_t seed);

// Seeded random state on the full algebra M_d: density W = G G^* / tr,
// with G Gaussian d x rank.
CpMap random_state(Index d, Index rank, std::uint64_t seed);

// Random orthogonal measure with the given barycenter: spectral projections
// of a random hermitian commutant element, coarsened until the projection
// family reads off a measure. Falls back to the point mass when only the
// trivial family works.
DiscreteMeasure random_orthogonal_measure(const CpMap& phi, Index max_atoms,
                                          std::uint64_t seed,
                                          const Tolerance& tol = {},
                                          const MeasureOptions& opts = {});

}  // namespace ucpm

#endif
