#ifndef UCPM_ALGEBRA_HPP
#define UCPM_ALGEBRA_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ucpm/numkernel.hpp"

namespace ucpm {

// A finite-dimensional *-algebra realized concretely inside d x d matrices.
//
// The basis is orthonormal under the normalized trace inner product
// <x,y> = tr(y^* x)/d. Multiplication and adjoint are stored as structure
// constants so that maps defined on the basis extend to the whole algebra
// without touching the ambient matrices again:
//   b_i b_j   = sum_l left_mult[i](l, j) b_l
//   b_i^*     = sum_l adj_table(i, l)    b_l
//   identity  = sum_l unit_coords(l)     b_l
struct StarAlgebra {
  Index ambient_dim = 0;            // d
  std::vector<Matrix> basis;        // k matrices, each d x d
  std::vector<Matrix> left_mult;    // k matrices, each k x k
  std::vector<Matrix> star_left;    // coords of b_i^* b_j, column j of [i]
  Matrix adj_table;                 // k x k
  Vector unit_coords;               // k

  Index dim() const { return static_cast<Index>(basis.size()); }

  // Structure coefficient c[i][j][l] with b_i b_j = sum_l c[i][j][l] b_l.
  Complex mult_coeff(Index i, Index j, Index l) const {
    return left_mult[i](l, j);
  }

  // Coordinates of b_i^* b_j.
  Vector star_mult_coords(Index i, Index j) const {
    return star_left[i].col(j);
  }

  Matrix reconstruct(const Vector& coords) const;

  // True iff this is the full matrix algebra on C^d.
  bool is_full() const { return dim() == ambient_dim * ambient_dim; }
};

using AlgebraPtr = std::shared_ptr<const StarAlgebra>;

// Commuting self-adjoint family inside some ambient B(C^r), normalized to
// its minimal projections.
struct AbelianSubalgebra {
  Index ambient_dim = 0;
  std::vector<Matrix> min_projections;
  std::vector<std::string> labels;

  Index size() const { return static_cast<Index>(min_projections.size()); }
};

struct MembershipResult {
  bool member = false;
  Vector coords;
  double residual = 0.0;
};

//=========================================================================
// Operations
//=========================================================================

// Smallest unital *-subalgebra of M_d containing the generators.
// Closure by repeated basis products, re-orthonormalized each round, until
// the dimension is stable for a full round.
AlgebraPtr close_star_algebra(Index ambient_dim,
                              const std::vector<Matrix>& generators,
                              const Tolerance& tol = {});

// Full matrix algebra M_d with the canonical orthonormal basis
// sqrt(d) * E_ij (row-major over (i,j)) and exact structure constants.
AlgebraPtr full_matrix_algebra(Index d);

// Adopt an already-closed orthonormal basis verbatim (no closure round, no
// reordering). Fails when the list is not orthonormal or not closed.
AlgebraPtr algebra_from_basis(Index ambient_dim, std::vector<Matrix> basis,
                              const Tolerance& tol = {});

// Orthonormal basis (normalized trace inner product) of
// {T : S_i T = T S_i for every input}. Computed by intersecting the null
// spaces of the commutation maps T -> S_i T - T S_i on coordinate space.
std::vector<Matrix> commutant(const std::vector<Matrix>& operators,
                              const Tolerance& tol = {});

// Joint spectral projections of a commuting hermitian family. Splits the
// spectral projections of one generic random combination until every family
// member restricts to a scalar on every block.
AbelianSubalgebra minimal_projections(const std::vector<Matrix>& family,
                                      const Tolerance& tol = {},
                                      std::uint64_t seed = 0x5eed5eedULL);

// Distance from X to span(basis); coordinates returned when inside.
MembershipResult membership(const std::vector<Matrix>& algebra_basis,
                            const Matrix& X, const Tolerance& tol = {});

// Normalized trace inner product <x,y> = tr(y^* x)/dim.
Complex trace_dot(const Matrix& x, const Matrix& y);

}  // namespace ucpm

#endif
