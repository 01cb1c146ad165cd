#ifndef UCPM_NUMKERNEL_HPP
#define UCPM_NUMKERNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ucpm/errors.hpp"

namespace ucpm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Tolerances used by every predicate in the library. `atol` is an absolute
// bound on operator norms; `rank_rtol` is the relative eigenvalue cutoff for
// rank decisions on hermitian Gram matrices.
struct Tolerance {
  double atol = 1e-8;
  double rank_rtol = 1e-10;

  void validate() const {
    require(atol > 0.0 && rank_rtol > 0.0, errc::bad_parameters,
            "tolerances must be positive");
  }
};

//=========================================================================
// Basic matrix helpers
//=========================================================================

// Operator norm (largest singular value). Hermitian inputs take the
// eigenvalue path, everything else an SVD.
double op_norm(const Matrix& m);

double hermiticity_defect(const Matrix& m);

// (m + m^*) / 2 as a fresh matrix; safe to assign back to m.
Matrix hermitized(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

// vec/unvec use Eigen's column-major layout.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index rows, Index cols);

void check_finite(const Matrix& m, const char* what);

//=========================================================================
// Spectral primitives
//=========================================================================

// Eigenvalues descending; eigenvector columns aligned with them.
struct HermEig {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

HermEig herm_eig(const Matrix& m, const Tolerance& tol);

// True iff the smallest eigenvalue of (high - low) is >= -atol.
bool psd_cone_order(const Matrix& low, const Matrix& high,
                    const Tolerance& tol);

// Orthonormal basis of the numerical kernel, columns of the returned matrix.
// Rank decisions run on the hermitian Gram m^* m.
Matrix null_space(const Matrix& m, const Tolerance& tol);

struct SpectralCluster {
  double eigenvalue;   // cluster center (mean of member eigenvalues)
  Matrix projection;   // orthogonal projection onto the cluster eigenspace
};

// Spectral projections of a hermitian matrix with single-linkage clustering
// of eigenvalues at gap threshold max(atol, rank_rtol * |lambda|_max).
std::vector<SpectralCluster> spectral_projections(const Matrix& m,
                                                  const Tolerance& tol);

// Numerical rank of a hermitian PSD matrix: eigenvalues above
// rank_rtol * lambda_max.
Index psd_rank(const Matrix& m, const Tolerance& tol);

//=========================================================================
// Seeded randomness (corpus generation, generic spectral splits)
//=========================================================================

using Rng = std::mt19937_64;

Matrix random_gaussian(Index rows, Index cols, Rng& rng);

// Columns orthonormalized by modified Gram-Schmidt; requires rows >= cols.
Matrix random_isometry(Index rows, Index cols, Rng& rng);

}  // namespace ucpm

#endif
