#include "ucpm/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace ucpm {

const char* errc_name(errc code) {
  switch (code) {
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::weight_sum_invalid: return "WeightSumInvalid";
    case errc::bad_parameters: return "BadParameters";
    case errc::invalid_instance: return "InvalidInstance";
    case errc::unknown_name: return "UnknownName";
    case errc::numerical_failure: return "NumericalFailure";
    case errc::dimension_overflow: return "DimensionOverflow";
    case errc::structure_residual: return "StructureResidual";
    case errc::homomorphism_residual: return "HomomorphismResidual";
    case errc::not_hermitian: return "NotHermitian";
    case errc::not_commuting: return "NotCommuting";
    case errc::not_cp: return "NotCP";
    case errc::not_unital: return "NotUnital";
    case errc::sum_not_unital: return "SumNotUnital";
    case errc::not_full_algebra: return "NotFullAlgebra";
    case errc::not_dominated: return "NotDominated";
    case errc::not_in_commutant: return "NotInCommutant";
    case errc::not_in_interval: return "NotInInterval";
    case errc::base_mismatch: return "BaseMismatch";
    case errc::barycenter_mismatch: return "BarycenterMismatch";
    case errc::not_orthogonal_measure: return "NotOrthogonalMeasure";
    case errc::not_unitary: return "NotUnitary";
    case errc::not_state: return "NotState";
    case errc::no_subalgebra_found: return "NoSubalgebraFound";
  }
  return "Error";
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite())
    fail(errc::numerical_failure, std::string(what) + " has NaN/Inf entries");
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols()) {
    const double defect = (m - m.adjoint()).norm();
    if (defect <= 1e-13 * (1.0 + m.norm())) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()),
                                               Eigen::EigenvaluesOnly);
      if (es.info() == Eigen::Success)
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols())
    fail(errc::shape_mismatch, "hermiticity defect of a non-square matrix");
  return op_norm(Matrix(m - m.adjoint()));
}

Matrix hermitized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  require(v.size() == rows * cols, errc::shape_mismatch, "unvec size");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

HermEig herm_eig(const Matrix& m, const Tolerance& tol) {
  tol.validate();
  require(m.rows() == m.cols(), errc::shape_mismatch,
          "herm_eig requires a square matrix");
  check_finite(m, "herm_eig input");
  const double defect = hermiticity_defect(m);
  if (defect > tol.atol)
    fail(errc::not_hermitian,
         "hermiticity defect " + std::to_string(defect));

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success)
    fail(errc::numerical_failure, "hermitian eigensolver did not converge");

  // Eigen returns ascending order; flip to descending.
  const Index n = m.rows();
  HermEig out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = Matrix(n, n);
  for (Index j = 0; j < n; ++j)
    out.eigenvectors.col(j) = es.eigenvectors().col(n - 1 - j);
  return out;
}

bool psd_cone_order(const Matrix& low, const Matrix& high,
                    const Tolerance& tol) {
  require(low.rows() == low.cols() && high.rows() == high.cols() &&
              low.rows() == high.rows(),
          errc::shape_mismatch, "psd_cone_order shapes");
  const HermEig eig = herm_eig(Matrix(high - low), tol);
  return eig.eigenvalues(eig.eigenvalues.size() - 1) >= -tol.atol;
}

Matrix null_space(const Matrix& m, const Tolerance& tol) {
  tol.validate();
  check_finite(m, "null_space input");
  const Index cols = m.cols();
  if (cols == 0) return Matrix(0, 0);

  const Matrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()));
  if (es.info() != Eigen::Success)
    fail(errc::numerical_failure, "null_space eigensolver did not converge");

  const RealVector lam = es.eigenvalues();  // ascending
  const double lam_max = std::max(lam(cols - 1), 0.0);
  const double sigma_max = std::sqrt(lam_max);
  // Null directions: below the absolute residual target or below the
  // relative rank cutoff of the Gram spectrum, whichever is larger. The
  // row-space polish below restores residuals to roundoff level.
  const double cut = std::max(std::pow(tol.atol * (1.0 + sigma_max), 2),
                              tol.rank_rtol * lam_max);

  Index nullity = 0;
  while (nullity < cols && lam(nullity) <= cut) ++nullity;
  if (nullity == 0) return Matrix(cols, 0);

  Matrix basis = es.eigenvectors().leftCols(nullity);
  if (nullity < cols) {
    // Strip row-space contamination left by the eigensolver, then
    // re-orthonormalize. Keeps ||m v|| at roundoff level.
    const Matrix row_space = es.eigenvectors().rightCols(cols - nullity);
    basis -= row_space * (row_space.adjoint() * basis);
    Eigen::HouseholderQR<Matrix> qr(basis);
    basis = Matrix(qr.householderQ()) * Matrix::Identity(cols, nullity);
  }
  return basis;
}

std::vector<SpectralCluster> spectral_projections(const Matrix& m,
                                                  const Tolerance& tol) {
  const HermEig eig = herm_eig(m, tol);
  const Index n = m.rows();
  const double scale = n > 0 ? eig.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double gap = std::max(tol.atol, tol.rank_rtol * scale);

  std::vector<SpectralCluster> out;
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n &&
           eig.eigenvalues(stop - 1) - eig.eigenvalues(stop) <= gap)
      ++stop;
    SpectralCluster cluster;
    cluster.eigenvalue =
        eig.eigenvalues.segment(start, stop - start).mean();
    const Matrix q = eig.eigenvectors.middleCols(start, stop - start);
    cluster.projection = q * q.adjoint();
    out.push_back(std::move(cluster));
    start = stop;
  }
  return out;
}

Index psd_rank(const Matrix& m, const Tolerance& tol) {
  const HermEig eig = herm_eig(m, tol);
  if (eig.eigenvalues.size() == 0) return 0;
  const double cut = tol.rank_rtol * std::max(eig.eigenvalues(0), 0.0);
  Index rank = 0;
  while (rank < eig.eigenvalues.size() && eig.eigenvalues(rank) > cut)
    ++rank;
  return rank;
}

Matrix random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      out(i, j) = Complex(re, im);
    }
  return out;
}

Matrix random_isometry(Index rows, Index cols, Rng& rng) {
  require(rows >= cols, errc::bad_parameters,
          "random_isometry needs rows >= cols");
  Matrix g = random_gaussian(rows, cols, rng);
  for (Index j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i < j; ++i)
        g.col(j) -= g.col(i).dot(g.col(j)) * g.col(i);
    const double norm = g.col(j).norm();
    require(norm > 1e-12, errc::numerical_failure,
            "degenerate Gaussian draw in random_isometry");
    g.col(j) /= norm;
  }
  return g;
}

}  // namespace ucpm
