#include "ucpm/radonnikodym.hpp"

#include <cmath>

namespace ucpm {

bool in_order_interval(const CpMap& theta, const CpMap& phi,
                       const Tolerance& tol) {
  require(theta.algebra == phi.algebra, errc::shape_mismatch,
          "maps live on different algebras");
  require(theta.out_dim == phi.out_dim, errc::shape_mismatch,
          "maps have different codomains");
  if (!is_completely_positive(theta, tol)) return false;
  return psd_cone_order(cp_gram(theta, tol), cp_gram(phi, tol), tol);
}

RnOperator rn_operator(const CpMap& theta, const StinespringTriple& base,
                       const Tolerance& tol) {
  tol.validate();
  require(in_order_interval(theta, base.source, tol), errc::not_dominated,
          "theta does not sit below the base map");

  const Matrix gram_theta = cp_gram(theta, tol);
  const Index r = base.dil_dim;

  RnOperator out;
  Matrix t = base.coord_pinv.adjoint() * gram_theta * base.coord_pinv;
  if (!base.minimal) {
    const double share =
        base.gram_trace > 0.0
            ? std::real(gram_theta.trace()) / base.gram_trace
            : 0.0;
    t += share * (Matrix::Identity(r, r) - base.range_proj);
  }
  out.T = 0.5 * (t + t.adjoint());

  const Matrix support = base.coord_pinv * base.coord_factor;
  out.discarded_mass =
      op_norm(Matrix(gram_theta - support * gram_theta * support));

  for (std::size_t i = 0; i < base.rho_images.size(); ++i) {
    const Matrix& rho = base.rho_images[i];
    out.commutant_residual = std::max(
        out.commutant_residual, op_norm(Matrix(rho * out.T - out.T * rho)));
    out.reproduction_residual = std::max(
        out.reproduction_residual,
        op_norm(Matrix(base.V.adjoint() * out.T * rho * base.V -
                       theta.images[i])));
  }
  const HermEig eig = herm_eig(out.T, tol);
  const double lam_min = eig.eigenvalues(eig.eigenvalues.size() - 1);
  const double lam_max = eig.eigenvalues(0);
  out.interval_residual =
      std::max({0.0, -lam_min, lam_max - 1.0});
  return out;
}

CpMap map_from_operator(const Matrix& T, const StinespringTriple& base,
                        const Tolerance& tol) {
  tol.validate();
  const Index r = base.dil_dim;
  require(T.rows() == r && T.cols() == r, errc::shape_mismatch,
          "operator shape");
  const HermEig eig = herm_eig(T, tol);  // throws NotHermitian when needed
  const double lam_min = eig.eigenvalues(r - 1);
  const double lam_max = eig.eigenvalues(0);
  require(lam_min >= -tol.atol && lam_max <= 1.0 + tol.atol,
          errc::not_in_interval,
          "spectrum [" + std::to_string(lam_min) + ", " +
              std::to_string(lam_max) + "] leaves [0, 1]");
  for (const Matrix& rho : base.rho_images) {
    const double res = op_norm(Matrix(rho * T - T * rho));
    require(res <= 10.0 * tol.atol, errc::not_in_commutant,
            "commutation residual " + std::to_string(res));
  }

  CpMap out;
  out.algebra = base.source.algebra;
  out.out_dim = base.source.out_dim;
  out.images.reserve(base.rho_images.size());
  for (const Matrix& rho : base.rho_images)
    out.images.push_back(base.V.adjoint() * T * rho * base.V);
  return out;
}

}  // namespace ucpm
