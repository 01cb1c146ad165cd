#ifndef UCPM_DILATION_HPP
#define UCPM_DILATION_HPP

#include <string>
#include <utility>
#include <vector>

#include "ucpm/algebra.hpp"

namespace ucpm {

// A completely positive map phi : A -> M_n given by its images on the
// algebra basis. Unital maps are the main citizens; sub-unital CP maps
// (weighted measure atoms, Radon-Nikodym images) use the same carrier and
// are screened by `require_unital` where a contract needs it.
struct CpMap {
  AlgebraPtr algebra;
  Index out_dim = 0;            // n, codomain M_n
  std::vector<Matrix> images;   // one n x n matrix per basis element

  Index algebra_dim() const { return algebra ? algebra->dim() : 0; }

  // Structural sanity: shapes, finiteness, *-preservation via the adjoint
  // table. Does not decide complete positivity.
  void validate_structure(const Tolerance& tol = {}) const;

  // || phi(1_A) - I_n || computed through unit coordinates.
  double unitality_defect() const;

  // Evaluate on an arbitrary ambient matrix through basis coordinates.
  Matrix apply(const Matrix& x, const Tolerance& tol = {}) const;

  CpMap scaled(double factor) const;

  friend CpMap operator+(const CpMap& a, const CpMap& b);
};

// max over basis elements of || phi(b_i) - psi(b_i) ||.
double map_distance(const CpMap& a, const CpMap& b);

// Hermitian kn x kn form with block (i,j) = phi(b_i^* b_j), expanded through
// the structure tables. PSD exactly when phi is completely positive.
Matrix cp_gram(const CpMap& phi, const Tolerance& tol = {});

bool is_completely_positive(const CpMap& phi, const Tolerance& tol = {});

// Choi matrix sum_ij E_ij (x) phi(E_ij) on full matrix algebras only;
// the independent cross-check path next to the Gram construction.
Matrix choi_matrix(const CpMap& phi, const Tolerance& tol = {});

// Minimal Stinespring dilation phi(a) = V^* rho(a) V on K = C^r, together
// with the retained coordinate factor c : A (x) H coordinates -> K from the
// Gram factorization (the workhorse of every Radon-Nikodym computation).
struct StinespringTriple {
  CpMap source;
  Index dil_dim = 0;              // r
  Matrix V;                       // r x n
  std::vector<Matrix> rho_images; // r x r
  Matrix coord_factor;            // c,  r x (k n)
  Matrix coord_pinv;              // c^+, (k n) x r
  Matrix range_proj;              // c c^+ on K; identity iff minimal
  double gram_trace = 0.0;        // tr cp_gram(source)
  bool minimal = true;

  Index out_dim() const { return source.out_dim; }

  // rho extended to an arbitrary ambient matrix via basis coordinates.
  Matrix rho_apply(const Matrix& x, const Tolerance& tol = {}) const;

  // Assemble a (possibly non-minimal) dilation from explicit parts; the
  // coordinate factor is rebuilt from the spanning set rho(b_j) V e_t.
  static StinespringTriple from_parts(CpMap source, Matrix V,
                                      std::vector<Matrix> rho_images,
                                      const Tolerance& tol = {});
};

StinespringTriple minimal_stinespring(const CpMap& phi,
                                      const Tolerance& tol = {},
                                      bool require_unital = true);

// Named residuals that pin a dilation: isometry (V^*V against phi(1)),
// reproduction, homomorphism, adjoint, unitality of rho, minimality rank.
struct DilationReport {
  std::vector<std::pair<std::string, double>> residuals;
  Index spanning_rank = 0;
  bool minimal = false;

  double max_residual() const;
  bool passes(const Tolerance& tol) const;
};

DilationReport verify_dilation(const StinespringTriple& triple,
                               const Tolerance& tol = {});

}  // namespace ucpm

#endif
