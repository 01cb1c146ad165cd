#include "ucpm/dilation.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace ucpm {

void CpMap::validate_structure(const Tolerance& tol) const {
  tol.validate();
  require(algebra != nullptr, errc::bad_parameters, "map without algebra");
  const Index k = algebra->dim();
  require(static_cast<Index>(images.size()) == k, errc::shape_mismatch,
          "one image per basis element required");
  require(out_dim > 0, errc::bad_parameters, "out_dim must be >= 1");
  for (const Matrix& img : images) {
    require(img.rows() == out_dim && img.cols() == out_dim,
            errc::shape_mismatch, "image shape");
    check_finite(img, "map image");
  }
  // phi(b_i^*) must equal phi(b_i)^* after expanding through adj_table.
  for (Index i = 0; i < k; ++i) {
    Matrix adj_image = Matrix::Zero(out_dim, out_dim);
    for (Index l = 0; l < k; ++l)
      adj_image += algebra->adj_table(i, l) * images[l];
    const double res = op_norm(Matrix(adj_image - images[i].adjoint()));
    require(res <= 10.0 * tol.atol, errc::not_hermitian,
            "*-preservation residual " + std::to_string(res) +
                " on basis element " + std::to_string(i));
  }
}

double CpMap::unitality_defect() const {
  Matrix unit_image = Matrix::Zero(out_dim, out_dim);
  for (Index l = 0; l < algebra->dim(); ++l)
    unit_image += algebra->unit_coords(l) * images[l];
  return op_norm(Matrix(unit_image - Matrix::Identity(out_dim, out_dim)));
}

Matrix CpMap::apply(const Matrix& x, const Tolerance& tol) const {
  const MembershipResult mem = membership(algebra->basis, x, tol);
  require(mem.member, errc::shape_mismatch,
          "argument lies outside the algebra, distance " +
              std::to_string(mem.residual));
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Index l = 0; l < algebra->dim(); ++l)
    out += mem.coords(l) * images[l];
  return out;
}

CpMap CpMap::scaled(double factor) const {
  require(factor >= 0.0, errc::bad_parameters, "negative scale");
  CpMap out{algebra, out_dim, images};
  for (Matrix& img : out.images) img *= factor;
  return out;
}

CpMap operator+(const CpMap& a, const CpMap& b) {
  require(a.algebra == b.algebra, errc::shape_mismatch,
          "maps live on different algebras");
  require(a.out_dim == b.out_dim, errc::shape_mismatch,
          "maps have different codomains");
  CpMap out{a.algebra, a.out_dim, a.images};
  for (std::size_t i = 0; i < out.images.size(); ++i)
    out.images[i] += b.images[i];
  return out;
}

double map_distance(const CpMap& a, const CpMap& b) {
  require(a.algebra == b.algebra && a.out_dim == b.out_dim,
          errc::shape_mismatch, "map_distance shapes");
  double dist = 0.0;
  for (std::size_t i = 0; i < a.images.size(); ++i)
    dist = std::max(dist, op_norm(Matrix(a.images[i] - b.images[i])));
  return dist;
}

Matrix cp_gram(const CpMap& phi, const Tolerance& tol) {
  phi.validate_structure(tol);
  const StarAlgebra& alg = *phi.algebra;
  const Index k = alg.dim();
  const Index n = phi.out_dim;

  Matrix gram(k * n, k * n);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      Matrix block = Matrix::Zero(n, n);
      const Vector coords = alg.star_mult_coords(i, j);
      for (Index l = 0; l < k; ++l) block += coords(l) * phi.images[l];
      gram.block(i * n, j * n, n, n) = block;
    }
  const double defect = hermiticity_defect(gram);
  require(defect <= 10.0 * tol.atol, errc::structure_residual,
          "Gram form hermiticity defect " + std::to_string(defect));
  return 0.5 * (gram + gram.adjoint());
}

bool is_completely_positive(const CpMap& phi, const Tolerance& tol) {
  const Matrix gram = cp_gram(phi, tol);
  const HermEig eig = herm_eig(gram, tol);
  const double lam_min = eig.eigenvalues(eig.eigenvalues.size() - 1);
  const double scale = std::max(std::abs(eig.eigenvalues(0)), 0.0);
  return lam_min >= -tol.atol * (1.0 + scale);
}

Matrix choi_matrix(const CpMap& phi, const Tolerance& tol) {
  phi.validate_structure(tol);
  require(phi.algebra->is_full(), errc::not_full_algebra,
          "Choi matrix needs the full matrix algebra");
  const Index d = phi.algebra->ambient_dim;
  const Index n = phi.out_dim;
  Matrix choi = Matrix::Zero(d * n, d * n);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      choi.block(i * n, j * n, n, n) = phi.apply(unit, tol);
    }
  return choi;
}

Matrix StinespringTriple::rho_apply(const Matrix& x,
                                    const Tolerance& tol) const {
  const MembershipResult mem = membership(source.algebra->basis, x, tol);
  require(mem.member, errc::shape_mismatch,
          "argument lies outside the algebra");
  Matrix out = Matrix::Zero(dil_dim, dil_dim);
  for (Index l = 0; l < source.algebra->dim(); ++l)
    out += mem.coords(l) * rho_images[l];
  return out;
}

namespace {

// Column (j, t) of the spanning matrix is rho(b_j) V e_t. For triples built
// by the Gram factorization this equals the coordinate factor exactly.
Matrix spanning_matrix(const CpMap& source, const Matrix& V,
                       const std::vector<Matrix>& rho_images) {
  const Index k = source.algebra->dim();
  const Index n = source.out_dim;
  const Index r = V.rows();
  Matrix s(r, k * n);
  for (Index j = 0; j < k; ++j)
    s.middleCols(j * n, n) = rho_images[j] * V;
  return s;
}

}  // namespace

StinespringTriple StinespringTriple::from_parts(
    CpMap source, Matrix V, std::vector<Matrix> rho_images,
    const Tolerance& tol) {
  tol.validate();
  source.validate_structure(tol);
  const Index r = V.rows();
  require(V.cols() == source.out_dim, errc::shape_mismatch, "V shape");
  require(static_cast<Index>(rho_images.size()) == source.algebra->dim(),
          errc::shape_mismatch, "one rho image per basis element");
  for (const Matrix& m : rho_images)
    require(m.rows() == r && m.cols() == r, errc::shape_mismatch,
            "rho image shape");

  StinespringTriple triple;
  triple.source = std::move(source);
  triple.dil_dim = r;
  triple.V = std::move(V);
  triple.rho_images = std::move(rho_images);
  triple.coord_factor =
      spanning_matrix(triple.source, triple.V, triple.rho_images);

  // Pseudo-inverse with the rank cutoff applied to singular values, so the
  // decision matches the eigenvalue cutoff on the Gram c^* c.
  Eigen::JacobiSVD<Matrix> svd(triple.coord_factor,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sing = svd.singularValues();
  const double cut =
      sing.size() > 0 ? std::sqrt(tol.rank_rtol) * sing(0) : 0.0;
  Index rank = 0;
  while (rank < sing.size() && sing(rank) > cut) ++rank;
  require(rank > 0, errc::numerical_failure, "degenerate spanning set");
  const Matrix u = svd.matrixU().leftCols(rank);
  const Matrix v = svd.matrixV().leftCols(rank);
  const Vector inv_sing =
      sing.head(rank).cwiseInverse().cast<Complex>();
  triple.coord_pinv = v * inv_sing.asDiagonal() * u.adjoint();
  triple.range_proj = u * u.adjoint();
  triple.minimal = rank == r;
  triple.gram_trace =
      std::real(cp_gram(triple.source, tol).trace());
  return triple;
}

StinespringTriple minimal_stinespring(const CpMap& phi, const Tolerance& tol,
                                      bool require_unital) {
  tol.validate();
  const Matrix gram = cp_gram(phi, tol);
  const HermEig eig = herm_eig(gram, tol);
  const Index kn = gram.rows();
  const double lam_max = std::max(eig.eigenvalues(0), 0.0);
  const double lam_min = eig.eigenvalues(kn - 1);
  require(lam_min >= -tol.atol * (1.0 + lam_max), errc::not_cp,
          "Gram form has eigenvalue " + std::to_string(lam_min));
  if (require_unital) {
    const double unital = phi.unitality_defect();
    require(unital <= tol.atol, errc::not_unital,
            "unitality defect " + std::to_string(unital));
  }

  const double cut = tol.rank_rtol * lam_max;
  Index r = 0;
  while (r < kn && eig.eigenvalues(r) > cut) ++r;
  require(r > 0, errc::not_cp, "zero map has no unital dilation");

  const Matrix q_r = eig.eigenvectors.leftCols(r);
  const Eigen::ArrayXd lam = eig.eigenvalues.head(r).array();
  const Vector sqrt_lam = lam.sqrt().matrix().cast<Complex>();
  const Vector inv_sqrt_lam =
      lam.sqrt().inverse().matrix().cast<Complex>();

  StinespringTriple triple;
  triple.source = phi;
  triple.dil_dim = r;
  triple.coord_factor = sqrt_lam.asDiagonal() * q_r.adjoint();
  triple.coord_pinv = q_r * inv_sqrt_lam.asDiagonal();
  triple.range_proj = Matrix::Identity(r, r);
  triple.minimal = true;
  triple.gram_trace = std::real(gram.trace());

  const StarAlgebra& alg = *phi.algebra;
  const Index k = alg.dim();
  const Index n = phi.out_dim;
  const Matrix eye_n = Matrix::Identity(n, n);

  // rho(b_p) = c (L_p (x) I_n) c^+ with L_p left multiplication by b_p in
  // algebra coordinates.
  triple.rho_images.reserve(k);
  for (Index p = 0; p < k; ++p) {
    const Matrix lift = kron(alg.left_mult[p], eye_n);
    Matrix rho = triple.coord_factor * lift * triple.coord_pinv;
    triple.rho_images.push_back(std::move(rho));
  }
  // V = c (unit_coords (x) I_n).
  triple.V = triple.coord_factor * kron(alg.unit_coords, eye_n);

  // Loud failure if the rank cutoff mangled the quotient.
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      Matrix expanded = Matrix::Zero(r, r);
      for (Index l = 0; l < k; ++l)
        expanded += alg.mult_coeff(i, j, l) * triple.rho_images[l];
      const double res = op_norm(
          Matrix(triple.rho_images[i] * triple.rho_images[j] - expanded));
      require(res <= 10.0 * tol.atol, errc::homomorphism_residual,
              "representation residual " + std::to_string(res) +
                  " at basis pair (" + std::to_string(i) + "," +
                  std::to_string(j) + ")");
    }
  return triple;
}

double DilationReport::max_residual() const {
  double worst = 0.0;
  for (const auto& [name, value] : residuals) worst = std::max(worst, value);
  return worst;
}

bool DilationReport::passes(const Tolerance& tol) const {
  return minimal && max_residual() <= 10.0 * tol.atol;
}

DilationReport verify_dilation(const StinespringTriple& triple,
                               const Tolerance& tol) {
  tol.validate();
  const StarAlgebra& alg = *triple.source.algebra;
  const Index k = alg.dim();
  const Index n = triple.source.out_dim;
  const Index r = triple.dil_dim;

  DilationReport report;

  Matrix unit_image = Matrix::Zero(n, n);
  for (Index l = 0; l < k; ++l)
    unit_image += alg.unit_coords(l) * triple.source.images[l];
  report.residuals.emplace_back(
      "isometry", op_norm(Matrix(triple.V.adjoint() * triple.V - unit_image)));

  double reproduction = 0.0;
  for (Index i = 0; i < k; ++i)
    reproduction = std::max(
        reproduction,
        op_norm(Matrix(triple.V.adjoint() * triple.rho_images[i] * triple.V -
                       triple.source.images[i])));
  report.residuals.emplace_back("reproduction", reproduction);

  double homomorphism = 0.0;
  double adjoint = 0.0;
  for (Index i = 0; i < k; ++i) {
    Matrix adj_expanded = Matrix::Zero(r, r);
    for (Index l = 0; l < k; ++l)
      adj_expanded += alg.adj_table(i, l) * triple.rho_images[l];
    adjoint = std::max(
        adjoint,
        op_norm(Matrix(triple.rho_images[i].adjoint() - adj_expanded)));
    for (Index j = 0; j < k; ++j) {
      Matrix expanded = Matrix::Zero(r, r);
      for (Index l = 0; l < k; ++l)
        expanded += alg.mult_coeff(i, j, l) * triple.rho_images[l];
      homomorphism = std::max(
          homomorphism,
          op_norm(
              Matrix(triple.rho_images[i] * triple.rho_images[j] - expanded)));
    }
  }
  report.residuals.emplace_back("homomorphism", homomorphism);
  report.residuals.emplace_back("adjoint", adjoint);

  Matrix rho_unit = Matrix::Zero(r, r);
  for (Index l = 0; l < k; ++l)
    rho_unit += alg.unit_coords(l) * triple.rho_images[l];
  report.residuals.emplace_back(
      "rho_unitality",
      op_norm(Matrix(rho_unit - Matrix::Identity(r, r))));

  const Matrix span = [&] {
    Matrix s(r, k * n);
    for (Index j = 0; j < k; ++j)
      s.middleCols(j * n, n) = triple.rho_images[j] * triple.V;
    return s;
  }();
  report.spanning_rank = psd_rank(Matrix(span * span.adjoint()), tol);
  report.minimal = report.spanning_rank == r;
  report.residuals.emplace_back(
      "minimality_rank_gap",
      static_cast<double>(r - report.spanning_rank));
  return report;
}

}  // namespace ucpm
