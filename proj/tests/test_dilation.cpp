#include "test_helpers.hpp"

using namespace ucpm;
using namespace ucpm::testing;

namespace {

const Tolerance kTol;

CpMap identity_map(const AlgebraPtr& alg) {
  return map_on_full(alg, alg->ambient_dim,
                     [](const Matrix& b) { return b; });
}

CpMap transpose_map(const AlgebraPtr& alg) {
  return map_on_full(alg, alg->ambient_dim,
                     [](const Matrix& b) { return b.transpose().eval(); });
}

CpMap depolarizing_map(const AlgebraPtr& alg) {
  const Index d = alg->ambient_dim;
  return map_on_full(alg, d, [d](const Matrix& b) {
    return Matrix((b.trace() / static_cast<double>(d)) *
                  Matrix::Identity(d, d));
  });
}

CpMap trace_state(const AlgebraPtr& alg) {
  const Index d = alg->ambient_dim;
  return map_on_full(alg, 1, [d](const Matrix& b) {
    Matrix value(1, 1);
    value(0, 0) = b.trace() / static_cast<double>(d);
    return value;
  });
}

// Random CP map from an explicit Kraus family, normalized to unital.
CpMap random_kraus_ucp(const AlgebraPtr& alg, Index n, Index kraus_rank,
                       Rng& rng) {
  const Index d = alg->ambient_dim;
  std::vector<Matrix> kraus;
  Matrix total = Matrix::Zero(n, n);
  for (Index m = 0; m < kraus_rank; ++m) {
    kraus.push_back(random_gaussian(n, d, rng));
    total += kraus.back() * kraus.back().adjoint();
  }
  // W^{-1/2} K_m makes the family unital.
  Eigen::SelfAdjointEigenSolver<Matrix> es(total);
  const Matrix correction =
      es.eigenvectors() *
      es.eigenvalues().cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
      es.eigenvectors().adjoint();
  for (Matrix& k : kraus) k = correction * k;
  return map_on_full(alg, n, [&](const Matrix& b) {
    Matrix image = Matrix::Zero(n, n);
    for (const Matrix& k : kraus) image += k * b * k.adjoint();
    return image;
  });
}

}  // namespace

TEST_CASE("cp_gram ranks of the reference maps") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  SUBCASE("identity map: 8x8 PSD of rank 2") {
    const Matrix gram = cp_gram(identity_map(m2), kTol);
    CHECK(gram.rows() == 8);
    CHECK(psd_rank(gram, kTol) == 2);
  }
  SUBCASE("tracial state: 4x4 Hilbert-Schmidt Gram of rank 4") {
    const Matrix gram = cp_gram(trace_state(m2), kTol);
    CHECK(gram.rows() == 4);
    CHECK(psd_rank(gram, kTol) == 4);
  }
  SUBCASE("transpose map has a negative Gram direction") {
    const Matrix gram = cp_gram(transpose_map(m2), kTol);
    const HermEig eig = herm_eig(gram, kTol);
    CHECK(eig.eigenvalues(eig.eigenvalues.size() - 1) < -kTol.atol);
  }
}

TEST_CASE("is_completely_positive verdicts") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  CHECK(is_completely_positive(identity_map(m2), kTol));
  CHECK(is_completely_positive(depolarizing_map(m2), kTol));
  CHECK_FALSE(is_completely_positive(transpose_map(m2), kTol));
}

TEST_CASE("choi matrices of the reference maps") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  SUBCASE("identity: rank-1 projection onto the entangled vector, scaled") {
    const Matrix choi = choi_matrix(identity_map(m2), kTol);
    CHECK(psd_rank(choi, kTol) == 1);
    Vector entangled = Vector::Zero(4);
    entangled(0) = 1.0;
    entangled(3) = 1.0;
    const Matrix expected = entangled * entangled.adjoint();
    CHECK(op_norm(Matrix(choi - expected)) <= kTol.atol);
  }
  SUBCASE("depolarizing: half the identity") {
    const Matrix choi = choi_matrix(depolarizing_map(m2), kTol);
    CHECK(op_norm(Matrix(choi - 0.5 * Matrix::Identity(4, 4))) <=
          kTol.atol);
    CHECK(psd_rank(choi, kTol) == 4);
  }
  SUBCASE("transpose: the swap operator with eigenvalue -1") {
    const Matrix choi = choi_matrix(transpose_map(m2), kTol);
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    CHECK(op_norm(Matrix(choi - swap)) <= kTol.atol);
    const HermEig eig = herm_eig(choi, kTol);
    CHECK(eig.eigenvalues(3) == doctest::Approx(-1.0));
  }
  SUBCASE("non-full algebras are rejected") {
    const AlgebraPtr scalars = close_star_algebra(2, {}, kTol);
    CpMap phi;
    phi.algebra = scalars;
    phi.out_dim = 1;
    phi.images = {Matrix::Identity(1, 1)};
    CHECK_THROWS_AS(choi_matrix(phi, kTol), Error);
  }
}

TEST_CASE("minimal dilation of the identity map is trivial") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  const StinespringTriple triple =
      minimal_stinespring(identity_map(m2), kTol);
  CHECK(triple.dil_dim == 2);
  CHECK(op_norm(Matrix(triple.V * triple.V.adjoint() -
                       Matrix::Identity(2, 2))) <= 10.0 * kTol.atol);
  CHECK(verify_dilation(triple, kTol).passes(kTol));
}

TEST_CASE("minimal dilation of the depolarizing map has r = 8") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  const StinespringTriple triple =
      minimal_stinespring(depolarizing_map(m2), kTol);
  CHECK(triple.dil_dim == 8);
  CHECK(verify_dilation(triple, kTol).passes(kTol));
}

TEST_CASE("minimal dilation of the tracial state has r = 4") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  const StinespringTriple triple =
      minimal_stinespring(trace_state(m2), kTol);
  CHECK(triple.dil_dim == 4);
  CHECK(verify_dilation(triple, kTol).passes(kTol));
}

TEST_CASE("minimal_stinespring rejects bad inputs") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  try {
    minimal_stinespring(transpose_map(m2), kTol);
    FAIL("expected NotCP");
  } catch (const Error& err) {
    CHECK(err.code() == errc::not_cp);
  }
  try {
    minimal_stinespring(identity_map(m2).scaled(0.5), kTol);
    FAIL("expected NotUnital");
  } catch (const Error& err) {
    CHECK(err.code() == errc::not_unital);
  }
}

TEST_CASE("sub-unital CP maps dilate when unitality is waived") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  Matrix k = Matrix::Zero(2, 2);
  k(0, 0) = 1.0;
  k(1, 1) = 1.0 / std::sqrt(2.0);
  const CpMap phi = map_on_full(
      m2, 2, [&](const Matrix& b) { return Matrix(k * b * k.adjoint()); });

  const StinespringTriple triple = minimal_stinespring(phi, kTol, false);
  Matrix unit_image = Matrix::Zero(2, 2);
  unit_image(0, 0) = 1.0;
  unit_image(1, 1) = 0.5;
  CHECK(op_norm(Matrix(triple.V.adjoint() * triple.V - unit_image)) <=
        10.0 * kTol.atol);
  // verify_dilation audits V^*V against phi(1), not against the identity.
  CHECK(verify_dilation(triple, kTol).passes(kTol));
}

TEST_CASE("verify_dilation flags deliberate corruption") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  const StinespringTriple clean = minimal_stinespring(trace_state(m2), kTol);

  SUBCASE("scaling V by 2 costs ||4 - 1|| = 3 in the isometry residual") {
    StinespringTriple bad = clean;
    bad.V *= 2.0;
    const DilationReport report = verify_dilation(bad, kTol);
    CHECK(report.residuals[0].first == "isometry");
    CHECK(report.residuals[0].second == doctest::Approx(3.0));
    CHECK_FALSE(report.passes(kTol));
  }
  SUBCASE("zeroing a rho image breaks reproduction") {
    StinespringTriple bad = clean;
    bad.rho_images[1].setZero();
    const DilationReport report = verify_dilation(bad, kTol);
    double reproduction = 0.0;
    for (const auto& [name, value] : report.residuals)
      if (name == "reproduction") reproduction = value;
    CHECK(reproduction >= op_norm(clean.source.images[1]) - 1e-12);
    CHECK_FALSE(report.passes(kTol));
  }
}

TEST_CASE("Gram rank equals d times the Choi rank on random CP maps") {
  Rng rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 2 + (trial % 2);
    const Index n = 2 + (trial % 2);
    const AlgebraPtr alg = full_matrix_algebra(d);
    std::uniform_int_distribution<Index> pick_rank(1, d * n);
    const Index kraus_rank = pick_rank(rng);
    const CpMap phi = random_kraus_ucp(alg, n, kraus_rank, rng);
    REQUIRE(is_completely_positive(phi, kTol));

    const StinespringTriple triple = minimal_stinespring(phi, kTol);
    const Index choi_rank = psd_rank(choi_matrix(phi, kTol), kTol);
    CHECK(triple.dil_dim == d * choi_rank);

    const DilationReport report = verify_dilation(triple, kTol);
    CHECK(report.passes(kTol));
    CHECK(op_norm(Matrix(triple.V.adjoint() * triple.V -
                         Matrix::Identity(n, n))) <= 10.0 * kTol.atol);
  }
}

TEST_CASE("minimality: products do not extend the spanning set") {
  Rng rng(202);
  const AlgebraPtr alg = full_matrix_algebra(2);
  const CpMap phi = random_kraus_ucp(alg, 2, 3, rng);
  const StinespringTriple triple = minimal_stinespring(phi, kTol);
  const Index k = alg->dim();
  const Index n = phi.out_dim;
  const Index r = triple.dil_dim;

  Matrix extended(r, k * n + k * k * n);
  for (Index j = 0; j < k; ++j)
    extended.middleCols(j * n, n) = triple.rho_images[j] * triple.V;
  Index col = k * n;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      extended.middleCols(col, n) =
          triple.rho_images[i] * triple.rho_images[j] * triple.V;
      col += n;
    }
  CHECK(psd_rank(Matrix(extended * extended.adjoint()), kTol) == r);
}

TEST_CASE("from_parts reconstructs the coordinate machinery") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  const StinespringTriple built = minimal_stinespring(trace_state(m2), kTol);
  const StinespringTriple rebuilt = StinespringTriple::from_parts(
      built.source, built.V, built.rho_images, kTol);
  CHECK(rebuilt.dil_dim == built.dil_dim);
  CHECK(rebuilt.minimal);
  CHECK(op_norm(Matrix(rebuilt.range_proj -
                       Matrix::Identity(built.dil_dim, built.dil_dim))) <=
        10.0 * kTol.atol);
  // The coordinate factor is the spanning matrix for both constructions.
  CHECK(op_norm(Matrix(rebuilt.coord_factor - built.coord_factor)) <=
        100.0 * kTol.atol);
}

TEST_CASE("cp maps validate *-preservation") {
  const AlgebraPtr m2 = full_matrix_algebra(2);
  CpMap broken = identity_map(m2);
  broken.images[1] = mat2(0, 0, 0, 0);
  broken.images[1](0, 1) = Complex(0.0, 1.0);
  CHECK_THROWS_AS(broken.validate_structure(kTol), Error);
}
