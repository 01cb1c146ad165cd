#include "test_helpers.hpp"

using namespace ucpm;
using namespace ucpm::testing;

namespace {
const Tolerance kTol;
}

TEST_CASE("herm_eig on the identity") {
  const HermEig eig = herm_eig(Matrix::Identity(2, 2), kTol);
  CHECK(eig.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(op_norm(Matrix(eig.eigenvectors.adjoint() * eig.eigenvectors -
                       Matrix::Identity(2, 2))) <= kTol.atol);
}

TEST_CASE("herm_eig on diag(3,1) sorts descending") {
  const HermEig eig = herm_eig(mat2(3, 0, 0, 1), kTol);
  CHECK(eig.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
  // Eigenvectors are permuted identity columns (up to phase).
  CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("herm_eig matches the hand-solved 2x2 characteristic polynomial") {
  // trace 1, det 1/8: eigenvalues (1 +- sqrt(1/2)) / 2.
  const Matrix m = fixture_density();
  const HermEig eig = herm_eig(m, kTol);
  const double root = std::sqrt(0.5);
  CHECK(eig.eigenvalues(0) == doctest::Approx((1 + root) / 2).epsilon(1e-12));
  CHECK(eig.eigenvalues(1) == doctest::Approx((1 - root) / 2).epsilon(1e-12));
  CHECK(eig.eigenvalues(0) == doctest::Approx(0.8535533905932737));
  CHECK(eig.eigenvalues(1) == doctest::Approx(0.14644660940672624));
}

TEST_CASE("herm_eig rejects non-hermitian input") {
  CHECK_THROWS_AS(herm_eig(mat2(0, 1, 0, 0), kTol), Error);
  try {
    herm_eig(mat2(0, 1, 0, 0), kTol);
  } catch (const Error& err) {
    CHECK(err.code() == errc::not_hermitian);
  }
}

TEST_CASE("psd_cone_order trivial comparisons") {
  const Matrix zero = Matrix::Zero(2, 2);
  const Matrix eye = Matrix::Identity(2, 2);
  CHECK(psd_cone_order(zero, eye, kTol));
  CHECK(psd_cone_order(eye, eye, kTol));  // equality boundary
  CHECK_FALSE(psd_cone_order(mat2(2, 0, 0, 0), eye, kTol));
}

TEST_CASE("psd_cone_order rejects shape mismatch") {
  CHECK_THROWS_AS(
      psd_cone_order(Matrix::Identity(2, 2), Matrix::Identity(3, 3), kTol),
      Error);
}

TEST_CASE("null_space basic cases") {
  CHECK(null_space(Matrix::Zero(2, 2), kTol).cols() == 2);
  CHECK(null_space(Matrix::Identity(2, 2), kTol).cols() == 0);

  const Matrix kernel = null_space(mat2(1, 1, 1, 1), kTol);
  REQUIRE(kernel.cols() == 1);
  Vector expected(2);
  expected << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(expected.dot(kernel.col(0))) - 1.0) <= 1e-12);
}

TEST_CASE("null_space columns annihilate the matrix") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Index dim = 3 + static_cast<Index>(trial % 4);
    const Index rank = 1 + static_cast<Index>(trial % dim);
    const Matrix a = random_gaussian(dim, rank, rng);
    const Matrix b = random_gaussian(rank, dim, rng);
    const Matrix m = a * b;  // rank deficient by construction
    const Matrix kernel = null_space(m, kTol);
    CHECK(kernel.cols() == dim - rank);
    if (kernel.cols() == 0) continue;
    CHECK(op_norm(Matrix(m * kernel)) <=
          kTol.atol * (1.0 + op_norm(m)));
    CHECK(op_norm(Matrix(kernel.adjoint() * kernel -
                         Matrix::Identity(kernel.cols(), kernel.cols()))) <=
          kTol.atol);
    // Orthogonality against the row space on random probes.
    const Matrix x = random_gaussian(dim, 1, rng);
    const Vector probe = m.adjoint() * x;
    for (Index c = 0; c < kernel.cols(); ++c)
      CHECK(std::abs(kernel.col(c).dot(probe)) <=
            kTol.atol * op_norm(m) * x.norm());
  }
}

TEST_CASE("spectral_projections clusters and resolves the identity") {
  SUBCASE("identity gives a single cluster") {
    const auto clusters = spectral_projections(Matrix::Identity(3, 3), kTol);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].eigenvalue == doctest::Approx(1.0));
    CHECK(op_norm(Matrix(clusters[0].projection -
                         Matrix::Identity(3, 3))) <= kTol.atol);
  }
  SUBCASE("diag(1,1,2) splits into two clusters") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    m(2, 2) = 2.0;
    const auto clusters = spectral_projections(m, kTol);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].eigenvalue == doctest::Approx(2.0));
    CHECK(clusters[1].eigenvalue == doctest::Approx(1.0));
    CHECK(std::real(clusters[0].projection(2, 2)) == doctest::Approx(1.0));
  }
  SUBCASE("gaps below tolerance merge") {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 1) = 1e-12;
    const auto clusters = spectral_projections(m, kTol);
    CHECK(clusters.size() == 1);
  }
}

TEST_CASE("spectral_projections properties on random hermitian input") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const Index dim = 2 + static_cast<Index>(trial % 7);
    const Matrix m = random_hermitian(dim, rng);
    const auto clusters = spectral_projections(m, kTol);
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      const Matrix& p = clusters[i].projection;
      CHECK(op_norm(Matrix(p * p - p)) <= kTol.atol);
      sum += p;
      for (std::size_t j = 0; j < i; ++j)
        CHECK(op_norm(Matrix(clusters[j].projection * p)) <= kTol.atol);
    }
    CHECK(op_norm(Matrix(sum - Matrix::Identity(dim, dim))) <= kTol.atol);
  }
}

TEST_CASE("herm_eig reconstruction on random hermitian input") {
  Rng rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const Index dim = 2 + static_cast<Index>(trial % 11);
    const Matrix m = random_hermitian(dim, rng);
    const HermEig eig = herm_eig(m, kTol);
    const Matrix recon = eig.eigenvectors *
                         eig.eigenvalues.cast<Complex>().asDiagonal() *
                         eig.eigenvectors.adjoint();
    CHECK(op_norm(Matrix(recon - m)) <= 100.0 * kTol.atol);
    CHECK(op_norm(Matrix(eig.eigenvectors.adjoint() * eig.eigenvectors -
                         Matrix::Identity(dim, dim))) <= 100.0 * kTol.atol);
  }
}

TEST_CASE("kron against a hand computation") {
  const Matrix a = mat2(1, 2, 3, 4);
  const Matrix b = mat2(0, 1, 1, 0);
  const Matrix k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(std::real(k(0, 1)) == doctest::Approx(1.0));
  CHECK(std::real(k(0, 3)) == doctest::Approx(2.0));
  CHECK(std::real(k(3, 2)) == doctest::Approx(4.0));
}

TEST_CASE("tolerances must be positive") {
  Tolerance bad;
  bad.atol = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
