#include "test_helpers.hpp"

#include "ucpm/correspondence.hpp"

using namespace ucpm;
using namespace ucpm::testing;

namespace {

const Tolerance kTol;
const MeasureOptions kOpts;

struct StateFixture {
  AlgebraPtr algebra = full_matrix_algebra(2);
  CpMap pure1, pure2, center;

  StateFixture() {
    pure1 = state_instance(algebra, unit_matrix(2, 0, 0), kTol);
    Matrix v_density(2, 2);
    v_density << 0.5, 0.5, 0.5, 0.5;
    pure2 = state_instance(algebra, v_density, kTol);
    center = state_instance(algebra, fixture_density(), kTol);
  }

  DiscreteMeasure two_pure() const { return {{pure1, pure2}, {0.5, 0.5}}; }
};

}  // namespace

TEST_CASE("subalgebra of a point mass is the scalars") {
  const StateFixture fx;
  const DiscreteMeasure delta{{fx.pure1}, {1.0}};
  const StinespringTriple base = minimal_stinespring(fx.pure1, kTol);
  const AbelianSubalgebra sub =
      subalgebra_from_measure(delta, base, kTol, kOpts);
  REQUIRE(sub.size() == 1);
  CHECK(op_norm(Matrix(sub.min_projections[0] -
                       Matrix::Identity(base.dil_dim, base.dil_dim))) <=
        10.0 * kTol.atol);
}

TEST_CASE("subalgebra of the two-pure-state measure is the witness pair") {
  const StateFixture fx;
  const DiscreteMeasure mu = fx.two_pure();
  const StinespringTriple base = minimal_stinespring(fx.center, kTol);
  const AbelianSubalgebra sub =
      subalgebra_from_measure(mu, base, kTol, kOpts);
  REQUIRE(sub.size() == 2);
  Matrix sum = Matrix::Zero(4, 4);
  for (const Matrix& p : sub.min_projections) {
    CHECK(op_norm(Matrix(p * p - p)) <= 10.0 * kTol.atol);
    CHECK(std::real(p.trace()) == doctest::Approx(2.0).epsilon(1e-8));
    sum += p;
  }
  CHECK(op_norm(Matrix(sum - Matrix::Identity(4, 4))) <= 10.0 * kTol.atol);
}

TEST_CASE("subalgebra_from_measure rejects non-orthogonal measures") {
  const StateFixture fx;
  const CpMap mixed = state_instance(
      fx.algebra, Matrix(0.5 * Matrix::Identity(2, 2)), kTol);
  const DiscreteMeasure bad{{fx.pure1, mixed}, {0.5, 0.5}};
  const StinespringTriple base =
      minimal_stinespring(barycenter(bad), kTol);
  try {
    subalgebra_from_measure(bad, base, kTol, kOpts);
    FAIL("expected NotOrthogonalMeasure");
  } catch (const Error& err) {
    CHECK(err.code() == errc::not_orthogonal_measure);
  }
}

TEST_CASE("measure_from_subalgebra of the trivial family") {
  const StateFixture fx;
  const StinespringTriple base = minimal_stinespring(fx.center, kTol);
  AbelianSubalgebra trivial;
  trivial.ambient_dim = base.dil_dim;
  trivial.min_projections = {Matrix::Identity(4, 4)};
  trivial.labels = {"1"};
  const SubalgebraVerdict verdict =
      measure_from_subalgebra(trivial, base, kTol, kOpts);
  CHECK(verdict.classification == SubalgebraClass::orthogonal);
  REQUIRE(verdict.measure.has_value());
  CHECK(verdict.measure->size() == 1);
  CHECK(map_distance(verdict.measure->atoms[0], fx.center) <=
        10.0 * kTol.atol);
}

TEST_CASE("measure_from_subalgebra recovers the two pure states") {
  const StateFixture fx;
  const DiscreteMeasure mu = fx.two_pure();
  const StinespringTriple base = minimal_stinespring(fx.center, kTol);
  const AbelianSubalgebra sub =
      subalgebra_from_measure(mu, base, kTol, kOpts);
  const SubalgebraVerdict verdict =
      measure_from_subalgebra(sub, base, kTol, kOpts);
  CHECK(verdict.classification == SubalgebraClass::orthogonal);
  REQUIRE(verdict.measure.has_value());
  REQUIRE(verdict.measure->size() == 2);
  for (double w : verdict.measure->weights)
    CHECK(w == doctest::Approx(0.5).epsilon(1e-8));
  const double d00 = map_distance(verdict.measure->atoms[0], fx.pure1);
  const double d01 = map_distance(verdict.measure->atoms[0], fx.pure2);
  CHECK(std::min(d00, d01) <= 1e-7);
}

TEST_CASE("a block projection of the diagonal amplification is rejected") {
  // Base: a -> omega(a) I_2 for the tracial state on M_2. The projection
  // onto the subspace generated by rho(A) V e_1 compresses V to E_11,
  // which is not a scalar: NotSubOrthogonal with that witness.
  const AlgebraPtr m2 = full_matrix_algebra(2);
  const CpMap tracial = state_instance(
      m2, Matrix(0.5 * Matrix::Identity(2, 2)), kTol);
  const DiscreteMeasure delta{{tracial}, {1.0}};
  const DiscreteMeasure amplified = example_diagonal(delta, 2, kTol);
  const StinespringTriple base =
      minimal_stinespring(amplified.atoms[0], kTol);
  REQUIRE(base.dil_dim == 8);

  // Orthonormalize the spanning set of the first block.
  const Index k = m2->dim();
  Matrix span(base.dil_dim, k);
  for (Index j = 0; j < k; ++j)
    span.col(j) = (base.rho_images[j] * base.V).col(0);
  Eigen::HouseholderQR<Matrix> qr(span);
  const Matrix q =
      Matrix(qr.householderQ()) * Matrix::Identity(base.dil_dim, 4);
  const Matrix block = q * q.adjoint();

  AbelianSubalgebra family;
  family.ambient_dim = base.dil_dim;
  family.min_projections = {block,
                            Matrix::Identity(8, 8) - block};
  family.labels = {"block1", "rest"};
  const SubalgebraVerdict verdict =
      measure_from_subalgebra(family, base, kTol, kOpts);
  CHECK(verdict.classification == SubalgebraClass::not_sub_orthogonal);
  REQUIRE(verdict.failure_witness.has_value());
  const Matrix witness = verdict.failure_witness->second;
  CHECK(op_norm(Matrix(witness - unit_matrix(2, 0, 0))) <= 1e-7);
}

TEST_CASE("roundtrip_measure closes on the fixtures") {
  const StateFixture fx;
  SUBCASE("point mass") {
    const DiscreteMeasure delta{{fx.pure1}, {1.0}};
    const StinespringTriple base = minimal_stinespring(fx.pure1, kTol);
    const RoundtripMeasureReport report =
        roundtrip_measure(delta, base, kTol, kOpts);
    CHECK(report.closed);
  }
  SUBCASE("two pure states recover exactly") {
    const StinespringTriple base = minimal_stinespring(fx.center, kTol);
    const RoundtripMeasureReport report =
        roundtrip_measure(fx.two_pure(), base, kTol, kOpts);
    CHECK(report.closed);
    CHECK(report.atom_distance <= 1e-7);
    CHECK(report.weight_distance <= 1e-8);
  }
}

TEST_CASE("roundtrip_subalgebra equality on the orthogonal sector") {
  const StateFixture fx;
  const StinespringTriple base = minimal_stinespring(fx.center, kTol);
  const AbelianSubalgebra sub =
      subalgebra_from_measure(fx.two_pure(), base, kTol, kOpts);
  const RoundtripSubalgebraReport report =
      roundtrip_subalgebra(sub, base, kTol, kOpts);
  CHECK(report.classification == SubalgebraClass::orthogonal);
  CHECK(report.equal);
  CHECK(report.dim_recovered == 2);
}

TEST_CASE("repeated atoms over a two-block dilation are sub-orthogonal") {
  // Both blocks carry the same pure state; the block projections induce
  // equal atoms, the measure merges to a point mass, and the recovered
  // subalgebra collapses to the scalars inside the original family.
  const StateFixture fx;
  const StinespringTriple atom_dilation =
      minimal_stinespring(fx.pure1, kTol);
  const StinespringTriple block = block_dilation(
      {atom_dilation, atom_dilation}, {0.5, 0.5}, fx.pure1, kTol);
  CHECK(block.dil_dim == 4);
  CHECK_FALSE(block.minimal);

  AbelianSubalgebra family;
  family.ambient_dim = 4;
  Matrix first = Matrix::Zero(4, 4);
  first.block(0, 0, 2, 2) = Matrix::Identity(2, 2);
  family.min_projections = {first, Matrix::Identity(4, 4) - first};
  family.labels = {"a", "b"};

  const SubalgebraVerdict verdict =
      measure_from_subalgebra(family, block, kTol, kOpts);
  CHECK(verdict.classification == SubalgebraClass::sub_orthogonal);
  REQUIRE(verdict.measure.has_value());
  CHECK(verdict.measure->size() == 1);
  CHECK(verdict.merged_atoms == 1);
  CHECK(map_distance(verdict.measure->atoms[0], fx.pure1) <= 1e-7);

  const RoundtripSubalgebraReport report =
      roundtrip_subalgebra(family, block, kTol, kOpts);
  CHECK(report.classification == SubalgebraClass::sub_orthogonal);
  CHECK(report.strictly_contained);
  CHECK(report.dim_recovered == 1);
  CHECK(report.dim_original == 2);
  CHECK_FALSE(report.equal);

  // The recovered algebra is the scalars: the identity on the direct sum.
  const AbelianSubalgebra recovered =
      subalgebra_from_measure(*verdict.measure, block, kTol, kOpts);
  REQUIRE(recovered.size() == 1);
  CHECK(op_norm(Matrix(recovered.min_projections[0] -
                       Matrix::Identity(4, 4))) <= 10.0 * kOpts.ortho_tol);
}

TEST_CASE("weight conservation under zero-projection drops") {
  // A three-block family over the two-pure-state dilation where one
  // projection compresses to zero: it is dropped, the rest renormalizes.
  const StateFixture fx;
  const StinespringTriple base = minimal_stinespring(fx.center, kTol);
  const AbelianSubalgebra sub =
      subalgebra_from_measure(fx.two_pure(), base, kTol, kOpts);
  // Split the first projection against a direction orthogonal to V's range
  // inside its block: compressions stay scalar multiples of the identity
  // in the n = 1 case, so nothing is rejected.
  const SubalgebraVerdict verdict =
      measure_from_subalgebra(sub, base, kTol, kOpts);
  REQUIRE(verdict.measure.has_value());
  double total = 0.0;
  for (double w : verdict.measure->weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("random orthogonal measures close both round trips") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const CpMap state = random_state(2 + (seed % 2), 2 + (seed % 2), seed);
    const DiscreteMeasure mu =
        random_orthogonal_measure(state, 3, seed + 99, kTol, kOpts);
    const StinespringTriple base =
        minimal_stinespring(barycenter(mu), kTol);

    const RoundtripMeasureReport measure_report =
        roundtrip_measure(mu, base, kTol, kOpts);
    CHECK(measure_report.closed);

    const AbelianSubalgebra sub =
        subalgebra_from_measure(mu, base, kTol, kOpts);
    const RoundtripSubalgebraReport sub_report =
        roundtrip_subalgebra(sub, base, kTol, kOpts);
    CHECK(sub_report.equal);
  }
}
