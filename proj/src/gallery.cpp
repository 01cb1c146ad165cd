#include "ucpm/gallery.hpp"

#include <cmath>
#include <limits>

#include "ucpm/correspondence.hpp"

namespace ucpm {

CpMap state_instance(const AlgebraPtr& algebra, const Matrix& density,
                     const Tolerance& tol) {
  tol.validate();
  require(algebra != nullptr, errc::bad_parameters, "missing algebra");
  const Index d = algebra->ambient_dim;
  require(density.rows() == d && density.cols() == d, errc::shape_mismatch,
          "density shape");
  const double unital = std::abs(std::real(density.trace()) - 1.0) +
                        std::abs(std::imag(density.trace()));
  require(unital <= tol.atol, errc::not_state,
          "functional value at the identity is " +
              std::to_string(std::real(density.trace())));
  const HermEig eig = herm_eig(density, tol);  // NotHermitian for bad data
  require(eig.eigenvalues(d - 1) >= -tol.atol, errc::not_state,
          "density has eigenvalue " +
              std::to_string(eig.eigenvalues(d - 1)));

  CpMap out;
  out.algebra = algebra;
  out.out_dim = 1;
  out.images.reserve(algebra->dim());
  for (const Matrix& b : algebra->basis) {
    Matrix value(1, 1);
    value(0, 0) = (density * b).trace();
    out.images.push_back(std::move(value));
  }
  return out;
}

AlgebraPtr matrix_amplification(const AlgebraPtr& algebra, Index n,
                                const Tolerance& tol) {
  require(algebra != nullptr, errc::bad_parameters, "missing algebra");
  require(n >= 1, errc::bad_parameters, "amplification order must be >= 1");
  const Index d = algebra->ambient_dim;
  std::vector<Matrix> generators;
  generators.reserve(n * n * algebra->dim());
  for (Index s = 0; s < n; ++s)
    for (Index t = 0; t < n; ++t) {
      Matrix unit = Matrix::Zero(n, n);
      unit(s, t) = 1.0;
      for (const Matrix& b : algebra->basis)
        generators.push_back(kron(unit, b));
    }
  return close_star_algebra(n * d, generators, tol);
}

namespace {

void check_state_measure(const DiscreteMeasure& mu, const Tolerance& tol) {
  mu.validate(tol);
  for (const CpMap& atom : mu.atoms)
    require(atom.out_dim == 1, errc::bad_parameters,
            "atoms must be states (out_dim 1)");
}

// omega applied to an arbitrary ambient matrix through basis coordinates.
Complex state_value(const CpMap& state, const Matrix& x,
                    const Tolerance& tol) {
  const MembershipResult mem = membership(state.algebra->basis, x, tol);
  require(mem.member, errc::shape_mismatch,
          "argument lies outside the state's algebra");
  Complex value = 0.0;
  for (Index l = 0; l < state.algebra->dim(); ++l)
    value += mem.coords(l) * state.images[l](0, 0);
  return value;
}

}  // namespace

DiscreteMeasure example_entrywise(const DiscreteMeasure& state_measure,
                                  Index n, const Tolerance& tol) {
  check_state_measure(state_measure, tol);
  const AlgebraPtr inner = state_measure.atoms.front().algebra;
  const AlgebraPtr ambient = matrix_amplification(inner, n, tol);
  const Index d = inner->ambient_dim;

  DiscreteMeasure out;
  out.weights = state_measure.weights;
  for (const CpMap& state : state_measure.atoms) {
    CpMap atom;
    atom.algebra = ambient;
    atom.out_dim = n;
    atom.images.reserve(ambient->dim());
    for (const Matrix& basis_elem : ambient->basis) {
      Matrix image(n, n);
      for (Index s = 0; s < n; ++s)
        for (Index t = 0; t < n; ++t)
          image(s, t) = state_value(
              state, basis_elem.block(s * d, t * d, d, d), tol);
      atom.images.push_back(std::move(image));
    }
    out.atoms.push_back(std::move(atom));
  }
  return out;
}

DiscreteMeasure example_diagonal(const DiscreteMeasure& state_measure,
                                 Index n, const Tolerance& tol) {
  check_state_measure(state_measure, tol);
  require(n >= 1, errc::bad_parameters, "amplification order must be >= 1");

  DiscreteMeasure out;
  out.weights = state_measure.weights;
  for (const CpMap& state : state_measure.atoms) {
    CpMap atom;
    atom.algebra = state.algebra;
    atom.out_dim = n;
    atom.images.reserve(state.images.size());
    for (const Matrix& value : state.images)
      atom.images.push_back(value(0, 0) *
                            Matrix::Identity(n, n));
    out.atoms.push_back(std::move(atom));
  }
  return out;
}

CpMap random_ucp(Index d, Index n, Index kraus_rank, std::uint64_t seed) {
  require(d >= 1 && n >= 1, errc::bad_parameters, "dimensions must be >= 1");
  require(kraus_rank >= 1 && kraus_rank <= d * n, errc::bad_parameters,
          "kraus_rank must lie in [1, d*n]");
  require(d * kraus_rank >= n, errc::bad_parameters,
          "no unital compression exists unless d * kraus_rank >= n");
  Rng rng(seed);
  const Matrix isometry = random_isometry(d * kraus_rank, n, rng);

  const AlgebraPtr algebra = full_matrix_algebra(d);
  CpMap out;
  out.algebra = algebra;
  out.out_dim = n;
  out.images.reserve(algebra->dim());
  const Matrix eye_rank =
      Matrix::Identity(kraus_rank, kraus_rank);
  for (const Matrix& b : algebra->basis)
    out.images.push_back(isometry.adjoint() * kron(b, eye_rank) * isometry);
  return out;
}

CpMap random_state(Index d, Index rank, std::uint64_t seed) {
  require(d >= 1 && rank >= 1 && rank <= d, errc::bad_parameters,
          "rank must lie in [1, d]");
  Rng rng(seed);
  const Matrix g = random_gaussian(d, rank, rng);
  Matrix density = g * g.adjoint();
  density /= density.trace();
  density = hermitized(density);
  return state_instance(full_matrix_algebra(d), density);
}

namespace {

// Merge the smallest spectral gaps until at most `target` clusters remain.
std::vector<Matrix> capped_spectral_blocks(const HermEig& eig, Index target) {
  const Index n = eig.eigenvalues.size();
  std::vector<std::pair<Index, Index>> ranges;  // [start, stop)
  for (Index i = 0; i < n; ++i) ranges.emplace_back(i, i + 1);
  while (static_cast<Index>(ranges.size()) > target) {
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c + 1 < ranges.size(); ++c) {
      const double gap = eig.eigenvalues(ranges[c].second - 1) -
                         eig.eigenvalues(ranges[c + 1].first);
      if (gap < best_gap) {
        best_gap = gap;
        best = c;
      }
    }
    ranges[best].second = ranges[best + 1].second;
    ranges.erase(ranges.begin() + best + 1);
  }
  std::vector<Matrix> blocks;
  for (const auto& [start, stop] : ranges) {
    const Matrix q = eig.eigenvectors.middleCols(start, stop - start);
    blocks.push_back(q * q.adjoint());
  }
  return blocks;
}

}  // namespace

DiscreteMeasure random_orthogonal_measure(const CpMap& phi, Index max_atoms,
                                          std::uint64_t seed,
                                          const Tolerance& tol,
                                          const MeasureOptions& opts) {
  require(max_atoms >= 1, errc::bad_parameters, "max_atoms must be >= 1");
  const StinespringTriple base = minimal_stinespring(phi, tol);
  const DiscreteMeasure point_mass{{phi}, {1.0}};

  const std::vector<Matrix> comm = commutant(base.rho_images, tol);
  if (comm.size() <= 1 || max_atoms == 1) return point_mass;

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index r = base.dil_dim;
  Matrix z = Matrix::Zero(r, r);
  for (const Matrix& c : comm) {
    z += gauss(rng) * (c + c.adjoint());
    z += gauss(rng) * (Complex(0.0, 1.0) * (c - c.adjoint()));
  }
  z = hermitized(z);
  const HermEig eig = herm_eig(z, tol);

  // Coarsen on NotSubOrthogonal until only the trivial family remains.
  for (Index target = max_atoms; target >= 2; --target) {
    const std::vector<Matrix> blocks = capped_spectral_blocks(eig, target);
    AbelianSubalgebra family;
    family.ambient_dim = r;
    family.min_projections = blocks;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      family.labels.push_back("z" + std::to_string(i));
    try {
      const SubalgebraVerdict verdict =
          measure_from_subalgebra(family, base, tol, opts);
      if (verdict.measure.has_value()) return *verdict.measure;
    } catch (const Error& err) {
      if (err.code() != errc::not_in_commutant) throw;
      // A clustered projection fell outside the commutant: the split mixed
      // eigenvalue clusters of z that the commutant cannot separate.
    }
  }
  return point_mass;
}

}  // namespace ucpm
