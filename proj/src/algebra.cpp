#include "ucpm/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace ucpm {

Complex trace_dot(const Matrix& x, const Matrix& y) {
  require(x.rows() == y.rows() && x.cols() == y.cols(), errc::shape_mismatch,
          "trace_dot shapes");
  return (y.adjoint() * x).trace() / static_cast<double>(x.rows());
}

Matrix StarAlgebra::reconstruct(const Vector& coords) const {
  require(coords.size() == dim(), errc::shape_mismatch,
          "coordinate vector length");
  Matrix out = Matrix::Zero(ambient_dim, ambient_dim);
  for (Index l = 0; l < dim(); ++l) out += coords(l) * basis[l];
  return out;
}

namespace {

// Modified Gram-Schmidt append under the normalized trace inner product.
// Returns true when v contributed a new direction.
bool mgs_append(std::vector<Matrix>& basis, Matrix v, double drop_tol) {
  const double input_norm = std::sqrt(std::real(trace_dot(v, v)));
  for (int pass = 0; pass < 2; ++pass)
    for (const Matrix& b : basis) v -= trace_dot(v, b) * b;
  const double norm = std::sqrt(std::max(0.0, std::real(trace_dot(v, v))));
  if (norm <= drop_tol * (1.0 + input_norm)) return false;
  basis.push_back(v / norm);
  return true;
}

void fill_structure_tables(StarAlgebra& alg, const Tolerance& tol) {
  const Index k = alg.dim();
  const Index d = alg.ambient_dim;

  alg.unit_coords = Vector(k);
  const Matrix identity = Matrix::Identity(d, d);
  for (Index l = 0; l < k; ++l)
    alg.unit_coords(l) = trace_dot(identity, alg.basis[l]);
  const double unit_residual =
      op_norm(Matrix(identity - alg.reconstruct(alg.unit_coords)));
  require(unit_residual <= tol.atol, errc::structure_residual,
          "identity not reproduced from unit coordinates, residual " +
              std::to_string(unit_residual));

  alg.adj_table = Matrix(k, k);
  for (Index i = 0; i < k; ++i) {
    const Matrix adj = alg.basis[i].adjoint();
    for (Index l = 0; l < k; ++l)
      alg.adj_table(i, l) = trace_dot(adj, alg.basis[l]);
    const double res = op_norm(
        Matrix(adj - alg.reconstruct(alg.adj_table.row(i).transpose())));
    require(res <= tol.atol, errc::structure_residual,
            "adjoint expansion residual " + std::to_string(res));
  }

  alg.left_mult.assign(k, Matrix::Zero(k, k));
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      const Matrix prod = alg.basis[i] * alg.basis[j];
      Vector coords(k);
      for (Index l = 0; l < k; ++l)
        coords(l) = trace_dot(prod, alg.basis[l]);
      alg.left_mult[i].col(j) = coords;
      const double res = op_norm(Matrix(prod - alg.reconstruct(coords)));
      require(res <= tol.atol, errc::structure_residual,
              "product expansion residual " + std::to_string(res));
    }
  }

  alg.star_left.assign(k, Matrix::Zero(k, k));
  for (Index i = 0; i < k; ++i)
    for (Index p = 0; p < k; ++p)
      alg.star_left[i] += alg.adj_table(i, p) * alg.left_mult[p];
}

}  // namespace

AlgebraPtr close_star_algebra(Index ambient_dim,
                              const std::vector<Matrix>& generators,
                              const Tolerance& tol) {
  tol.validate();
  require(ambient_dim > 0, errc::bad_parameters, "ambient_dim must be >= 1");
  for (const Matrix& g : generators) {
    require(g.rows() == ambient_dim && g.cols() == ambient_dim,
            errc::shape_mismatch, "generator shape");
    check_finite(g, "generator");
  }

  std::vector<Matrix> basis;
  mgs_append(basis, Matrix::Identity(ambient_dim, ambient_dim), tol.atol);
  for (const Matrix& g : generators) {
    mgs_append(basis, g, tol.atol);
    mgs_append(basis, g.adjoint(), tol.atol);
  }

  const Index ceiling = ambient_dim * ambient_dim;
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t current = basis.size();
    for (std::size_t i = 0; i < current; ++i)
      for (std::size_t j = 0; j < current; ++j)
        if (mgs_append(basis, basis[i] * basis[j], tol.atol)) grew = true;
    require(static_cast<Index>(basis.size()) <= ceiling,
            errc::dimension_overflow,
            "closure exceeded ambient dimension bound");
  }

  auto alg = std::make_shared<StarAlgebra>();
  alg->ambient_dim = ambient_dim;
  alg->basis = std::move(basis);
  fill_structure_tables(*alg, tol);
  return alg;
}

AlgebraPtr algebra_from_basis(Index ambient_dim, std::vector<Matrix> basis,
                              const Tolerance& tol) {
  tol.validate();
  require(!basis.empty(), errc::bad_parameters, "empty basis");
  for (const Matrix& b : basis) {
    require(b.rows() == ambient_dim && b.cols() == ambient_dim,
            errc::shape_mismatch, "basis element shape");
    check_finite(b, "basis element");
  }
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const Complex dot = trace_dot(basis[i], basis[j]);
      const double target = i == j ? 1.0 : 0.0;
      require(std::abs(dot - target) <= tol.atol, errc::structure_residual,
              "basis is not orthonormal at pair (" + std::to_string(i) +
                  "," + std::to_string(j) + ")");
    }
  auto alg = std::make_shared<StarAlgebra>();
  alg->ambient_dim = ambient_dim;
  alg->basis = std::move(basis);
  fill_structure_tables(*alg, tol);  // rejects non-closed lists
  return alg;
}

AlgebraPtr full_matrix_algebra(Index d) {
  require(d > 0, errc::bad_parameters, "dimension must be >= 1");
  // Interned: maps on M_d built in separate calls stay composable, since
  // composability is decided by algebra identity.
  static std::mutex cache_mutex;
  static std::map<Index, AlgebraPtr> cache;
  {
    const std::lock_guard<std::mutex> lock(cache_mutex);
    const auto it = cache.find(d);
    if (it != cache.end()) return it->second;
  }
  auto alg = std::make_shared<StarAlgebra>();
  alg->ambient_dim = d;
  const double s = std::sqrt(static_cast<double>(d));
  const Index k = d * d;
  alg->basis.reserve(k);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = s;
      alg->basis.push_back(std::move(e));
    }
  // (s E_ij)(s E_pq) = s delta_jp (s E_iq); (s E_ij)^* = s E_ji.
  auto idx = [d](Index i, Index j) { return i * d + j; };
  alg->left_mult.assign(k, Matrix::Zero(k, k));
  alg->adj_table = Matrix::Zero(k, k);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      alg->adj_table(idx(i, j), idx(j, i)) = 1.0;
      for (Index q = 0; q < d; ++q)
        alg->left_mult[idx(i, j)](idx(i, q), idx(j, q)) = s;
    }
  alg->unit_coords = Vector::Zero(k);
  for (Index i = 0; i < d; ++i) alg->unit_coords(idx(i, i)) = 1.0 / s;
  alg->star_left.assign(k, Matrix::Zero(k, k));
  for (Index i = 0; i < k; ++i)
    for (Index p = 0; p < k; ++p)
      if (alg->adj_table(i, p) != 0.0)
        alg->star_left[i] += alg->adj_table(i, p) * alg->left_mult[p];
  {
    const std::lock_guard<std::mutex> lock(cache_mutex);
    const auto [it, inserted] = cache.emplace(d, std::move(alg));
    return it->second;
  }
}

std::vector<Matrix> commutant(const std::vector<Matrix>& operators,
                              const Tolerance& tol) {
  tol.validate();
  require(!operators.empty(), errc::bad_parameters,
          "commutant of an empty family is ambient-sized; pass the identity");
  const Index r = operators.front().rows();
  for (const Matrix& s : operators)
    require(s.rows() == r && s.cols() == r, errc::shape_mismatch,
            "commutant operators must share a square shape");

  const Matrix eye = Matrix::Identity(r, r);
  // Intersect kernels of T -> S T - T S one operator at a time; the running
  // basis N shrinks fast, so only the first solve sees the full r^2 space.
  Matrix n_basis = Matrix::Identity(r * r, r * r);
  for (const Matrix& s : operators) {
    if (n_basis.cols() == 0) break;
    const Matrix commutation =
        kron(eye, s) - kron(s.transpose().eval(), eye);
    const Matrix reduced = commutation * n_basis;
    const Matrix kernel = null_space(reduced, tol);
    n_basis = n_basis * kernel;
  }

  std::vector<Matrix> out;
  out.reserve(n_basis.cols());
  const double scale = std::sqrt(static_cast<double>(r));
  for (Index c = 0; c < n_basis.cols(); ++c)
    out.push_back(scale * unvec(n_basis.col(c), r, r));
  return out;
}

namespace {

// Split an orthonormal block basis q by the spectrum of the compression
// q^* s q; returns the refined orthonormal bases.
std::vector<Matrix> split_block(const Matrix& q, const Matrix& s,
                                const Tolerance& tol) {
  Matrix compressed = q.adjoint() * s * q;
  compressed = hermitized(compressed);
  const HermEig eig = herm_eig(compressed, tol);
  const Index m = compressed.rows();
  const double scale =
      m > 0 ? eig.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double gap = std::max(tol.atol, tol.rank_rtol * scale);

  std::vector<Matrix> out;
  Index start = 0;
  while (start < m) {
    Index stop = start + 1;
    while (stop < m &&
           eig.eigenvalues(stop - 1) - eig.eigenvalues(stop) <= gap)
      ++stop;
    out.push_back(q * eig.eigenvectors.middleCols(start, stop - start));
    start = stop;
  }
  return out;
}

}  // namespace

AbelianSubalgebra minimal_projections(const std::vector<Matrix>& family,
                                      const Tolerance& tol,
                                      std::uint64_t seed) {
  tol.validate();
  require(!family.empty(), errc::bad_parameters, "empty commuting family");
  const Index r = family.front().rows();
  for (const Matrix& s : family) {
    require(s.rows() == r && s.cols() == r, errc::shape_mismatch,
            "family members must share a square shape");
    const double herm = hermiticity_defect(s);
    require(herm <= tol.atol, errc::not_hermitian,
            "family member hermiticity defect " + std::to_string(herm));
  }
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double comm = op_norm(Matrix(family[i] * family[j] -
                                         family[j] * family[i]));
      require(comm <= tol.atol, errc::not_commuting,
              "commutator norm " + std::to_string(comm));
    }

  // Generic combination separates the joint eigenspaces almost surely; the
  // refinement loop below repairs any unlucky draw.
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix generic = Matrix::Zero(r, r);
  for (const Matrix& s : family) generic += gauss(rng) * s;
  generic = hermitized(generic);

  std::vector<Matrix> blocks =
      split_block(Matrix::Identity(r, r), generic, tol);
  for (const Matrix& s : family) {
    std::vector<Matrix> refined;
    for (const Matrix& q : blocks) {
      if (q.cols() == 1) {
        refined.push_back(q);
        continue;
      }
      std::vector<Matrix> parts = split_block(q, s, tol);
      refined.insert(refined.end(), parts.begin(), parts.end());
    }
    blocks = std::move(refined);
  }

  AbelianSubalgebra out;
  out.ambient_dim = r;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Matrix proj = blocks[i] * blocks[i].adjoint();
    out.min_projections.push_back(0.5 * (proj + proj.adjoint()));
    out.labels.push_back("p" + std::to_string(i));
  }
  return out;
}

MembershipResult membership(const std::vector<Matrix>& algebra_basis,
                            const Matrix& X, const Tolerance& tol) {
  tol.validate();
  require(!algebra_basis.empty(), errc::bad_parameters, "empty basis");
  for (const Matrix& b : algebra_basis)
    require(b.rows() == X.rows() && b.cols() == X.cols(),
            errc::shape_mismatch, "membership shapes");

  // The stored bases are orthonormal, but accept any spanning list by
  // solving the normal equations of the trace-inner-product projection.
  const Index k = static_cast<Index>(algebra_basis.size());
  Matrix gram(k, k);
  Vector rhs(k);
  for (Index i = 0; i < k; ++i) {
    rhs(i) = trace_dot(X, algebra_basis[i]);
    for (Index j = 0; j < k; ++j)
      gram(i, j) = trace_dot(algebra_basis[j], algebra_basis[i]);
  }
  const Vector coords = gram.ldlt().solve(rhs);

  Matrix approx = Matrix::Zero(X.rows(), X.cols());
  for (Index i = 0; i < k; ++i) approx += coords(i) * algebra_basis[i];

  MembershipResult out;
  out.residual = op_norm(Matrix(X - approx));
  out.member = out.residual <= tol.atol * (1.0 + op_norm(X));
  if (out.member) out.coords = coords;
  return out;
}

}  // namespace ucpm
