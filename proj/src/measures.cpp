#include "ucpm/measures.hpp"

#include <cmath>

namespace ucpm {

void DiscreteMeasure::validate(const Tolerance& tol,
                               double merge_tol) const {
  tol.validate();
  require(!atoms.empty(), errc::bad_parameters, "measure without atoms");
  require(atoms.size() == weights.size(), errc::shape_mismatch,
          "atom/weight count mismatch");
  const AlgebraPtr alg = atoms.front().algebra;
  const Index n = atoms.front().out_dim;
  double sum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(atoms[i].algebra == alg && atoms[i].out_dim == n,
            errc::shape_mismatch, "atoms must share algebra and codomain");
    require(weights[i] > 0.0, errc::weight_sum_invalid,
            "weights must be positive");
    sum += weights[i];
  }
  require(std::abs(sum - 1.0) <= tol.atol, errc::weight_sum_invalid,
          "weights sum to " + std::to_string(sum));
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      require(map_distance(atoms[i], atoms[j]) > merge_tol,
              errc::bad_parameters,
              "atoms " + std::to_string(i) + " and " + std::to_string(j) +
                  " coincide below the merge threshold");
}

CanonicalMeasure canonicalize(std::vector<CpMap> atoms,
                              std::vector<double> weights,
                              const Tolerance& tol, double merge_tol) {
  tol.validate();
  require(!atoms.empty(), errc::bad_parameters, "no atoms");
  require(atoms.size() == weights.size(), errc::shape_mismatch,
          "atom/weight count mismatch");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    atoms[i].validate_structure(tol);
    require(atoms[i].algebra == atoms.front().algebra &&
                atoms[i].out_dim == atoms.front().out_dim,
            errc::shape_mismatch, "atoms must share algebra and codomain");
    require(weights[i] > 0.0, errc::weight_sum_invalid,
            "weights must be positive");
  }

  CanonicalMeasure out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    bool absorbed = false;
    for (std::size_t rep = 0; rep < out.measure.atoms.size(); ++rep) {
      if (map_distance(atoms[i], out.measure.atoms[rep]) <= merge_tol) {
        out.measure.weights[rep] += weights[i];
        ++out.merged_atoms;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) {
      out.measure.atoms.push_back(std::move(atoms[i]));
      out.measure.weights.push_back(weights[i]);
    }
  }

  double sum = 0.0;
  for (double w : out.measure.weights) sum += w;
  require(std::abs(sum - 1.0) <= tol.atol, errc::weight_sum_invalid,
          "weights sum to " + std::to_string(sum));
  for (double& w : out.measure.weights) w /= sum;
  return out;
}

CpMap barycenter(const DiscreteMeasure& mu) {
  require(!mu.atoms.empty(), errc::bad_parameters, "empty measure");
  CpMap out = mu.atoms.front().scaled(mu.weights.front());
  for (std::size_t i = 1; i < mu.atoms.size(); ++i)
    out = out + mu.atoms[i].scaled(mu.weights[i]);
  return out;
}

Matrix round_to_projection(const Matrix& T, const Tolerance& tol) {
  const HermEig eig = herm_eig(T, tol);
  Matrix proj = Matrix::Zero(T.rows(), T.cols());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > 0.5)
      proj += eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
  return 0.5 * (proj + proj.adjoint());
}

PairOrthogonality are_orthogonal(const CpMap& phi1, const CpMap& phi2,
                                 const Tolerance& tol,
                                 const MeasureOptions& opts) {
  tol.validate();
  require(phi1.algebra == phi2.algebra && phi1.out_dim == phi2.out_dim,
          errc::shape_mismatch, "pair must share algebra and codomain");
  require(is_completely_positive(phi1, tol), errc::not_cp,
          "first map is not completely positive");
  require(is_completely_positive(phi2, tol), errc::not_cp,
          "second map is not completely positive");

  const CpMap sum = phi1 + phi2;
  const double unital = sum.unitality_defect();
  require(unital <= tol.atol, errc::sum_not_unital,
          "sum has unitality defect " + std::to_string(unital));

  PairOrthogonality out;
  out.base = minimal_stinespring(sum, tol);
  out.rn = rn_operator(phi1, out.base, tol);
  out.idempotency_residual =
      op_norm(Matrix(out.rn.T * out.rn.T - out.rn.T));
  out.orthogonal = out.idempotency_residual <= opts.ortho_tol;

  if (out.orthogonal) {
    Matrix witness = round_to_projection(out.rn.T, tol);
    double res = 0.0;
    for (std::size_t i = 0; i < out.base.rho_images.size(); ++i)
      res = std::max(
          res, op_norm(Matrix(out.base.V.adjoint() * witness *
                                  out.base.rho_images[i] * out.base.V -
                              phi1.images[i])));
    out.witness_residual = res;
    out.witness = std::move(witness);
  }
  return out;
}

std::vector<RnOperator> measure_rn_operators(const DiscreteMeasure& mu,
                                             const StinespringTriple& base,
                                             const Tolerance& tol) {
  mu.validate(tol);
  const CpMap bary = barycenter(mu);
  require(bary.algebra == base.source.algebra &&
              bary.out_dim == base.source.out_dim,
          errc::base_mismatch, "base dilates a map on a different space");
  const double mismatch = map_distance(bary, base.source);
  require(mismatch <= 10.0 * tol.atol, errc::base_mismatch,
          "base does not dilate the barycenter, distance " +
              std::to_string(mismatch));

  std::vector<RnOperator> out;
  out.reserve(mu.atoms.size());
  for (std::size_t i = 0; i < mu.atoms.size(); ++i)
    out.push_back(
        rn_operator(mu.atoms[i].scaled(mu.weights[i]), base, tol));
  return out;
}

Matrix k_mu(const DiscreteMeasure& mu, const std::vector<Complex>& f,
            const StinespringTriple& base, const Tolerance& tol) {
  require(f.size() == mu.atoms.size(), errc::shape_mismatch,
          "one function value per atom required");
  const std::vector<RnOperator> rn = measure_rn_operators(mu, base, tol);
  Matrix out = Matrix::Zero(base.dil_dim, base.dil_dim);
  for (std::size_t i = 0; i < rn.size(); ++i) out += f[i] * rn[i].T;
  return out;
}

namespace {

CpMap partial_sum(const DiscreteMeasure& mu, std::uint64_t mask) {
  CpMap out;
  bool first = true;
  for (Index i = 0; i < mu.size(); ++i) {
    if (!(mask & (std::uint64_t{1} << i))) continue;
    CpMap term = mu.atoms[i].scaled(mu.weights[i]);
    out = first ? std::move(term) : out + term;
    first = false;
  }
  return out;
}

}  // namespace

MeasureCertificate is_orthogonal_measure(const DiscreteMeasure& mu,
                                         const Tolerance& tol,
                                         const MeasureOptions& opts) {
  mu.validate(tol, opts.merge_tol);
  const Index m = mu.size();
  const StinespringTriple base = minimal_stinespring(barycenter(mu), tol);
  const std::vector<RnOperator> rn = measure_rn_operators(mu, base, tol);

  MeasureCertificate cert;
  Matrix total = Matrix::Zero(base.dil_dim, base.dil_dim);
  for (Index i = 0; i < m; ++i) {
    const Matrix& t = rn[i].T;
    total += t;
    const double idem = op_norm(Matrix(t * t - t));
    cert.idempotency_residuals.push_back(idem);
    cert.max_idempotency = std::max(cert.max_idempotency, idem);
    if (idem > opts.ortho_tol) cert.failing_atoms.push_back(i);
    for (Index j = 0; j < i; ++j) {
      const double cross = op_norm(Matrix(rn[j].T * t));
      cert.max_cross = std::max(cert.max_cross, cross);
      if (cross > opts.ortho_tol) cert.failing_pairs.emplace_back(j, i);
    }
  }
  cert.sum_residual =
      op_norm(Matrix(total - Matrix::Identity(base.dil_dim, base.dil_dim)));
  cert.orthogonal = cert.failing_atoms.empty() &&
                    cert.failing_pairs.empty() &&
                    cert.sum_residual <= opts.ortho_tol;

  if (opts.run_exhaustive && m <= opts.exhaustive_cap) {
    // Every nonempty proper split, complements deduplicated by keeping
    // atom 0 on the left.
    bool all_splits = true;
    const std::uint64_t full = (std::uint64_t{1} << m) - 1;
    for (std::uint64_t mask = 1; mask < full && all_splits; mask += 2) {
      ++cert.exhaustive_splits;
      const PairOrthogonality split = are_orthogonal(
          partial_sum(mu, mask), partial_sum(mu, full & ~mask), tol, opts);
      if (!split.orthogonal) {
        all_splits = false;
        cert.failing_subset_mask = mask;
      }
    }
    cert.subset_verdict = all_splits;
  } else if (opts.run_exhaustive) {
    cert.subset_test_skipped = true;
  }
  return cert;
}

StinespringTriple block_dilation(const std::vector<StinespringTriple>& parts,
                                 const std::vector<double>& weights,
                                 const CpMap& source, const Tolerance& tol) {
  require(!parts.empty() && parts.size() == weights.size(),
          errc::bad_parameters, "block_dilation arity");
  const Index k = source.algebra->dim();
  const Index n = source.out_dim;
  Index total = 0;
  for (const StinespringTriple& part : parts) {
    require(part.source.algebra == source.algebra &&
                part.source.out_dim == n,
            errc::shape_mismatch, "block parts must match the source map");
    total += part.dil_dim;
  }

  Matrix V = Matrix::Zero(total, n);
  std::vector<Matrix> rho(k, Matrix::Zero(total, total));
  Index offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Index r_p = parts[p].dil_dim;
    V.middleRows(offset, r_p) =
        std::sqrt(weights[p]) * parts[p].V;
    for (Index l = 0; l < k; ++l)
      rho[l].block(offset, offset, r_p, r_p) = parts[p].rho_images[l];
    offset += r_p;
  }
  return StinespringTriple::from_parts(source, std::move(V), std::move(rho),
                                       tol);
}

Index DisintegrationResult::total_block_dim() const {
  Index total = 0;
  for (Index d : block_dims) total += d;
  return total;
}

DisintegrationResult disintegrate(const DiscreteMeasure& mu,
                                  const Tolerance& tol,
                                  const MeasureOptions& opts) {
  mu.validate(tol, opts.merge_tol);
  DisintegrationResult out;
  out.base = minimal_stinespring(barycenter(mu), tol);

  const Index kn = out.base.coord_factor.cols();
  Index total = 0;
  for (Index i = 0; i < mu.size(); ++i) {
    out.atom_triples.push_back(minimal_stinespring(mu.atoms[i], tol));
    out.block_dims.push_back(out.atom_triples.back().dil_dim);
    total += out.block_dims.back();
  }

  // Stack the weighted coordinate factors: column (j, t) of Y is the image
  // of the spanning vector rho(b_j) V e_t in the direct sum.
  Matrix y(total, kn);
  Index offset = 0;
  for (Index i = 0; i < mu.size(); ++i) {
    y.middleRows(offset, out.block_dims[i]) =
        std::sqrt(mu.weights[i]) * out.atom_triples[i].coord_factor;
    offset += out.block_dims[i];
  }

  const Matrix base_gram =
      out.base.coord_factor.adjoint() * out.base.coord_factor;
  out.gram_mismatch = op_norm(Matrix(y.adjoint() * y - base_gram));
  require(out.gram_mismatch <=
              10.0 * tol.atol * (1.0 + op_norm(base_gram)),
          errc::barycenter_mismatch,
          "spanning Gram forms disagree by " +
              std::to_string(out.gram_mismatch));

  out.U = y * out.base.coord_pinv;
  out.isometry_residual = op_norm(
      Matrix(out.U.adjoint() * out.U -
             Matrix::Identity(out.base.dil_dim, out.base.dil_dim)));
  out.unitarity_residual = op_norm(
      Matrix(out.U * out.U.adjoint() - Matrix::Identity(total, total)));
  out.is_unitary = out.unitarity_residual <= opts.ortho_tol;
  return out;
}

DisintegrationReport disintegration_report(const DiscreteMeasure& mu,
                                           const DisintegrationResult& result,
                                           const Tolerance& tol,
                                           const MeasureOptions& opts) {
  require(result.is_unitary, errc::not_unitary,
          "disintegration map is not unitary");
  const Index k = result.base.source.algebra->dim();
  const Index total = result.total_block_dim();

  DisintegrationReport report;
  for (Index j = 0; j < k; ++j) {
    Matrix block = Matrix::Zero(total, total);
    Index offset = 0;
    for (std::size_t i = 0; i < result.atom_triples.size(); ++i) {
      const Index r_i = result.block_dims[i];
      block.block(offset, offset, r_i, r_i) =
          result.atom_triples[i].rho_images[j];
      offset += r_i;
    }
    report.representation_residual = std::max(
        report.representation_residual,
        op_norm(Matrix(result.U * result.base.rho_images[j] *
                           result.U.adjoint() -
                       block)));
  }

  const std::vector<RnOperator> rn =
      measure_rn_operators(mu, result.base, tol);
  Index offset = 0;
  for (std::size_t i = 0; i < rn.size(); ++i) {
    const Index r_i = result.block_dims[i];
    Matrix block_proj = Matrix::Zero(total, total);
    block_proj.block(offset, offset, r_i, r_i) =
        Matrix::Identity(r_i, r_i);
    offset += r_i;
    report.diagonal_residual = std::max(
        report.diagonal_residual,
        op_norm(Matrix(result.U * rn[i].T * result.U.adjoint() -
                       block_proj)));
  }
  report.passes =
      report.representation_residual <= 10.0 * opts.ortho_tol &&
      report.diagonal_residual <= 10.0 * opts.ortho_tol;
  return report;
}

}  // namespace ucpm
