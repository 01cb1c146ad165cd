#include "ucpm/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ucpm {

const char* subalgebra_class_name(SubalgebraClass c) {
  switch (c) {
    case SubalgebraClass::orthogonal: return "Orthogonal";
    case SubalgebraClass::sub_orthogonal: return "SubOrthogonal";
    case SubalgebraClass::not_sub_orthogonal: return "NotSubOrthogonal";
  }
  return "?";
}

namespace {

void check_abelian_family(const AbelianSubalgebra& B,
                          const StinespringTriple& base,
                          const Tolerance& tol,
                          const MeasureOptions& opts) {
  require(B.size() > 0, errc::bad_parameters, "empty projection family");
  require(B.ambient_dim == base.dil_dim, errc::shape_mismatch,
          "subalgebra ambient dimension does not match the dilation");
  const Index r = base.dil_dim;
  Matrix total = Matrix::Zero(r, r);
  for (Index i = 0; i < B.size(); ++i) {
    const Matrix& p = B.min_projections[i];
    require(p.rows() == r && p.cols() == r, errc::shape_mismatch,
            "projection shape");
    require(hermiticity_defect(p) <= 10.0 * tol.atol, errc::not_hermitian,
            "projection " + std::to_string(i) + " is not hermitian");
    const double idem = op_norm(Matrix(p * p - p));
    require(idem <= 10.0 * opts.ortho_tol, errc::bad_parameters,
            "family member " + std::to_string(i) +
                " is not a projection, defect " + std::to_string(idem));
    for (Index j = 0; j < i; ++j) {
      const double cross = op_norm(Matrix(B.min_projections[j] * p));
      require(cross <= 10.0 * opts.ortho_tol, errc::bad_parameters,
              "projections " + std::to_string(j) + " and " +
                  std::to_string(i) + " overlap by " + std::to_string(cross));
    }
    for (const Matrix& rho : base.rho_images) {
      const double comm = op_norm(Matrix(rho * p - p * rho));
      require(comm <= 10.0 * tol.atol, errc::not_in_commutant,
              "projection " + std::to_string(i) +
                  " leaves the commutant by " + std::to_string(comm));
    }
    total += p;
  }
  const double resolution =
      op_norm(Matrix(total - Matrix::Identity(r, r)));
  require(resolution <= 10.0 * opts.ortho_tol, errc::bad_parameters,
          "projections do not resolve the identity, defect " +
              std::to_string(resolution));
}

}  // namespace

AbelianSubalgebra subalgebra_from_measure(const DiscreteMeasure& mu,
                                          const StinespringTriple& base,
                                          const Tolerance& tol,
                                          const MeasureOptions& opts) {
  MeasureOptions quiet = opts;
  quiet.run_exhaustive = false;
  const MeasureCertificate cert = is_orthogonal_measure(mu, tol, quiet);
  require(cert.orthogonal, errc::not_orthogonal_measure,
          "measure fails the orthogonality test, max idempotency defect " +
              std::to_string(cert.max_idempotency));

  const std::vector<RnOperator> rn = measure_rn_operators(mu, base, tol);
  const Index r = base.dil_dim;

  AbelianSubalgebra out;
  out.ambient_dim = r;
  Matrix covered = Matrix::Zero(r, r);
  for (Index i = 0; i < mu.size(); ++i) {
    Matrix p = round_to_projection(rn[i].T, tol);
    covered += p;
    out.min_projections.push_back(std::move(p));
    out.labels.push_back("atom" + std::to_string(i));
  }

  // On a non-minimal base the atom operators may leave part of the space
  // uncovered; hand that remainder to the heaviest atom. Reproduction is
  // unaffected because the remainder annihilates rho(A) V.
  Matrix leftover = Matrix::Identity(r, r) - covered;
  if (op_norm(leftover) > 10.0 * opts.ortho_tol) {
    leftover = hermitized(leftover);
    const double idem = op_norm(Matrix(leftover * leftover - leftover));
    require(idem <= 10.0 * opts.ortho_tol, errc::numerical_failure,
            "uncovered commutant mass is not a projection, defect " +
                std::to_string(idem));
    const Index heaviest = static_cast<Index>(std::distance(
        mu.weights.begin(),
        std::max_element(mu.weights.begin(), mu.weights.end())));
    out.min_projections[heaviest] += leftover;
  }

  check_abelian_family(out, base, tol, opts);
  return out;
}

SubalgebraVerdict measure_from_subalgebra(const AbelianSubalgebra& B,
                                          const StinespringTriple& base,
                                          const Tolerance& tol,
                                          const MeasureOptions& opts) {
  tol.validate();
  check_abelian_family(B, base, tol, opts);
  const Index n = base.out_dim();

  SubalgebraVerdict verdict;
  std::vector<CpMap> atoms;
  std::vector<double> weights;
  for (Index i = 0; i < B.size(); ++i) {
    const Matrix& p = B.min_projections[i];
    const Matrix w = base.V.adjoint() * p * base.V;
    if (op_norm(w) <= tol.atol) {
      verdict.dropped.push_back(i);
      continue;
    }
    const double lambda = std::real(w.trace()) / static_cast<double>(n);
    const double scalar_distance =
        op_norm(Matrix(w - lambda * Matrix::Identity(n, n)));
    verdict.max_scalar_distance =
        std::max(verdict.max_scalar_distance, scalar_distance);
    if (scalar_distance > tol.atol || lambda <= 0.0) {
      verdict.classification = SubalgebraClass::not_sub_orthogonal;
      verdict.failure_witness = std::make_pair(i, w);
      return verdict;
    }
    CpMap atom;
    atom.algebra = base.source.algebra;
    atom.out_dim = n;
    atom.images.reserve(base.rho_images.size());
    for (const Matrix& rho : base.rho_images)
      atom.images.push_back((1.0 / lambda) *
                            (base.V.adjoint() * p * rho * base.V));
    atoms.push_back(std::move(atom));
    weights.push_back(lambda);
  }
  require(!atoms.empty(), errc::bad_parameters,
          "every projection compressed to zero");

  CanonicalMeasure canonical =
      canonicalize(std::move(atoms), weights, tol, opts.merge_tol);
  verdict.scalar_weights = std::move(weights);
  verdict.merged_atoms = canonical.merged_atoms;
  verdict.classification = canonical.merged_atoms > 0
                               ? SubalgebraClass::sub_orthogonal
                               : SubalgebraClass::orthogonal;

  MeasureOptions quiet = opts;
  quiet.run_exhaustive = false;
  const MeasureCertificate cert =
      is_orthogonal_measure(canonical.measure, tol, quiet);
  require(cert.orthogonal, errc::numerical_failure,
          "recovered measure fails the orthogonality test, defect " +
              std::to_string(cert.max_idempotency));
  verdict.measure = std::move(canonical.measure);
  return verdict;
}

namespace {

// Best atom matching by brute force for small measures, greedy otherwise.
std::vector<Index> match_atoms(const DiscreteMeasure& a,
                               const DiscreteMeasure& b) {
  const Index m = a.size();
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), Index{0});
  if (m <= 7) {
    std::vector<Index> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<Index> current = perm;
    std::sort(current.begin(), current.end());
    do {
      double cost = 0.0;
      for (Index i = 0; i < m; ++i)
        cost = std::max(cost, map_distance(a.atoms[i],
                                           b.atoms[current[i]]));
      if (cost < best_cost) {
        best_cost = cost;
        best = current;
      }
    } while (std::next_permutation(current.begin(), current.end()));
    return best;
  }
  std::vector<bool> used(m, false);
  for (Index i = 0; i < m; ++i) {
    double best_cost = std::numeric_limits<double>::infinity();
    Index best_j = 0;
    for (Index j = 0; j < m; ++j) {
      if (used[j]) continue;
      const double cost = map_distance(a.atoms[i], b.atoms[j]);
      if (cost < best_cost) {
        best_cost = cost;
        best_j = j;
      }
    }
    used[best_j] = true;
    perm[i] = best_j;
  }
  return perm;
}

}  // namespace

RoundtripMeasureReport roundtrip_measure(const DiscreteMeasure& mu,
                                         const StinespringTriple& base,
                                         const Tolerance& tol,
                                         const MeasureOptions& opts) {
  const AbelianSubalgebra B = subalgebra_from_measure(mu, base, tol, opts);
  const SubalgebraVerdict verdict =
      measure_from_subalgebra(B, base, tol, opts);
  require(verdict.measure.has_value(), errc::numerical_failure,
          "round trip lost the measure");
  const DiscreteMeasure& recovered = *verdict.measure;

  RoundtripMeasureReport report;
  if (recovered.size() != mu.size()) {
    report.closed = false;
    report.atom_distance = std::numeric_limits<double>::infinity();
    return report;
  }
  report.permutation = match_atoms(mu, recovered);
  for (Index i = 0; i < mu.size(); ++i) {
    report.atom_distance = std::max(
        report.atom_distance,
        map_distance(mu.atoms[i], recovered.atoms[report.permutation[i]]));
    report.weight_distance = std::max(
        report.weight_distance,
        std::abs(mu.weights[i] - recovered.weights[report.permutation[i]]));
  }
  report.closed = report.atom_distance <= opts.merge_tol &&
                  report.weight_distance <= 10.0 * tol.atol;
  return report;
}

namespace {

double span_membership_residual(const std::vector<Matrix>& span_basis,
                                const std::vector<Matrix>& members,
                                const Tolerance& tol) {
  double worst = 0.0;
  for (const Matrix& m : members)
    worst = std::max(worst, membership(span_basis, m, tol).residual);
  return worst;
}

}  // namespace

RoundtripSubalgebraReport roundtrip_subalgebra(const AbelianSubalgebra& B,
                                               const StinespringTriple& base,
                                               const Tolerance& tol,
                                               const MeasureOptions& opts) {
  const SubalgebraVerdict verdict =
      measure_from_subalgebra(B, base, tol, opts);
  require(verdict.classification != SubalgebraClass::not_sub_orthogonal,
          errc::bad_parameters,
          "round trip undefined for a NotSubOrthogonal family");
  const AbelianSubalgebra recovered =
      subalgebra_from_measure(*verdict.measure, base, tol, opts);

  RoundtripSubalgebraReport report;
  report.classification = verdict.classification;
  report.dim_original = B.size();
  report.dim_recovered = recovered.size();
  report.forward_residual =
      span_membership_residual(B.min_projections,
                               recovered.min_projections, tol);
  report.backward_residual =
      span_membership_residual(recovered.min_projections,
                               B.min_projections, tol);
  report.equal = report.forward_residual <= 10.0 * tol.atol &&
                 report.backward_residual <= 10.0 * tol.atol;
  report.strictly_contained =
      report.forward_residual <= 10.0 * tol.atol &&
      report.dim_recovered < report.dim_original;
  return report;
}

}  // namespace ucpm
