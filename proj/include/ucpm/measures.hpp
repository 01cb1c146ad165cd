#ifndef UCPM_MEASURES_HPP
#define UCPM_MEASURES_HPP

#include <optional>
#include <utility>
#include <vector>

#include "ucpm/radonnikodym.hpp"

namespace ucpm {

// Finitely supported probability measure on UCP maps: distinct atoms with
// positive weights summing to one.
struct DiscreteMeasure {
  std::vector<CpMap> atoms;
  std::vector<double> weights;

  Index size() const { return static_cast<Index>(atoms.size()); }

  void validate(const Tolerance& tol = {},
                double merge_tol = 1e-6) const;
};

// Knobs specific to orthogonality verdicts. `ortho_tol` is looser than
// `atol` because idempotency residuals accumulate two dilation
// constructions and a conjugation.
struct MeasureOptions {
  double ortho_tol = 1e-7;
  Index exhaustive_cap = 12;
  bool run_exhaustive = true;
  double merge_tol = 1e-6;
};

struct CanonicalMeasure {
  DiscreteMeasure measure;
  Index merged_atoms = 0;  // input atoms absorbed into earlier ones
};

// Merge atoms closer than merge_tol (weights added), then renormalize the
// weights; the weight sum must be 1 within atol.
CanonicalMeasure canonicalize(std::vector<CpMap> atoms,
                              std::vector<double> weights,
                              const Tolerance& tol = {},
                              double merge_tol = 1e-6);

CpMap barycenter(const DiscreteMeasure& mu);

//=========================================================================
// Orthogonality of a CP pair
//=========================================================================

struct PairOrthogonality {
  bool orthogonal = false;
  double idempotency_residual = 0.0;  // || T^2 - T ||
  RnOperator rn;                      // Radon-Nikodym operator of phi1
  std::optional<Matrix> witness;      // nearest projection when orthogonal
  double witness_residual = 0.0;      // reproduction through the witness
  StinespringTriple base;             // dilation of phi1 + phi2
};

// Decides phi1 _|_ phi2 inside the dilation of phi1 + phi2: the pair is
// orthogonal exactly when the Radon-Nikodym operator of phi1 is a
// projection.
PairOrthogonality are_orthogonal(const CpMap& phi1, const CpMap& phi2,
                                 const Tolerance& tol = {},
                                 const MeasureOptions& opts = {});

// Eigenvalues snapped to {0, 1} at threshold 1/2.
Matrix round_to_projection(const Matrix& T, const Tolerance& tol = {});

//=========================================================================
// The measure operators
//=========================================================================

// Radon-Nikodym operators of the weighted atoms against `base`, which must
// dilate the barycenter of mu.
std::vector<RnOperator> measure_rn_operators(const DiscreteMeasure& mu,
                                             const StinespringTriple& base,
                                             const Tolerance& tol = {});

// k_mu(f) = sum_i f(i) T_i for a bounded function given by its atom values.
Matrix k_mu(const DiscreteMeasure& mu, const std::vector<Complex>& f,
            const StinespringTriple& base, const Tolerance& tol = {});

//=========================================================================
// Orthogonal measures
//=========================================================================

struct MeasureCertificate {
  bool orthogonal = false;
  std::vector<double> idempotency_residuals;
  double max_idempotency = 0.0;
  double max_cross = 0.0;     // max over i != j of || T_i T_j ||
  double sum_residual = 0.0;  // || sum_i T_i - 1 ||
  std::vector<Index> failing_atoms;
  std::vector<std::pair<Index, Index>> failing_pairs;
  // Exhaustive subset check (every nonempty proper split), run for atom
  // counts up to the cap.
  std::optional<bool> subset_verdict;
  std::optional<std::uint64_t> failing_subset_mask;
  Index exhaustive_splits = 0;
  bool subset_test_skipped = false;
};

// Homomorphism-form test: every atom operator idempotent, mutually
// orthogonal, summing to the identity. For small atom counts the
// exhaustive split test runs alongside and is recorded in the certificate.
MeasureCertificate is_orthogonal_measure(const DiscreteMeasure& mu,
                                         const Tolerance& tol = {},
                                         const MeasureOptions& opts = {});

//=========================================================================
// Direct-sum disintegration
//=========================================================================

// Weighted direct sum of dilations: block embeddings scaled by sqrt(w_i).
// The result dilates `source`; it is minimal only when the measure formed
// by the parts is orthogonal.
StinespringTriple block_dilation(const std::vector<StinespringTriple>& parts,
                                 const std::vector<double>& weights,
                                 const CpMap& source,
                                 const Tolerance& tol = {});

struct DisintegrationResult {
  StinespringTriple base;  // minimal dilation of the barycenter
  std::vector<StinespringTriple> atom_triples;
  std::vector<Index> block_dims;
  Matrix U;  // (sum_i r_i) x r, always an isometry
  bool is_unitary = false;
  double isometry_residual = 0.0;
  double unitarity_residual = 0.0;
  double gram_mismatch = 0.0;

  Index total_block_dim() const;
};

// The canonical map K -> direct sum of the atoms' dilation spaces,
// determined on the spanning set rho(b_j) V e_t. Unitary exactly when the
// measure is orthogonal.
DisintegrationResult disintegrate(const DiscreteMeasure& mu,
                                  const Tolerance& tol = {},
                                  const MeasureOptions& opts = {});

struct DisintegrationReport {
  double representation_residual = 0.0;  // U rho(b_j) U^* vs block diagonal
  double diagonal_residual = 0.0;        // U k_mu(chi_i) U^* vs block proj
  bool passes = false;
};

DisintegrationReport disintegration_report(const DiscreteMeasure& mu,
                                           const DisintegrationResult& result,
                                           const Tolerance& tol = {},
                                           const MeasureOptions& opts = {});

}  // namespace ucpm

#endif
