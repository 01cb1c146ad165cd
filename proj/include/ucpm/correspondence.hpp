#ifndef UCPM_CORRESPONDENCE_HPP
#define UCPM_CORRESPONDENCE_HPP

#include "ucpm/measures.hpp"

namespace ucpm {

enum class SubalgebraClass { orthogonal, sub_orthogonal, not_sub_orthogonal };

const char* subalgebra_class_name(SubalgebraClass c);

// Outcome of reading a measure off an abelian family of commutant
// projections. `not_sub_orthogonal` carries the offending compression
// V^* P V; `sub_orthogonal` means two projections induced the same atom.
struct SubalgebraVerdict {
  SubalgebraClass classification = SubalgebraClass::not_sub_orthogonal;
  std::optional<DiscreteMeasure> measure;
  std::vector<double> scalar_weights;  // one per retained projection
  std::vector<Index> dropped;          // zero-compression projections
  Index merged_atoms = 0;
  std::optional<std::pair<Index, Matrix>> failure_witness;
  double max_scalar_distance = 0.0;
};

// Direction measure -> subalgebra: the rounded Radon-Nikodym projections of
// the atoms, one per atom. On a non-minimal base any commutant mass the
// atom operators missed is absorbed by the heaviest atom's projection, so
// the family still resolves the identity.
AbelianSubalgebra subalgebra_from_measure(const DiscreteMeasure& mu,
                                          const StinespringTriple& base,
                                          const Tolerance& tol = {},
                                          const MeasureOptions& opts = {});

// Direction subalgebra -> measure: compress V by each minimal projection;
// scalar compressions lambda_i * 1 yield atoms (1/lambda_i) V^* P_i rho V
// with weights lambda_i.
SubalgebraVerdict measure_from_subalgebra(const AbelianSubalgebra& B,
                                          const StinespringTriple& base,
                                          const Tolerance& tol = {},
                                          const MeasureOptions& opts = {});

struct RoundtripMeasureReport {
  double atom_distance = 0.0;    // max over matched atoms
  double weight_distance = 0.0;  // max over matched weights
  std::vector<Index> permutation;
  bool closed = false;
};

// mu -> B_mu -> mu' must reproduce mu up to atom permutation.
RoundtripMeasureReport roundtrip_measure(const DiscreteMeasure& mu,
                                         const StinespringTriple& base,
                                         const Tolerance& tol = {},
                                         const MeasureOptions& opts = {});

struct RoundtripSubalgebraReport {
  SubalgebraClass classification = SubalgebraClass::orthogonal;
  Index dim_original = 0;
  Index dim_recovered = 0;
  double forward_residual = 0.0;   // recovered projections inside span(B)
  double backward_residual = 0.0;  // B's projections inside recovered span
  bool equal = false;
  bool strictly_contained = false;
};

// B -> mu_B -> B' closes to equality on the orthogonal sector and to a
// strict subalgebra when atoms merged.
RoundtripSubalgebraReport roundtrip_subalgebra(const AbelianSubalgebra& B,
                                               const StinespringTriple& base,
                                               const Tolerance& tol = {},
                                               const MeasureOptions& opts = {});

}  // namespace ucpm

#endif
