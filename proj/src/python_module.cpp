// Python bindings for the core operations: algebras, CP maps, dilations,
// Radon-Nikodym operators, orthogonal measures and the correspondence.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ucpm/correspondence.hpp"
#include "ucpm/gallery.hpp"

namespace py = pybind11;
using namespace ucpm;

namespace {

py::dict report_to_dict(const DilationReport& report) {
  py::dict out;
  for (const auto& [name, value] : report.residuals)
    out[name.c_str()] = value;
  out["spanning_rank"] = report.spanning_rank;
  out["minimal"] = report.minimal;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Minimal Stinespring dilations, Arveson Radon-Nikodym operators and "
      "orthogonal barycentric measures for finite-dimensional UCP maps";

  py::register_exception<Error>(m, "Error");

  py::class_<Tolerance>(m, "Tolerance")
      .def(py::init([](double atol, double rank_rtol) {
             Tolerance t{atol, rank_rtol};
             t.validate();
             return t;
           }),
           py::arg("atol") = 1e-8, py::arg("rank_rtol") = 1e-10)
      .def_readwrite("atol", &Tolerance::atol)
      .def_readwrite("rank_rtol", &Tolerance::rank_rtol);

  py::class_<MeasureOptions>(m, "MeasureOptions")
      .def(py::init<>())
      .def_readwrite("ortho_tol", &MeasureOptions::ortho_tol)
      .def_readwrite("exhaustive_cap", &MeasureOptions::exhaustive_cap)
      .def_readwrite("run_exhaustive", &MeasureOptions::run_exhaustive)
      .def_readwrite("merge_tol", &MeasureOptions::merge_tol);

  // The C++ API hands out shared_ptr<const StarAlgebra>; pybind11 holders
  // must be non-const, so returns are const-cast at this boundary only.
  auto unconst = [](const AlgebraPtr& p) {
    return std::const_pointer_cast<StarAlgebra>(p);
  };

  py::class_<StarAlgebra, std::shared_ptr<StarAlgebra>>(m, "StarAlgebra")
      .def_readonly("ambient_dim", &StarAlgebra::ambient_dim)
      .def_property_readonly("dim", &StarAlgebra::dim)
      .def_readonly("basis", &StarAlgebra::basis)
      .def_property_readonly("is_full", &StarAlgebra::is_full)
      .def("__repr__", [](const StarAlgebra& a) {
        return "<StarAlgebra dim " + std::to_string(a.dim()) + " in M_" +
               std::to_string(a.ambient_dim) + ">";
      });

  m.def("full_matrix_algebra",
        [unconst](Index d) { return unconst(full_matrix_algebra(d)); },
        py::arg("d"));
  m.def("close_star_algebra",
        [unconst](Index ambient_dim, const std::vector<Matrix>& generators,
                  const Tolerance& tol) {
          return unconst(close_star_algebra(ambient_dim, generators, tol));
        },
        py::arg("ambient_dim"), py::arg("generators"),
        py::arg("tol") = Tolerance{});
  m.def("matrix_amplification",
        [unconst](const AlgebraPtr& algebra, Index n, const Tolerance& tol) {
          return unconst(matrix_amplification(algebra, n, tol));
        },
        py::arg("algebra"), py::arg("n"), py::arg("tol") = Tolerance{});
  m.def("commutant", &commutant, py::arg("operators"),
        py::arg("tol") = Tolerance{});

  py::class_<AbelianSubalgebra>(m, "AbelianSubalgebra")
      .def(py::init([](Index ambient_dim, std::vector<Matrix> projections,
                       std::vector<std::string> labels) {
             AbelianSubalgebra out;
             out.ambient_dim = ambient_dim;
             out.min_projections = std::move(projections);
             if (labels.empty())
               for (std::size_t i = 0; i < out.min_projections.size(); ++i)
                 labels.push_back("p" + std::to_string(i));
             out.labels = std::move(labels);
             return out;
           }),
           py::arg("ambient_dim"), py::arg("projections"),
           py::arg("labels") = std::vector<std::string>{})
      .def_readonly("ambient_dim", &AbelianSubalgebra::ambient_dim)
      .def_readonly("min_projections", &AbelianSubalgebra::min_projections)
      .def_readonly("labels", &AbelianSubalgebra::labels)
      .def_property_readonly("size", &AbelianSubalgebra::size);

  m.def("minimal_projections", &minimal_projections, py::arg("family"),
        py::arg("tol") = Tolerance{}, py::arg("seed") = 0x5eed5eedULL);

  py::class_<CpMap>(m, "CpMap")
      .def(py::init([](AlgebraPtr algebra, Index out_dim,
                       std::vector<Matrix> images, const Tolerance& tol) {
             CpMap out{std::move(algebra), out_dim, std::move(images)};
             out.validate_structure(tol);
             return out;
           }),
           py::arg("algebra"), py::arg("out_dim"), py::arg("images"),
           py::arg("tol") = Tolerance{})
      .def_property_readonly(
          "algebra",
          [unconst](const CpMap& map) { return unconst(map.algebra); })
      .def_readonly("out_dim", &CpMap::out_dim)
      .def_readonly("images", &CpMap::images)
      .def("unitality_defect", &CpMap::unitality_defect)
      .def("apply", &CpMap::apply, py::arg("x"),
           py::arg("tol") = Tolerance{})
      .def("scaled", &CpMap::scaled, py::arg("factor"))
      .def("__add__",
           [](const CpMap& a, const CpMap& b) { return a + b; });

  m.def("map_distance", &map_distance, py::arg("a"), py::arg("b"));
  m.def("cp_gram", &cp_gram, py::arg("phi"), py::arg("tol") = Tolerance{});
  m.def("is_completely_positive", &is_completely_positive, py::arg("phi"),
        py::arg("tol") = Tolerance{});
  m.def("choi_matrix", &choi_matrix, py::arg("phi"),
        py::arg("tol") = Tolerance{});

  py::class_<StinespringTriple>(m, "StinespringTriple")
      .def_readonly("source", &StinespringTriple::source)
      .def_readonly("dil_dim", &StinespringTriple::dil_dim)
      .def_readonly("V", &StinespringTriple::V)
      .def_readonly("rho_images", &StinespringTriple::rho_images)
      .def_readonly("minimal", &StinespringTriple::minimal)
      .def_static("from_parts", &StinespringTriple::from_parts,
                  py::arg("source"), py::arg("V"), py::arg("rho_images"),
                  py::arg("tol") = Tolerance{});

  m.def("minimal_stinespring", &minimal_stinespring, py::arg("phi"),
        py::arg("tol") = Tolerance{}, py::arg("require_unital") = true);
  m.def(
      "verify_dilation",
      [](const StinespringTriple& triple, const Tolerance& tol) {
        return report_to_dict(verify_dilation(triple, tol));
      },
      py::arg("triple"), py::arg("tol") = Tolerance{});

  py::class_<RnOperator>(m, "RnOperator")
      .def_readonly("T", &RnOperator::T)
      .def_readonly("commutant_residual", &RnOperator::commutant_residual)
      .def_readonly("interval_residual", &RnOperator::interval_residual)
      .def_readonly("reproduction_residual",
                    &RnOperator::reproduction_residual)
      .def_readonly("discarded_mass", &RnOperator::discarded_mass);

  m.def("in_order_interval", &in_order_interval, py::arg("theta"),
        py::arg("phi"), py::arg("tol") = Tolerance{});
  m.def("rn_operator", &rn_operator, py::arg("theta"), py::arg("base"),
        py::arg("tol") = Tolerance{});
  m.def("map_from_operator", &map_from_operator, py::arg("T"),
        py::arg("base"), py::arg("tol") = Tolerance{});

  py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
      .def(py::init([](std::vector<CpMap> atoms, std::vector<double> weights,
                       const Tolerance& tol, double merge_tol) {
             return canonicalize(std::move(atoms), std::move(weights), tol,
                                 merge_tol)
                 .measure;
           }),
           py::arg("atoms"), py::arg("weights"),
           py::arg("tol") = Tolerance{}, py::arg("merge_tol") = 1e-6)
      .def_readonly("atoms", &DiscreteMeasure::atoms)
      .def_readonly("weights", &DiscreteMeasure::weights)
      .def_property_readonly("size", &DiscreteMeasure::size);

  m.def("barycenter", &barycenter, py::arg("mu"));

  py::class_<PairOrthogonality>(m, "PairOrthogonality")
      .def_readonly("orthogonal", &PairOrthogonality::orthogonal)
      .def_readonly("idempotency_residual",
                    &PairOrthogonality::idempotency_residual)
      .def_readonly("rn", &PairOrthogonality::rn)
      .def_readonly("witness", &PairOrthogonality::witness)
      .def_readonly("witness_residual", &PairOrthogonality::witness_residual)
      .def_readonly("base", &PairOrthogonality::base);

  m.def("are_orthogonal", &are_orthogonal, py::arg("phi1"), py::arg("phi2"),
        py::arg("tol") = Tolerance{}, py::arg("opts") = MeasureOptions{});
  m.def("round_to_projection", &round_to_projection, py::arg("T"),
        py::arg("tol") = Tolerance{});
  m.def("measure_rn_operators", &measure_rn_operators, py::arg("mu"),
        py::arg("base"), py::arg("tol") = Tolerance{});
  m.def("k_mu", &k_mu, py::arg("mu"), py::arg("f"), py::arg("base"),
        py::arg("tol") = Tolerance{});

  py::class_<MeasureCertificate>(m, "MeasureCertificate")
      .def_readonly("orthogonal", &MeasureCertificate::orthogonal)
      .def_readonly("idempotency_residuals",
                    &MeasureCertificate::idempotency_residuals)
      .def_readonly("max_idempotency", &MeasureCertificate::max_idempotency)
      .def_readonly("max_cross", &MeasureCertificate::max_cross)
      .def_readonly("sum_residual", &MeasureCertificate::sum_residual)
      .def_readonly("failing_atoms", &MeasureCertificate::failing_atoms)
      .def_readonly("failing_pairs", &MeasureCertificate::failing_pairs)
      .def_readonly("subset_verdict", &MeasureCertificate::subset_verdict)
      .def_readonly("failing_subset_mask",
                    &MeasureCertificate::failing_subset_mask)
      .def_readonly("exhaustive_splits",
                    &MeasureCertificate::exhaustive_splits)
      .def_readonly("subset_test_skipped",
                    &MeasureCertificate::subset_test_skipped);

  m.def("is_orthogonal_measure", &is_orthogonal_measure, py::arg("mu"),
        py::arg("tol") = Tolerance{}, py::arg("opts") = MeasureOptions{});
  m.def("block_dilation", &block_dilation, py::arg("parts"),
        py::arg("weights"), py::arg("source"), py::arg("tol") = Tolerance{});

  py::class_<DisintegrationResult>(m, "DisintegrationResult")
      .def_readonly("base", &DisintegrationResult::base)
      .def_readonly("atom_triples", &DisintegrationResult::atom_triples)
      .def_readonly("block_dims", &DisintegrationResult::block_dims)
      .def_readonly("U", &DisintegrationResult::U)
      .def_readonly("is_unitary", &DisintegrationResult::is_unitary)
      .def_readonly("isometry_residual",
                    &DisintegrationResult::isometry_residual)
      .def_readonly("unitarity_residual",
                    &DisintegrationResult::unitarity_residual)
      .def_readonly("gram_mismatch", &DisintegrationResult::gram_mismatch)
      .def_property_readonly("total_block_dim",
                             &DisintegrationResult::total_block_dim);

  m.def("disintegrate", &disintegrate, py::arg("mu"),
        py::arg("tol") = Tolerance{}, py::arg("opts") = MeasureOptions{});

  py::class_<DisintegrationReport>(m, "DisintegrationReport")
      .def_readonly("representation_residual",
                    &DisintegrationReport::representation_residual)
      .def_readonly("diagonal_residual",
                    &DisintegrationReport::diagonal_residual)
      .def_readonly("passes", &DisintegrationReport::passes);

  m.def("disintegration_report", &disintegration_report, py::arg("mu"),
        py::arg("result"), py::arg("tol") = Tolerance{},
        py::arg("opts") = MeasureOptions{});

  py::enum_<SubalgebraClass>(m, "SubalgebraClass")
      .value("Orthogonal", SubalgebraClass::orthogonal)
      .value("SubOrthogonal", SubalgebraClass::sub_orthogonal)
      .value("NotSubOrthogonal", SubalgebraClass::not_sub_orthogonal);

  py::class_<SubalgebraVerdict>(m, "SubalgebraVerdict")
      .def_readonly("classification", &SubalgebraVerdict::classification)
      .def_readonly("measure", &SubalgebraVerdict::measure)
      .def_readonly("scalar_weights", &SubalgebraVerdict::scalar_weights)
      .def_readonly("dropped", &SubalgebraVerdict::dropped)
      .def_readonly("merged_atoms", &SubalgebraVerdict::merged_atoms)
      .def_readonly("failure_witness", &SubalgebraVerdict::failure_witness)
      .def_readonly("max_scalar_distance",
                    &SubalgebraVerdict::max_scalar_distance);

  m.def("subalgebra_from_measure", &subalgebra_from_measure, py::arg("mu"),
        py::arg("base"), py::arg("tol") = Tolerance{},
        py::arg("opts") = MeasureOptions{});
  m.def("measure_from_subalgebra", &measure_from_subalgebra, py::arg("B"),
        py::arg("base"), py::arg("tol") = Tolerance{},
        py::arg("opts") = MeasureOptions{});

  py::class_<RoundtripMeasureReport>(m, "RoundtripMeasureReport")
      .def_readonly("atom_distance", &RoundtripMeasureReport::atom_distance)
      .def_readonly("weight_distance",
                    &RoundtripMeasureReport::weight_distance)
      .def_readonly("permutation", &RoundtripMeasureReport::permutation)
      .def_readonly("closed", &RoundtripMeasureReport::closed);

  py::class_<RoundtripSubalgebraReport>(m, "RoundtripSubalgebraReport")
      .def_readonly("classification",
                    &RoundtripSubalgebraReport::classification)
      .def_readonly("dim_original", &RoundtripSubalgebraReport::dim_original)
      .def_readonly("dim_recovered",
                    &RoundtripSubalgebraReport::dim_recovered)
      .def_readonly("forward_residual",
                    &RoundtripSubalgebraReport::forward_residual)
      .def_readonly("backward_residual",
                    &RoundtripSubalgebraReport::backward_residual)
      .def_readonly("equal", &RoundtripSubalgebraReport::equal)
      .def_readonly("strictly_contained",
                    &RoundtripSubalgebraReport::strictly_contained);

  m.def("roundtrip_measure", &roundtrip_measure, py::arg("mu"),
        py::arg("base"), py::arg("tol") = Tolerance{},
        py::arg("opts") = MeasureOptions{});
  m.def("roundtrip_subalgebra", &roundtrip_subalgebra, py::arg("B"),
        py::arg("base"), py::arg("tol") = Tolerance{},
        py::arg("opts") = MeasureOptions{});

  // Reference instances and seeded generators.
  m.def("state_instance", &state_instance, py::arg("algebra"),
        py::arg("density"), py::arg("tol") = Tolerance{});
  m.def("example_entrywise", &example_entrywise, py::arg("state_measure"),
        py::arg("n"), py::arg("tol") = Tolerance{});
  m.def("example_diagonal", &example_diagonal, py::arg("state_measure"),
        py::arg("n"), py::arg("tol") = Tolerance{});
  m.def("random_ucp", &random_ucp, py::arg("d"), py::arg("n"),
        py::arg("kraus_rank"), py::arg("seed"));
  m.def("random_state", &random_state, py::arg("d"), py::arg("rank"),
        py::arg("seed"));
  m.def("random_orthogonal_measure", &random_orthogonal_measure,
        py::arg("phi"), py::arg("max_atoms"), py::arg("seed"),
        py::arg("tol") = Tolerance{}, py::arg("opts") = MeasureOptions{});

  m.attr("__version__") = "0.1.0";
}
