// ucpm: batch front end for dilations, Radon-Nikodym operators and
// orthogonality certificates over JSON instance files.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ucpm/correspondence.hpp"
#include "ucpm/gallery.hpp"
#include "ucpm/instance_io.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using ucpm::Json;

struct CommonOptions {
  double atol = 1e-8;
  double rank_rtol = 1e-10;
  double ortho_tol = 1e-7;
  ucpm::Index exhaustive_cap = 12;
  std::string output = "text";
  std::uint64_t seed = 0;
  bool seed_set = false;

  ucpm::Tolerance tol() const { return {atol, rank_rtol}; }
  ucpm::MeasureOptions opts() const {
    ucpm::MeasureOptions o;
    o.ortho_tol = ortho_tol;
    o.exhaustive_cap = exhaustive_cap;
    return o;
  }
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--tol", common.atol, "absolute tolerance (atol)");
  cmd->add_option("--rank-rtol", common.rank_rtol,
                  "relative rank cutoff for Gram eigenvalues");
  cmd->add_option("--ortho-tol", common.ortho_tol,
                  "tolerance for orthogonality verdicts");
  cmd->add_option("--exhaustive-cap", common.exhaustive_cap,
                  "max atom count for the exhaustive split test");
  cmd->add_option("--output", common.output, "certificate format")
      ->check(CLI::IsMember({"text", "json"}));
}

// Instance-level overrides lose to explicit command-line flags.
void merge_instance_tolerances(const ucpm::Instance& inst, const CLI::App* cmd,
                               CommonOptions& common) {
  if (cmd->count("--tol") == 0) common.atol = inst.tol.atol;
  if (cmd->count("--rank-rtol") == 0) common.rank_rtol = inst.tol.rank_rtol;
  if (cmd->count("--ortho-tol") == 0) common.ortho_tol = inst.opts.ortho_tol;
  if (cmd->count("--exhaustive-cap") == 0)
    common.exhaustive_cap = inst.opts.exhaustive_cap;
}

void render_text(const Json& j, const std::string& prefix,
                 std::ostream& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object())
      render_text(value, path, out);
    else
      out << std::left << std::setw(34) << path << " " << value.dump()
          << "\n";
  }
}

void emit_certificate(const Json& cert, const CommonOptions& common) {
  if (common.output == "json") {
    std::cout << cert.dump(2) << std::endl;
  } else {
    render_text(cert, "", std::cout);
    std::cout.flush();
  }
}

Json certificate_shell(const std::string& command) {
  Json cert;
  cert["command"] = command;
  cert["tool_version"] = kToolVersion;
  return cert;
}

std::string join_args(int argc, char** argv) {
  std::ostringstream s;
  for (int i = 0; i < argc; ++i) s << (i ? " " : "") << argv[i];
  return s.str();
}

Json residuals_json(const ucpm::RnOperator& rn) {
  return Json{{"commutant", rn.commutant_residual},
              {"interval", rn.interval_residual},
              {"reproduction", rn.reproduction_residual},
              {"discarded_mass", rn.discarded_mass}};
}

Json map_payload(const ucpm::CpMap& map) {
  Json payload;
  payload["out_dim"] = map.out_dim;
  Json images = Json::array();
  for (const ucpm::Matrix& img : map.images)
    images.push_back(ucpm::matrix_to_json(img));
  payload["images"] = std::move(images);
  return payload;
}

//=========================================================================
// Subcommand bodies
//=========================================================================

Json run_dilate(const ucpm::Instance& inst, const std::string& map_name,
                const CommonOptions& common) {
  const ucpm::CpMap& phi = inst.map(map_name);
  const ucpm::StinespringTriple triple =
      ucpm::minimal_stinespring(phi, common.tol());
  const ucpm::DilationReport report =
      ucpm::verify_dilation(triple, common.tol());

  Json cert;
  cert["dims"]["algebra_dim"] = phi.algebra->dim();
  cert["dims"]["out_dim"] = phi.out_dim;
  cert["dims"]["dil_dim"] = triple.dil_dim;
  for (const auto& [name, value] : report.residuals)
    cert["residuals"][name] = value;
  cert["verdicts"]["dilation_valid"] = report.passes(common.tol());
  if (phi.algebra->is_full()) {
    const ucpm::Index choi_rank = ucpm::psd_rank(
        ucpm::choi_matrix(phi, common.tol()), common.tol());
    cert["dims"]["choi_rank"] = choi_rank;
    cert["verdicts"]["gram_choi_consistent"] =
        triple.dil_dim == phi.algebra->ambient_dim * choi_rank;
  }
  cert["witnesses"]["V"] = ucpm::matrix_to_json(triple.V);
  return cert;
}

Json run_check_cp(const ucpm::Instance& inst, const std::string& map_name,
                  const CommonOptions& common) {
  const ucpm::CpMap& phi = inst.map(map_name);
  const ucpm::Matrix gram = ucpm::cp_gram(phi, common.tol());
  const ucpm::HermEig eig = ucpm::herm_eig(gram, common.tol());

  Json cert;
  cert["verdicts"]["completely_positive"] =
      ucpm::is_completely_positive(phi, common.tol());
  cert["residuals"]["gram_min_eigenvalue"] =
      eig.eigenvalues(eig.eigenvalues.size() - 1);
  cert["residuals"]["unitality_defect"] = phi.unitality_defect();
  cert["dims"]["gram_rank"] = ucpm::psd_rank(gram, common.tol());
  if (phi.algebra->is_full()) {
    const ucpm::HermEig choi =
        ucpm::herm_eig(ucpm::choi_matrix(phi, common.tol()), common.tol());
    cert["residuals"]["choi_min_eigenvalue"] =
        choi.eigenvalues(choi.eigenvalues.size() - 1);
  }
  return cert;
}

Json run_rn(const ucpm::Instance& inst, const std::string& theta_name,
            const std::string& base_name, const CommonOptions& common) {
  const ucpm::CpMap& theta = inst.map(theta_name);
  const ucpm::CpMap& phi = inst.map(base_name);
  const ucpm::StinespringTriple base =
      ucpm::minimal_stinespring(phi, common.tol());
  const ucpm::RnOperator rn = ucpm::rn_operator(theta, base, common.tol());

  Json cert;
  cert["dims"]["dil_dim"] = base.dil_dim;
  cert["residuals"] = residuals_json(rn);
  cert["verdicts"]["within_tolerance"] = rn.within(common.tol());
  cert["witnesses"]["T"] = ucpm::matrix_to_json(rn.T);
  return cert;
}

Json run_check_pair(const ucpm::Instance& inst, const std::string& first,
                    const std::string& second,
                    const CommonOptions& common) {
  const ucpm::PairOrthogonality result = ucpm::are_orthogonal(
      inst.map(first), inst.map(second), common.tol(), common.opts());

  Json cert;
  cert["verdicts"]["orthogonal"] = result.orthogonal;
  cert["residuals"]["idempotency"] = result.idempotency_residual;
  cert["residuals"] .update(residuals_json(result.rn));
  cert["dims"]["dil_dim"] = result.base.dil_dim;
  if (result.witness.has_value()) {
    cert["witnesses"]["P"] = ucpm::matrix_to_json(*result.witness);
    cert["residuals"]["witness_reproduction"] = result.witness_residual;
  }
  return cert;
}

Json run_check_measure(const ucpm::Instance& inst,
                       const std::string& measure_name,
                       const CommonOptions& common) {
  const ucpm::DiscreteMeasure mu = inst.measure(measure_name);
  const ucpm::MeasureCertificate cert_data =
      ucpm::is_orthogonal_measure(mu, common.tol(), common.opts());
  const ucpm::StinespringTriple base =
      ucpm::minimal_stinespring(ucpm::barycenter(mu), common.tol());
  const std::vector<ucpm::RnOperator> rn =
      ucpm::measure_rn_operators(mu, base, common.tol());

  Json cert;
  cert["verdicts"]["orthogonal"] = cert_data.orthogonal;
  cert["residuals"]["max_idempotency"] = cert_data.max_idempotency;
  cert["residuals"]["max_cross"] = cert_data.max_cross;
  cert["residuals"]["sum_residual"] = cert_data.sum_residual;
  cert["residuals"]["idempotency_per_atom"] =
      cert_data.idempotency_residuals;
  cert["dims"]["atoms"] = mu.size();
  cert["dims"]["dil_dim"] = base.dil_dim;
  if (cert_data.subset_verdict.has_value()) {
    cert["verdicts"]["subset_test"] = *cert_data.subset_verdict;
    cert["dims"]["exhaustive_splits"] = cert_data.exhaustive_splits;
    cert["verdicts"]["tests_agree"] =
        cert_data.orthogonal == *cert_data.subset_verdict;
  }
  if (cert_data.subset_test_skipped)
    cert["verdicts"]["subset_test_skipped"] = true;
  if (!cert_data.failing_atoms.empty())
    cert["verdicts"]["failing_atoms"] = cert_data.failing_atoms;
  if (cert_data.failing_subset_mask.has_value())
    cert["verdicts"]["failing_subset_mask"] =
        *cert_data.failing_subset_mask;
  Json witnesses = Json::array();
  for (const ucpm::RnOperator& op : rn)
    witnesses.push_back(ucpm::matrix_to_json(op.T));
  cert["witnesses"]["rn_operators"] = std::move(witnesses);
  return cert;
}

Json run_u_mu(const ucpm::Instance& inst, const std::string& measure_name,
              const CommonOptions& common) {
  const ucpm::DiscreteMeasure mu = inst.measure(measure_name);
  const ucpm::DisintegrationResult result =
      ucpm::disintegrate(mu, common.tol(), common.opts());

  Json cert;
  cert["verdicts"]["unitary"] = result.is_unitary;
  cert["residuals"]["isometry"] = result.isometry_residual;
  cert["residuals"]["unitarity"] = result.unitarity_residual;
  cert["residuals"]["gram_mismatch"] = result.gram_mismatch;
  cert["dims"]["dil_dim"] = result.base.dil_dim;
  cert["dims"]["block_dims"] = result.block_dims;
  cert["dims"]["total_block_dim"] = result.total_block_dim();
  if (result.is_unitary) {
    const ucpm::DisintegrationReport report = ucpm::disintegration_report(
        mu, result, common.tol(), common.opts());
    cert["residuals"]["representation"] = report.representation_residual;
    cert["residuals"]["diagonal"] = report.diagonal_residual;
    cert["verdicts"]["disintegration_valid"] = report.passes;
  }
  cert["witnesses"]["U"] = ucpm::matrix_to_json(result.U);
  return cert;
}

Json run_from_subalgebra(const ucpm::Instance& inst,
                         const std::string& subalgebra_name,
                         const std::string& base_name,
                         const CommonOptions& common) {
  const ucpm::StinespringTriple base =
      ucpm::minimal_stinespring(inst.map(base_name), common.tol());
  const ucpm::AbelianSubalgebra B =
      inst.subalgebra(subalgebra_name, base.dil_dim);
  const ucpm::SubalgebraVerdict verdict =
      ucpm::measure_from_subalgebra(B, base, common.tol(), common.opts());

  Json cert;
  cert["verdicts"]["classification"] =
      ucpm::subalgebra_class_name(verdict.classification);
  cert["dims"]["projections"] = B.size();
  cert["residuals"]["max_scalar_distance"] = verdict.max_scalar_distance;
  if (verdict.failure_witness.has_value()) {
    cert["verdicts"]["failing_projection"] = verdict.failure_witness->first;
    cert["witnesses"]["compression"] =
        ucpm::matrix_to_json(verdict.failure_witness->second);
    return cert;
  }
  cert["dims"]["atoms"] = verdict.measure->size();
  cert["verdicts"]["weights"] = verdict.measure->weights;
  cert["dims"]["merged_atoms"] = verdict.merged_atoms;
  Json atoms = Json::array();
  for (const ucpm::CpMap& atom : verdict.measure->atoms)
    atoms.push_back(map_payload(atom));
  cert["witnesses"]["atoms"] = std::move(atoms);
  return cert;
}

Json run_roundtrip(const ucpm::Instance& inst, const std::string& measure_name,
                   const std::string& subalgebra_name,
                   const std::string& base_name,
                   const CommonOptions& common) {
  Json cert;
  if (!measure_name.empty()) {
    const ucpm::DiscreteMeasure mu = inst.measure(measure_name);
    const ucpm::StinespringTriple base =
        ucpm::minimal_stinespring(ucpm::barycenter(mu), common.tol());
    const ucpm::RoundtripMeasureReport report =
        ucpm::roundtrip_measure(mu, base, common.tol(), common.opts());
    cert["verdicts"]["closed"] = report.closed;
    cert["residuals"]["atom_distance"] = report.atom_distance;
    cert["residuals"]["weight_distance"] = report.weight_distance;
    return cert;
  }
  const ucpm::StinespringTriple base =
      ucpm::minimal_stinespring(inst.map(base_name), common.tol());
  const ucpm::AbelianSubalgebra B =
      inst.subalgebra(subalgebra_name, base.dil_dim);
  const ucpm::RoundtripSubalgebraReport report =
      ucpm::roundtrip_subalgebra(B, base, common.tol(), common.opts());
  cert["verdicts"]["classification"] =
      ucpm::subalgebra_class_name(report.classification);
  cert["verdicts"]["equal"] = report.equal;
  cert["verdicts"]["strictly_contained"] = report.strictly_contained;
  cert["dims"]["dim_original"] = report.dim_original;
  cert["dims"]["dim_recovered"] = report.dim_recovered;
  cert["residuals"]["forward_membership"] = report.forward_residual;
  cert["residuals"]["backward_membership"] = report.backward_residual;
  return cert;
}

//=========================================================================
// gallery + random-corpus
//=========================================================================

struct GalleryInstance {
  Json instance;
  ucpm::DiscreteMeasure measure;
};

GalleryInstance build_gallery_case(const std::string& name, ucpm::Index n,
                                   const CommonOptions& common) {
  const ucpm::Tolerance tol = common.tol();
  const ucpm::AlgebraPtr m2 = ucpm::full_matrix_algebra(2);

  ucpm::Matrix e1 = ucpm::Matrix::Zero(2, 2);
  e1(0, 0) = 1.0;
  ucpm::Matrix v_density(2, 2);
  v_density << 0.5, 0.5, 0.5, 0.5;  // vector state at (e1 + e2)/sqrt(2)
  ucpm::Matrix mixed = 0.5 * ucpm::Matrix::Identity(2, 2);

  const ucpm::CpMap pure1 = ucpm::state_instance(m2, e1, tol);
  const ucpm::CpMap pure2 = ucpm::state_instance(m2, v_density, tol);
  const ucpm::CpMap tracial = ucpm::state_instance(m2, mixed, tol);

  ucpm::DiscreteMeasure states;
  std::string first_name = "pure_e1";
  std::string second_name;
  if (name == "two-pure-states" || name == "entrywise" ||
      name == "diagonal") {
    states.atoms = {pure1, pure2};
    second_name = "pure_v";
  } else if (name == "pure-plus-mixed") {
    states.atoms = {pure1, tracial};
    second_name = "mixed";
  } else {
    ucpm::fail(ucpm::errc::bad_parameters, "unknown gallery case " + name);
  }
  states.weights = {0.5, 0.5};

  GalleryInstance out;
  if (name == "entrywise") {
    out.measure = ucpm::example_entrywise(states, n, tol);
  } else if (name == "diagonal") {
    out.measure = ucpm::example_diagonal(states, n, tol);
  } else {
    out.measure = states;
  }

  std::map<std::string, ucpm::CpMap> maps;
  maps.emplace(first_name, out.measure.atoms[0]);
  maps.emplace(second_name, out.measure.atoms[1]);
  std::map<std::string, ucpm::Instance::RawMeasure> measures;
  measures.emplace("mu", ucpm::Instance::RawMeasure{
                             {first_name, second_name}, {0.5, 0.5}});
  out.instance = ucpm::instance_to_json(out.measure.atoms[0].algebra, maps,
                                        measures);
  return out;
}

Json run_gallery(const std::string& case_name, ucpm::Index n,
                 const std::string& out_path, bool check,
                 const CommonOptions& common) {
  const GalleryInstance built = build_gallery_case(case_name, n, common);
  std::ofstream out(out_path);
  ucpm::require(out.good(), ucpm::errc::invalid_instance,
                "cannot write " + out_path);
  out << built.instance.dump(2) << "\n";

  Json cert;
  cert["verdicts"]["case"] = case_name;
  cert["verdicts"]["written"] = out_path;
  cert["dims"]["atoms"] = built.measure.size();
  if (check) {
    const ucpm::MeasureCertificate mc = ucpm::is_orthogonal_measure(
        built.measure, common.tol(), common.opts());
    cert["verdicts"]["orthogonal"] = mc.orthogonal;
    cert["residuals"]["max_idempotency"] = mc.max_idempotency;
    cert["residuals"]["sum_residual"] = mc.sum_residual;
  }
  return cert;
}

Json corpus_instance_certificate(ucpm::Index d, ucpm::Index max_atoms,
                                 std::uint64_t seed, bool perturb,
                                 const CommonOptions& common) {
  const ucpm::Tolerance tol = common.tol();
  const ucpm::MeasureOptions opts = common.opts();

  const ucpm::CpMap state = ucpm::random_state(d, d, seed);
  ucpm::DiscreteMeasure mu = ucpm::random_orthogonal_measure(
      state, max_atoms, seed ^ 0x9e3779b97f4a7c15ULL, tol, opts);

  if (perturb && mu.size() >= 2) {
    // Blend the two heaviest atoms; the barycenter moves and the blend is
    // no longer the Radon-Nikodym projection of anything.
    ucpm::CpMap blended = mu.atoms[0].scaled(0.7);
    blended = blended + mu.atoms[1].scaled(0.3);
    mu.atoms[0] = blended;
    mu = ucpm::canonicalize(mu.atoms, mu.weights, tol, opts.merge_tol)
             .measure;
  }

  const ucpm::MeasureCertificate mc =
      ucpm::is_orthogonal_measure(mu, tol, opts);
  const ucpm::DisintegrationResult dis = ucpm::disintegrate(mu, tol, opts);

  Json cert;
  cert["seed"] = seed;
  cert["dims"]["d"] = d;
  cert["dims"]["atoms"] = mu.size();
  cert["dims"]["dil_dim"] = dis.base.dil_dim;
  cert["dims"]["block_dims"] = dis.block_dims;
  cert["verdicts"]["perturbed"] = perturb;
  cert["verdicts"]["homomorphism_test"] = mc.orthogonal;
  if (mc.subset_verdict.has_value())
    cert["verdicts"]["subset_test"] = *mc.subset_verdict;
  cert["verdicts"]["unitary"] = dis.is_unitary;
  const bool subset_ok =
      !mc.subset_verdict.has_value() || *mc.subset_verdict == mc.orthogonal;
  cert["verdicts"]["consistent"] =
      subset_ok && mc.orthogonal == dis.is_unitary &&
      (dis.is_unitary ==
       (dis.base.dil_dim == dis.total_block_dim()));
  cert["residuals"]["max_idempotency"] = mc.max_idempotency;
  cert["residuals"]["isometry"] = dis.isometry_residual;
  cert["residuals"]["unitarity"] = dis.unitarity_residual;
  return cert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator-algebra certificates: Stinespring dilations, "
               "Radon-Nikodym operators, orthogonal measures"};
  app.require_subcommand(1);

  const std::string command_echo = join_args(argc, argv);

  CommonOptions common;
  std::string file;
  std::string map_name, map2_name, wrt_name, measure_name, subalgebra_name;
  std::string case_name, out_path;
  bool check_flag = false;
  ucpm::Index gallery_n = 2;
  ucpm::Index corpus_count = 10, corpus_d = 2, corpus_max_atoms = 3;

  CLI::App* dilate = app.add_subcommand("dilate", "minimal dilation + audit");
  dilate->add_option("file", file)->required();
  dilate->add_option("--map", map_name)->required();
  add_common(dilate, common);

  CLI::App* check_cp = app.add_subcommand("check-cp", "complete positivity");
  check_cp->add_option("file", file)->required();
  check_cp->add_option("--map", map_name)->required();
  add_common(check_cp, common);

  CLI::App* rn = app.add_subcommand("rn", "Radon-Nikodym operator");
  rn->add_option("file", file)->required();
  rn->add_option("--map", map_name, "dominated map theta")->required();
  rn->add_option("--wrt", wrt_name, "dominating map phi")->required();
  add_common(rn, common);

  CLI::App* check_pair =
      app.add_subcommand("check-pair", "orthogonality of a CP pair");
  check_pair->add_option("file", file)->required();
  check_pair->add_option("--map", map_name)->required();
  check_pair->add_option("--map2", map2_name)->required();
  add_common(check_pair, common);

  CLI::App* check_measure =
      app.add_subcommand("check-measure", "orthogonal-measure certificate");
  check_measure->add_option("file", file)->required();
  check_measure->add_option("--measure", measure_name)->required();
  add_common(check_measure, common);

  CLI::App* u_mu =
      app.add_subcommand("u-mu", "direct-sum disintegration of a measure");
  u_mu->add_option("file", file)->required();
  u_mu->add_option("--measure", measure_name)->required();
  add_common(u_mu, common);

  CLI::App* from_sub = app.add_subcommand(
      "from-subalgebra", "measure induced by commutant projections");
  from_sub->add_option("file", file)->required();
  from_sub->add_option("--subalgebra", subalgebra_name)->required();
  from_sub->add_option("--wrt", wrt_name, "dilated map")->required();
  add_common(from_sub, common);

  CLI::App* roundtrip = app.add_subcommand(
      "roundtrip", "measure <-> subalgebra round trips");
  roundtrip->add_option("file", file)->required();
  roundtrip->add_option("--measure", measure_name);
  roundtrip->add_option("--subalgebra", subalgebra_name);
  roundtrip->add_option("--wrt", wrt_name);
  add_common(roundtrip, common);

  CLI::App* gallery =
      app.add_subcommand("gallery", "emit built-in reference instances");
  gallery->add_option("--case", case_name,
                      "two-pure-states | pure-plus-mixed | entrywise | "
                      "diagonal")
      ->required();
  gallery->add_option("--n", gallery_n, "amplification order");
  gallery->add_option("--out", out_path, "instance file to write")
      ->required();
  gallery->add_flag("--check", check_flag, "run the orthogonality check");
  add_common(gallery, common);

  CLI::App* corpus = app.add_subcommand(
      "random-corpus", "seeded random measures with verdict agreement");
  corpus->add_option("--seed", common.seed)->required();
  corpus->add_option("--count", corpus_count);
  corpus->add_option("--d", corpus_d, "algebra size");
  corpus->add_option("--max-atoms", corpus_max_atoms);
  corpus->add_option("--out", out_path, "write the report here");
  add_common(corpus, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    Json cert = certificate_shell(command_echo);
    Json body;

    auto load = [&]() {
      ucpm::Instance inst = ucpm::load_instance(file);
      merge_instance_tolerances(inst, app.get_subcommands().front(), common);
      return inst;
    };

    if (dilate->parsed()) {
      body = run_dilate(load(), map_name, common);
    } else if (check_cp->parsed()) {
      body = run_check_cp(load(), map_name, common);
    } else if (rn->parsed()) {
      body = run_rn(load(), map_name, wrt_name, common);
    } else if (check_pair->parsed()) {
      body = run_check_pair(load(), map_name, map2_name, common);
    } else if (check_measure->parsed()) {
      body = run_check_measure(load(), measure_name, common);
    } else if (u_mu->parsed()) {
      body = run_u_mu(load(), measure_name, common);
    } else if (from_sub->parsed()) {
      body = run_from_subalgebra(load(), subalgebra_name, wrt_name, common);
    } else if (roundtrip->parsed()) {
      ucpm::require(!measure_name.empty() || !subalgebra_name.empty(),
                    ucpm::errc::bad_parameters,
                    "roundtrip needs --measure or --subalgebra");
      if (!subalgebra_name.empty())
        ucpm::require(!wrt_name.empty(), ucpm::errc::bad_parameters,
                      "subalgebra round trip needs --wrt");
      body = run_roundtrip(load(), measure_name, subalgebra_name, wrt_name,
                           common);
    } else if (gallery->parsed()) {
      body = run_gallery(case_name, gallery_n, out_path, check_flag, common);
    } else if (corpus->parsed()) {
      Json instances = Json::array();
      bool all_consistent = true;
      for (ucpm::Index i = 0; i < corpus_count; ++i) {
        Json one = certificate_shell(command_echo);
        Json inner = corpus_instance_certificate(
            corpus_d, corpus_max_atoms, common.seed + 1000003ULL * i,
            i % 2 == 1, common);
        one.update(inner);
        all_consistent =
            all_consistent && one["verdicts"]["consistent"].get<bool>();
        instances.push_back(std::move(one));
      }
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        ucpm::require(out.good(), ucpm::errc::invalid_instance,
                      "cannot write " + out_path);
        out << instances.dump(2) << "\n";
      }
      Json summary = certificate_shell(command_echo);
      summary["verdicts"]["all_consistent"] = all_consistent;
      summary["dims"]["instances"] = corpus_count;
      if (out_path.empty()) summary["instances"] = std::move(instances);
      emit_certificate(summary, common);
      return 0;
    }

    const auto elapsed = std::chrono::steady_clock::now() - started;
    cert.update(body);
    cert["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)
            .count();
    emit_certificate(cert, common);
    return 0;
  } catch (const ucpm::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    switch (err.category()) {
      case ucpm::error_class::invalid_input: return 2;
      case ucpm::error_class::numerical: return 3;
      case ucpm::error_class::precondition: return 4;
    }
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
