// End-to-end checks of the ucpm binary: exit codes, certificate content,
// determinism, and certificate self-containedness. The binary path and the
// fixture directory arrive through UCPM_CLI and UCPM_DATA.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "ucpm/instance_io.hpp"

using ucpm::Json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string cli_path() {
  const char* path = std::getenv("UCPM_CLI");
  REQUIRE_MESSAGE(path != nullptr, "UCPM_CLI must point at the binary");
  return path;
}

std::string data_path(const std::string& name) {
  const char* dir = std::getenv("UCPM_DATA");
  REQUIRE_MESSAGE(dir != nullptr, "UCPM_DATA must point at the fixtures");
  return std::string(dir) + "/" + name;
}

RunResult run(const std::string& args) {
  const std::string command = cli_path() + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer;
  while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr)
    result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

Json parse_output(const RunResult& result) {
  return Json::parse(result.output);
}

}  // namespace

TEST_CASE("check-measure on the orthogonal fixture exits 0 with verdict") {
  const RunResult result = run("check-measure " + data_path("m2_states.json") +
                               " --measure mu_ortho --output json");
  CHECK(result.exit_code == 0);
  const Json cert = parse_output(result);
  CHECK(cert.at("verdicts").at("orthogonal").get<bool>());
  CHECK(cert.at("verdicts").at("subset_test").get<bool>());
  CHECK(cert.at("verdicts").at("tests_agree").get<bool>());
  CHECK(cert.at("residuals").at("max_idempotency").get<double>() <= 1e-7);
}

TEST_CASE("check-measure on the mixed fixture reports the 2/9 defect") {
  const RunResult result = run("check-measure " + data_path("m2_states.json") +
                               " --measure mu_mixed --output json");
  CHECK(result.exit_code == 0);
  const Json cert = parse_output(result);
  CHECK_FALSE(cert.at("verdicts").at("orthogonal").get<bool>());
  CHECK(cert.at("residuals").at("max_idempotency").get<double>() ==
        doctest::Approx(2.0 / 9.0).epsilon(1e-6));
}

TEST_CASE("dilate on the transpose map exits 4 (precondition)") {
  const RunResult result = run("dilate " + data_path("m2_states.json") +
                               " --map transpose --output json");
  CHECK(result.exit_code == 4);
}

TEST_CASE("weights that do not sum to one exit 2 (malformed input)") {
  const RunResult result = run("check-measure " +
                               data_path("bad_weights.json") +
                               " --measure bad --output json");
  CHECK(result.exit_code == 2);
}

TEST_CASE("a missing name exits 2") {
  const RunResult result = run("dilate " + data_path("m2_states.json") +
                               " --map ghost --output json");
  CHECK(result.exit_code == 2);
}

TEST_CASE("dilate reports dimensions and the Choi cross-check") {
  const RunResult result = run("dilate " + data_path("m2_states.json") +
                               " --map phi --output json");
  CHECK(result.exit_code == 0);
  const Json cert = parse_output(result);
  CHECK(cert.at("dims").at("dil_dim").get<int>() == 4);
  CHECK(cert.at("verdicts").at("dilation_valid").get<bool>());
  CHECK(cert.at("verdicts").at("gram_choi_consistent").get<bool>());
}

TEST_CASE("rn emits an operator with small residuals") {
  const RunResult result = run("rn " + data_path("m2_states.json") +
                               " --map half_e1 --wrt phi --output json");
  CHECK(result.exit_code == 0);
  const Json cert = parse_output(result);
  CHECK(cert.at("verdicts").at("within_tolerance").get<bool>());
  CHECK(cert.at("residuals").at("reproduction").get<double>() <= 1e-7);
  const ucpm::Matrix t =
      ucpm::matrix_from_json(cert.at("witnesses").at("T"));
  CHECK(t.rows() == 4);
}

TEST_CASE("u-mu separates the unitary and non-unitary fixtures") {
  const RunResult ortho = run("u-mu " + data_path("m2_states.json") +
                              " --measure mu_ortho --output json");
  CHECK(ortho.exit_code == 0);
  const Json a = parse_output(ortho);
  CHECK(a.at("verdicts").at("unitary").get<bool>());
  CHECK(a.at("verdicts").at("disintegration_valid").get<bool>());
  CHECK(a.at("dims").at("block_dims") == Json::array({2, 2}));

  const RunResult mixed = run("u-mu " + data_path("m2_states.json") +
                              " --measure mu_mixed --output json");
  CHECK(mixed.exit_code == 0);
  const Json b = parse_output(mixed);
  CHECK_FALSE(b.at("verdicts").at("unitary").get<bool>());
  CHECK(b.at("dims").at("block_dims") == Json::array({2, 4}));
  CHECK(b.at("residuals").at("isometry").get<double>() <= 1e-6);
}

TEST_CASE("from-subalgebra with the trivial family recovers a point mass") {
  const RunResult result =
      run("from-subalgebra " + data_path("m2_states.json") +
          " --subalgebra trivial --wrt phi --output json");
  CHECK(result.exit_code == 0);
  const Json cert = parse_output(result);
  CHECK(cert.at("verdicts").at("classification").get<std::string>() ==
        "Orthogonal");
  CHECK(cert.at("dims").at("atoms").get<int>() == 1);
}

TEST_CASE("roundtrip subcommand closes on both directions") {
  const RunResult measure = run("roundtrip " + data_path("m2_states.json") +
                                " --measure mu_ortho --output json");
  CHECK(measure.exit_code == 0);
  CHECK(parse_output(measure).at("verdicts").at("closed").get<bool>());

  const RunResult sub = run("roundtrip " + data_path("m2_states.json") +
                            " --subalgebra trivial --wrt phi --output json");
  CHECK(sub.exit_code == 0);
  CHECK(parse_output(sub).at("verdicts").at("equal").get<bool>());
}

TEST_CASE("certificates are deterministic across runs") {
  const std::string command = "check-measure " + data_path("m2_states.json") +
                              " --measure mu_ortho --output json";
  const Json first = parse_output(run(command));
  const Json second = parse_output(run(command));
  CHECK(first.at("verdicts") == second.at("verdicts"));
  CHECK(first.at("residuals").dump() == second.at("residuals").dump());
  CHECK(first.at("witnesses").dump() == second.at("witnesses").dump());
}

TEST_CASE("pair certificates re-verify from their own witnesses") {
  const RunResult result = run("check-pair " + data_path("m2_states.json") +
                               " --map half_e1 --map2 half_v --output json");
  CHECK(result.exit_code == 0);
  const Json cert = parse_output(result);
  REQUIRE(cert.at("verdicts").at("orthogonal").get<bool>());
  const ucpm::Matrix p =
      ucpm::matrix_from_json(cert.at("witnesses").at("P"));

  // Idempotency straight from the witness.
  CHECK(ucpm::op_norm(ucpm::Matrix(p * p - p)) <= 1e-6);

  // Reproduction identity against a deterministic re-dilation.
  const ucpm::Instance inst =
      ucpm::load_instance(data_path("m2_states.json"));
  const ucpm::CpMap sum = inst.map("half_e1") + inst.map("half_v");
  const ucpm::StinespringTriple base = ucpm::minimal_stinespring(sum);
  double residual = 0.0;
  for (std::size_t i = 0; i < base.rho_images.size(); ++i)
    residual = std::max(
        residual,
        ucpm::op_norm(ucpm::Matrix(
            base.V.adjoint() * p * base.rho_images[i] * base.V -
            inst.map("half_e1").images[i])));
  CHECK(residual <= 1e-6);
}

TEST_CASE("gallery emits instances that check out") {
  const std::string out = "gallery_two_pure.json";  // test working dir
  const RunResult result = run("gallery --case two-pure-states --out " + out +
                               " --check --output json");
  CHECK(result.exit_code == 0);
  const Json cert = parse_output(result);
  CHECK(cert.at("verdicts").at("orthogonal").get<bool>());

  const RunResult reread =
      run("check-measure " + out + " --measure mu --output json");
  CHECK(reread.exit_code == 0);
  CHECK(parse_output(reread).at("verdicts").at("orthogonal").get<bool>());
}

TEST_CASE("random-corpus agrees across all three verdicts") {
  const RunResult result =
      run("random-corpus --seed 20250810 --count 6 --output json");
  CHECK(result.exit_code == 0);
  const Json report = parse_output(result);
  CHECK(report.at("verdicts").at("all_consistent").get<bool>());
  CHECK(report.at("instances").size() == 6);
}

TEST_CASE("random-corpus refuses to run without a seed") {
  const RunResult result = run("random-corpus --count 2 --output json");
  CHECK(result.exit_code != 0);
}
