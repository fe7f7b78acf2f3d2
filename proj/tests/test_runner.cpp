#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "levyrd/runner.hpp"

using namespace levyrd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config(const std::string& out) {
  std::string toml = R"(
[operator]
modes = 4
[noise]
kind = "scalar"
[noise.measure]
kind = "finite_atomic"
atoms = [[1.0, 0.5], [-1.0, 0.5]]
[diffusion]
kind = "sin"
[drift]
kind = "poly"
q = 3.0
beta = 0.5
k = 1.0
k0 = 2.0
[scheme]
level = 5
horizon = 0.5
[mc]
replicas = 3
base_seed = 9
)";
  auto cfg = RunConfig::from_toml(toml);
  cfg.out_directory = out;
  return cfg;
}

RunConfig gate_config(const std::string& theorem, double alpha) {
  RunConfig cfg;
  cfg.gate.theorem = theorem;
  cfg.gate.d = 1.0;
  cfg.gate.p = 2.0;
  cfg.gate.q = 2.0;
  cfg.gate.r = 2.0;
  cfg.gate.alpha = alpha;
  cfg.gate.delta = -0.5;
  return cfg;
}

}  // namespace

TEST_CASE("simulate writes a manifest and a summary") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_sim";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  std::ostringstream log;
  int code = run_simulate(cfg, {}, log);
  CHECK(code == kExitOk);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "resolved.toml"));
  CHECK(fs::exists(dir / "ensemble_summary.json"));
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["schema_version"] == kArtifactSchemaVersion);
  CHECK(manifest["artifacts"].size() >= 2);
}

TEST_CASE("identical runs produce byte-identical manifests") {
  fs::path d1 = fs::temp_directory_path() / "levyrd_test_det1";
  fs::path d2 = fs::temp_directory_path() / "levyrd_test_det2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  std::ostringstream log;
  run_simulate(small_config(d1.string()), {}, log);
  run_simulate(small_config(d2.string()), {}, log);
  auto m1 = nlohmann::json::parse(slurp(d1 / "manifest.json"));
  auto m2 = nlohmann::json::parse(slurp(d2 / "manifest.json"));
  CHECK(m1["manifest_hash"] == m2["manifest_hash"]);
  CHECK(m1["artifacts"] == m2["artifacts"]);
}

TEST_CASE("different seeds change the manifest") {
  fs::path d1 = fs::temp_directory_path() / "levyrd_test_seed1";
  fs::path d2 = fs::temp_directory_path() / "levyrd_test_seed2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  std::ostringstream log;
  run_simulate(small_config(d1.string()), {}, log);
  RunOverrides ov;
  ov.seed = 1234;
  run_simulate(small_config(d2.string()), ov, log);
  auto m1 = nlohmann::json::parse(slurp(d1 / "manifest.json"));
  auto m2 = nlohmann::json::parse(slurp(d2 / "manifest.json"));
  CHECK(m1["manifest_hash"] != m2["manifest_hash"]);
}

TEST_CASE("gate subcommand exit codes follow the verdict") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_gate";
  fs::remove_all(dir);
  std::ostringstream log;
  auto pass_cfg = gate_config("ex01", 3.0);
  pass_cfg.out_directory = (dir / "pass").string();
  CHECK(run_gate(pass_cfg, {}, log) == kExitOk);
  auto fail_cfg = gate_config("ex01", 1.0);
  fail_cfg.out_directory = (dir / "fail").string();
  CHECK(run_gate(fail_cfg, {}, log) == kExitGateFailure);
  CHECK(fs::exists(dir / "fail" / "gate_report.json"));
}

TEST_CASE("gate-required simulation aborts on failure with code 2") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_gateabort";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  cfg.gate = gate_config("ex01", 1.0).gate;  // failing tuple
  RunOverrides ov;
  ov.gate_required = true;
  std::ostringstream log;
  CHECK(run_simulate(cfg, ov, log) == kExitGateFailure);
  // no simulation artifacts beyond the gate report and resolved config
  CHECK(!fs::exists(dir / "ensemble_summary.json"));
}

TEST_CASE("noise-sample emits the point-measure CSV") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_noise";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  std::ostringstream log;
  CHECK(run_noise_sample(cfg, {}, log) == kExitOk);
  auto csv = slurp(dir / "noise.csv");
  CHECK(csv.find("# levyrd point-measure v1") != std::string::npos);
  CHECK(csv.find("t,z") != std::string::npos);
}

TEST_CASE("ladder requires at least three levels") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_ladder_err";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  std::ostringstream log;
  CHECK_THROWS_AS(run_ladder(cfg, {}, {4, 6}, log), ConfigError);
}

TEST_CASE("ladder fits a decay rate") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_ladder";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  cfg.replicas = 2;
  std::ostringstream log;
  CHECK(run_ladder(cfg, {}, {4, 5, 6}, log) == kExitOk);
  auto rate = nlohmann::json::parse(slurp(dir / "rate_report.json"));
  CHECK(rate.contains("theta_hat"));
  CHECK(rate["levels"].size() == 3);
}

TEST_CASE("saving paths emits per-replica CSV plus the operator sidecar") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_paths";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  cfg.replicas = 2;
  cfg.save_paths = true;
  std::ostringstream log;
  CHECK(run_simulate(cfg, {}, log) == kExitOk);
  CHECK(fs::exists(dir / "replica_0.csv"));
  CHECK(fs::exists(dir / "replica_1.csv"));
  auto meta = nlohmann::json::parse(slurp(dir / "paths_meta.json"));
  CHECK(meta["operator"].get<std::string>().find("dirichlet") != std::string::npos);
  auto csv = slurp(dir / "replica_0.csv");
  CHECK(csv.rfind("t,c_1,c_2,c_3,c_4", 0) == 0);
}

TEST_CASE("a blown-up replica yields the partial-failure exit code") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_blowup";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  cfg.drift_beta = 0.0;
  cfg.level = 3;
  cfg.initial_amplitude = 1e120;  // cubic drift overflows immediately
  cfg.lambda = 1.0;
  std::ostringstream log;
  CHECK(run_simulate(cfg, {}, log) == kExitPartialMc);
  auto summary = nlohmann::json::parse(slurp(dir / "ensemble_summary.json"));
  CHECK(summary["replicas_failed"].get<long>() == cfg.replicas);
  CHECK(summary["replicas_completed"].get<long>() == 0);
}

TEST_CASE("diagnose emits report battery artifacts") {
  fs::path dir = fs::temp_directory_path() / "levyrd_test_diag";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  std::ostringstream log;
  CHECK(run_diagnose(cfg, {}, log) == kExitOk);
  CHECK(fs::exists(dir / "diagnostics.json"));
  auto csv = slurp(dir / "diagnostics_summary.csv");
  CHECK(csv.find("name,value,bound,verdict") != std::string::npos);
  CHECK(csv.find("moment_estimate") != std::string::npos);
  CHECK(csv.find("apriori_bound") != std::string::npos);
}
