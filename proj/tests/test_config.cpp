#include <catch2/catch_amalgamated.hpp>

#include "levyrd/config.hpp"

using namespace levyrd;

namespace {

const char* kSample = R"(
schema = 1

[operator]
modes = 8
law = "dirichlet"

[noise]
kind = "spectral"
alpha = 3.0

[noise.measure]
kind = "finite_atomic"
atoms = [[1.0, 0.5], [-1.0, 0.5]]

[drift]
kind = "poly"
q = 3.0
beta = 1.0
k = 1.0
k0 = 3.5

[diffusion]
kind = "sin"

[scheme]
level = 6
horizon = 1.0

[mc]
replicas = 4
base_seed = 11

[outputs]
directory = "out/test"
)";

}  // namespace

TEST_CASE("full config parses with nested tables and arrays") {
  auto cfg = RunConfig::from_toml(kSample);
  CHECK(cfg.modes == 8);
  CHECK(cfg.noise_kind == "spectral");
  CHECK(cfg.noise_alpha == 3.0);
  REQUIRE(cfg.measure.atoms.size() == 2);
  CHECK(cfg.measure.atoms[1].first == -1.0);
  CHECK(cfg.drift_kind == "poly");
  CHECK(cfg.drift_beta == 1.0);
  CHECK(cfg.replicas == 4);
  CHECK(cfg.out_directory == "out/test");
  // default lambda: 1 + beta + max(0, -k) with k = 1
  CHECK(cfg.effective_lambda() == Catch::Approx(2.0));
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_toml("a = 1\nb = ???\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("missing '=' is reported") {
  CHECK_THROWS_AS(parse_toml("[a]\nkey value\n"), ConfigError);
}

TEST_CASE("zero replicas is a validation error") {
  std::string text = std::string(kSample);
  text.replace(text.find("replicas = 4"), 12, "replicas = 0");
  CHECK_THROWS_AS(RunConfig::from_toml(text), ConfigError);
}

TEST_CASE("unknown kinds are rejected") {
  std::string text = std::string(kSample);
  text.replace(text.find("kind = \"poly\""), 13, "kind = \"cubic\"");
  CHECK_THROWS_AS(RunConfig::from_toml(text), ConfigError);
}

TEST_CASE("noise without a diffusion coefficient is rejected") {
  std::string text = std::string(kSample);
  text.replace(text.find("kind = \"sin\""), 12, "kind = \"none\"");
  CHECK_THROWS_AS(RunConfig::from_toml(text), ConfigError);
}

TEST_CASE("resolved config reparses to the same resolved form") {
  auto cfg = RunConfig::from_toml(kSample);
  auto resolved = cfg.resolved_toml();
  auto cfg2 = RunConfig::from_toml(resolved);
  CHECK(cfg2.resolved_toml() == resolved);
}

TEST_CASE("builders produce consistent model objects") {
  auto cfg = RunConfig::from_toml(kSample);
  auto op = cfg.make_operator();
  CHECK(op.modes() == 8);
  auto scheme = cfg.make_scheme(op);
  CHECK(scheme.level == 6);
  CHECK(std::holds_alternative<SpectralNoiseSpec>(scheme.noise));
  CHECK(scheme.drift.kind == DriftSpec::Kind::Poly);
  CHECK(scheme.x0.modes() == 8);
  CHECK(scheme.x0.c[0] == 1.0);  // default single-mode initial state
}
