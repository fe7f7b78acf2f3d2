#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "levyrd/coefficients.hpp"
#include "levyrd/rng.hpp"

using namespace levyrd;

namespace {

// square operator (grid == modes) makes arbitrary grid functions exactly
// representable, so pointwise drift examples can be checked on the nose
SpectralOperator square_op(int n) {
  return SpectralOperator::dirichlet_laplacian(n, 0.0, n);
}

SpectralField constant_field(const SpectralOperator& op, double value) {
  std::vector<double> grid(op.grid_size(), value);
  return SpectralField(op.project(grid));
}

}  // namespace

TEST_CASE("drift of the zero field is zero") {
  auto op = square_op(8);
  auto f = DriftSpec::poly(3.0, 1.0);
  auto out = drift_apply(op, f, SpectralField(8));
  for (double c : out.c) CHECK(c == 0.0);
}

TEST_CASE("polynomial drift acts pointwise on the grid") {
  auto op = square_op(8);
  auto f = DriftSpec::poly(3.0, 1.0);
  auto u = constant_field(op, 0.5);
  auto out = op.reconstruct(drift_apply(op, f, u).c);
  for (double v : out) CHECK(v == Catch::Approx(0.375).margin(1e-12));
}

TEST_CASE("truncated drift clamps at the cutoff") {
  auto op = square_op(8);
  auto f = DriftSpec::poly(3.0, 0.0, 1);
  auto u = constant_field(op, 5.0);
  auto out = op.reconstruct(drift_apply(op, f, u).c);
  for (double v : out) CHECK(v == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("dissipativity check accepts the cubic drift with K = 1") {
  auto f = DriftSpec::poly(3.0, 0.0);
  auto rep = dissipativity_sample_check(f, 1.0, 100000, 42);
  CHECK(rep.ok);
  CHECK(rep.max_violation <= 0.0);
}

TEST_CASE("dissipativity check reports the trivial slack at v = 0") {
  auto f = DriftSpec::poly(3.0, 0.0);
  // at v = 0 the left side vanishes and the slack is -K(1+|z|^q) < 0
  auto rep = dissipativity_sample_check(f, 1.0, 100, 1);
  CHECK(rep.max_violation < 0.0);
}

TEST_CASE("a deliberately wrong K produces a violation witness") {
  auto f = DriftSpec::poly(3.0, 1.0);  // beta > 0
  auto rep = dissipativity_sample_check(f, 0.0, 100000, 42);
  CHECK_FALSE(rep.ok);
  CHECK(rep.max_violation > 0.0);
  // witness reproduces the violation: f(v+z) sgn(v) > 0
  auto [v, z] = rep.witness;
  double sgn = v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
  CHECK(f.scalar_untruncated(v + z) * sgn > 0.0);
}

TEST_CASE("truncation consistency vanishes inside the clamp") {
  auto op = square_op(8);
  auto f = DriftSpec::poly(3.0, 0.0, 4);
  auto u = constant_field(op, 2.0);  // sup|u| = n/2
  CHECK(truncation_consistency(op, f, u) == 0.0);
}

TEST_CASE("truncation consistency matches the pointwise gap") {
  auto op = square_op(8);
  int n = 3;
  auto f = DriftSpec::poly(3.0, 0.0, n);
  auto u = constant_field(op, n + 1.0);
  double expect = std::pow(n + 1.0, 3.0) - std::pow(n, 3.0);
  CHECK(truncation_consistency(op, f, u) == Catch::Approx(expect).margin(1e-10));
}

TEST_CASE("truncation consistency is nonincreasing in the level") {
  auto op = square_op(8);
  auto u = constant_field(op, 6.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {1, 2, 4, 8}) {
    auto f = DriftSpec::poly(3.0, 0.5, n);
    double v = truncation_consistency(op, f, u);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("truncated drift family is uniformly bounded and converges pointwise") {
  RngStream rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    double u = rng.uniform(-20.0, 20.0);
    double full = DriftSpec::poly(3.0, 1.0).scalar(u);
    double prev_err = std::numeric_limits<double>::infinity();
    for (int n : {1, 2, 4, 8, 16, 32}) {
      auto fn = DriftSpec::poly(3.0, 1.0, n);
      CHECK(std::abs(fn.scalar(u)) <= fn.truncated_bound() + 1e-9);
      double err = std::abs(fn.scalar(u) - full);
      CHECK(err <= prev_err + 1e-12);
      prev_err = err;
    }
    CHECK(DriftSpec::poly(3.0, 1.0, 32).scalar(u) == Catch::Approx(full));
  }
}

TEST_CASE("sign dissipativity of the polynomial part") {
  RngStream rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    double u = rng.uniform(-50.0, 50.0);
    auto f = DriftSpec::poly(3.0, 0.0);
    CHECK(f.scalar(u) * u <= 0.0);
  }
}

TEST_CASE("grid-sum one-sided bound with a(r) = k0 (1 + r^q)") {
  auto op = square_op(16);
  auto f = DriftSpec::poly(3.0, 1.0);
  f.k0 = 2.0;
  RngStream rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    SpectralField u(16);
    for (double& c : u.c) c = rng.uniform(-1.0, 1.0);
    auto grid_u = op.reconstruct(u.c);
    auto fv = drift_grid_values(op, f, grid_u);
    double pair = 0.0, maxu = 0.0;
    for (int m = 0; m < op.grid_size(); ++m) {
      pair += fv[m] * (grid_u[m] > 0 ? 1.0 : (grid_u[m] < 0 ? -1.0 : 0.0));
      maxu = std::max(maxu, std::abs(grid_u[m]));
    }
    CHECK(pair <= f.k0 * op.grid_size() * (1.0 + std::pow(maxu, f.q)) + 1e-9);
  }
}

TEST_CASE("diffusion kinds evaluate pointwise") {
  auto op = square_op(8);
  auto zero = constant_field(op, 0.0);
  auto g1 = diffusion_apply(op, DiffusionSpec::sinsininv(), zero);
  for (double v : g1) CHECK(v == 0.0);

  auto half_pi = constant_field(op, std::numbers::pi / 2.0);
  auto g2 = diffusion_apply(op, DiffusionSpec::sin(), half_pi);
  for (double v : g2) CHECK(v == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("sin diffusion kinds respect the unit bound") {
  RngStream rng(6);
  auto s = DiffusionSpec::sin();
  auto ssi = DiffusionSpec::sinsininv();
  for (int trial = 0; trial < 100000; ++trial) {
    double u = rng.uniform(-1e3, 1e3);
    CHECK(std::abs(s.scalar(u)) <= 1.0);
    CHECK(std::abs(ssi.scalar(u)) <= 1.0);
  }
}
