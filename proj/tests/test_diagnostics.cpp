#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "levyrd/diagnostics.hpp"

using namespace levyrd;

namespace {

LevyMeasure sym_atoms() {
  return LevyMeasure::finite_atomic({{1.0, 0.5}, {-1.0, 0.5}});
}

PathRecord scalar_path(std::vector<std::pair<double, double>> pts) {
  PathRecord p;
  for (auto& [t, v] : pts) {
    SpectralField u(1);
    u.c[0] = v;
    p.push(t, std::move(u));
  }
  return p;
}

}  // namespace

TEST_CASE("moment estimate of the pure decay matches the analytic integral") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  GridScheme s;
  s.level = 10;
  s.horizon = 1.0;
  s.x0 = SpectralField(1);
  s.x0.c[0] = 1.0;
  McOptions mo;
  mo.e_norm = {SpaceKind::B, 2.0};
  mo.lambda = 1.0;
  auto ens = simulate_mc(op, s, 2, 1, mo);
  double rho = op.rho(1);
  double decay = mo.lambda + mo.p * rho;
  double oracle = (1.0 - std::exp(-decay * s.horizon)) / decay;
  auto rep = moment_estimate(ens, oracle, 0.02);
  CHECK(rep.pass);
  CHECK(rep.value == Catch::Approx(oracle).epsilon(0.02));
}

TEST_CASE("moment estimate is p-homogeneous in the state scale") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  GridScheme s;
  s.level = 6;
  s.horizon = 0.5;
  s.x0 = SpectralField(1);
  s.x0.c[0] = 1.0;
  McOptions mo;
  mo.e_norm = {SpaceKind::B, 2.0};
  auto e1 = simulate_mc(op, s, 2, 1, mo);
  s.x0.c[0] = 2.0;
  auto e2 = simulate_mc(op, s, 2, 1, mo);
  CHECK(moment_estimate(e2).value ==
        Catch::Approx(std::pow(2.0, mo.p) * moment_estimate(e1).value).epsilon(1e-12));
}

TEST_CASE("moment estimate of the zero path is zero") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  GridScheme s;
  s.level = 4;
  s.horizon = 0.5;
  s.x0 = SpectralField(1);
  auto ens = simulate_mc(op, s, 2, 1);
  CHECK(moment_estimate(ens).value == 0.0);
}

TEST_CASE("a-priori bound with v == 0 reduces to the constant-integrand form") {
  double k = 0.8, k0 = 2.0;
  auto a = [&](double r) { return k0 * (1.0 + 0.0 * r); };
  // z below the bound passes
  std::vector<std::pair<double, double>> under, over, zero;
  int steps = 64;
  for (int j = 0; j <= steps; ++j) {
    double t = j / 32.0;
    double cap = k0 * (1.0 - std::exp(-k * t)) / k;
    under.push_back({t, 0.9 * cap});
    over.push_back({t, 1.2 * cap});
    zero.push_back({t, 0.0});
  }
  auto op = SpectralOperator::dirichlet_laplacian(1);
  auto v = scalar_path(zero);
  auto repu = apriori_bound_check(op, scalar_path(under), v, k, a, 0.05,
                                  {SpaceKind::B, 2.0});
  CHECK(repu.pass);
  auto repo = apriori_bound_check(op, scalar_path(over), v, k, a, 0.05,
                                  {SpaceKind::B, 2.0});
  CHECK_FALSE(repo.pass);
  auto repz = apriori_bound_check(op, v, v, k, a, 0.05, {SpaceKind::B, 2.0});
  CHECK(repz.pass);
  CHECK(repz.value <= -0.99);  // maximal slack: lhs = 0
}

TEST_CASE("a-priori check rejects mismatched grids") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  auto z = scalar_path({{0.0, 0.0}, {1.0, 0.0}});
  auto v = scalar_path({{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(
      apriori_bound_check(op, z, v, 1.0, [](double) { return 1.0; }),
      std::invalid_argument);
}

TEST_CASE("decay fit needs at least three levels") {
  auto op = SpectralOperator::dirichlet_laplacian(2);
  GridScheme s;
  s.horizon = 0.5;
  s.x0 = SpectralField(2);
  CHECK_THROWS_AS(cauchy_decay_fit(op, s, {4, 6}, 1), std::invalid_argument);
}

TEST_CASE("noiseless driftless ladder recovers the averaging rate") {
  auto op = SpectralOperator::dirichlet_laplacian(4);
  GridScheme s;
  s.horizon = 1.0;
  s.x0 = SpectralField(4);
  s.x0.c = {1.0, 0.4, -0.2, 0.1};
  auto fit = cauchy_decay_fit(op, s, {5, 6, 7, 8}, 1, 1, 2.0, 1.0,
                              {SpaceKind::B, 2.0});
  // distance is the pure cell-averaging error of e^{-tA} x: first order
  CHECK(fit.theta_hat == Catch::Approx(1.0).margin(0.2));
  CHECK(fit.r_squared > 0.99);
}

TEST_CASE("identical paths are at distance zero") {
  auto op = SpectralOperator::dirichlet_laplacian(2);
  auto p = scalar_path({{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.25}});
  PathRecord q = p;
  CHECK(path_weighted_distance_pth(op, p, q, 2.0, 1.0, {SpaceKind::B, 2.0}) == 0.0);
}

TEST_CASE("sup increment estimate vanishes for zero noise and shrinks with the window") {
  auto op = SpectralOperator::dirichlet_laplacian(2);
  GridScheme s;
  s.level = 6;
  s.horizon = 1.0;
  s.x0 = SpectralField(2);
  auto fitz = sup_increment_check(op, s, 2, 3, {0.5, 0.25, 0.125}, 0.2, 1.0, 0.25);
  for (double e : fitz.estimates) CHECK(e == 0.0);

  s.diffusion = DiffusionSpec::constant(1.0);
  s.noise = ScalarNoiseSpec{LevyMeasure::finite_atomic({{1.0, 4.0}})};
  auto fit = sup_increment_check(op, s, 24, 3, {0.5, 0.125, 0.03125}, 0.2, 1.0, 0.25);
  // monotone per construction (sup over nested windows)
  CHECK(fit.estimates[0] >= fit.estimates[1]);
  CHECK(fit.estimates[1] >= fit.estimates[2]);
  CHECK(fit.pass);
}

TEST_CASE("drift-only scheme rejects the increment check") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  GridScheme s;
  s.drift = DriftSpec::poly(3.0, 0.0);
  s.x0 = SpectralField(1);
  CHECK_THROWS_AS(sup_increment_check(op, s, 1, 1, {0.5}, 0.2, 1.0),
                  std::invalid_argument);
}

TEST_CASE("Skorohod distance of identical paths is zero") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  auto p = scalar_path({{0.0, 0.0}, {0.4, 1.0}, {1.0, 0.5}});
  CHECK(skorohod_distance(op, p, p) == 0.0);
}

TEST_CASE("nearby jumps cost the time shift, not the jump size") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  double eps = 0.05;
  auto x = scalar_path({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}});
  auto y = scalar_path({{0.0, 0.0}, {1.0 + eps, 1.0}, {2.0, 1.0}});
  // uniform distance is the full jump size
  double uniform = 0.0;
  PathRecord d = path_difference(x, y);
  for (const auto& s : d.states) uniform = std::max(uniform, std::abs(s.c[0]));
  CHECK(uniform == Catch::Approx(1.0));
  double j1 = skorohod_distance(op, x, y, 8);
  CHECK(j1 <= eps + 1e-12);
}

TEST_CASE("Skorohod distance never exceeds the uniform distance") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  RngStream rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    auto mk = [&](int jumps) {
      std::vector<std::pair<double, double>> pts{{0.0, rng.uniform(-1.0, 1.0)}};
      double t = 0.0;
      for (int j = 0; j < jumps; ++j) {
        t += rng.uniform(0.1, 0.4);
        pts.push_back({t, rng.uniform(-1.0, 1.0)});
      }
      pts.push_back({2.0, pts.back().second});
      return scalar_path(pts);
    };
    auto x = mk(3), y = mk(4);
    double uniform = 0.0;
    PathRecord d = path_difference(x, y);
    for (const auto& s : d.states) uniform = std::max(uniform, std::abs(s.c[0]));
    CHECK(skorohod_distance(op, x, y, 8) <= uniform + 1e-12);
  }
}

TEST_CASE("Skorohod distance is a pseudo-metric on random step paths") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  RngStream rng(2026);
  auto mk = [&]() {
    std::vector<std::pair<double, double>> pts{{0.0, rng.uniform(-1.0, 1.0)}};
    double t = 0.0;
    for (int j = 0; j < 3; ++j) {
      t += rng.uniform(0.2, 0.5);
      pts.push_back({t, rng.uniform(-1.0, 1.0)});
    }
    pts.push_back({2.0, pts.back().second});
    return scalar_path(pts);
  };
  for (int trial = 0; trial < 6; ++trial) {
    auto x = mk(), y = mk(), z = mk();
    double dxy = skorohod_distance(op, x, y, 8);
    double dyx = skorohod_distance(op, y, x, 8);
    CHECK(dxy == Catch::Approx(dyx).margin(1e-12));
    double dxz = skorohod_distance(op, x, z, 8);
    double dyz = skorohod_distance(op, y, z, 8);
    CHECK(dxz <= dxy + dyz + 1e-12);
  }
}

TEST_CASE("OU oracle endpoints") {
  auto op = SpectralOperator::dirichlet_laplacian(2);
  auto nu = sym_atoms();
  auto at0 = ou_oracle(op, 1, 0.7, 1.0, nu, 0.0);
  CHECK(at0.mean == Catch::Approx(0.7));
  CHECK(at0.variance == 0.0);
  auto late = ou_oracle(op, 1, 0.7, 2.0, nu, 50.0);
  CHECK(late.mean == Catch::Approx(0.0).margin(1e-12));
  CHECK(late.variance == Catch::Approx(4.0 * nu.moment2() / (2.0 * op.rho(1))));
}

TEST_CASE("OU oracle value at rho = pi^2, t = 0.1") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  auto nu = sym_atoms();  // m2 = 1
  double pi2 = std::numbers::pi * std::numbers::pi;
  double expect = (1.0 - std::exp(-0.2 * pi2)) / (2.0 * pi2);
  auto m = ou_oracle(op, 1, 0.0, 1.0, nu, 0.1);
  CHECK(m.variance == Catch::Approx(expect).epsilon(1e-12));
  CHECK(m.variance == Catch::Approx(0.04362).margin(2e-4));
}

TEST_CASE("OU oracle rejects an infinite second moment") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  auto nu = LevyMeasure::tempered_power_law(1.5, 0.0, 1.0, 0.1);
  CHECK_THROWS_AS(ou_oracle(op, 1, 0.0, 1.0, nu, 0.5), NumericError);
}

TEST_CASE("MC error of the OU moment estimate decays like 1/sqrt(replicas)") {
  auto op = SpectralOperator::dirichlet_laplacian(1);
  double sigma = 1.0;
  double T = 1.0;
  GridScheme s;
  s.level = 8;  // keep the step-interpolation quadrature bias small
  s.horizon = T;
  s.x0 = SpectralField(1);
  s.x0.c[0] = 1.0;
  s.diffusion = DiffusionSpec::constant(sigma);
  s.noise = SpectralNoiseSpec{1.0, 1, sym_atoms()};
  McOptions mo;
  mo.e_norm = {SpaceKind::B, 2.0};
  mo.lambda = 1.0;
  mo.checkpoints = {T};

  // The quadrature of the recorded path carries an O(2^{-n}) bias common to
  // every replica count, so the MC rate is measured against a high-replica
  // reference estimate of the same discretized functional; the analytic value
  // of the continuum integral pins the reference itself.
  double rho = op.rho(1);
  auto second_moment = [&](double t) {
    double mean = std::exp(-rho * t);
    double var = sigma * sigma * (-std::expm1(-2.0 * rho * t)) / (2.0 * rho);
    return mean * mean + var;
  };
  double analytic = integrate(
      [&](double t) { return std::exp(-t) * second_moment(t); }, 0.0, T, 1e-10);
  auto ref_ens = simulate_mc(op, s, 64000, derive_seed(49, 0), mo);
  double reference = moment_estimate(ref_ens).value;
  CHECK(reference == Catch::Approx(analytic).epsilon(0.05));

  std::vector<double> logK, logErr;
  std::uint64_t base = 50;
  for (long K : {100L, 400L, 1600L, 6400L}) {
    double err = 0.0;
    const int batches = 6;
    for (int b = 0; b < batches; ++b) {
      auto ens = simulate_mc(op, s, K, derive_seed(base, b * 1000 + K), mo);
      err += std::abs(moment_estimate(ens).value - reference);
    }
    logK.push_back(std::log2(static_cast<double>(K)));
    logErr.push_back(std::log2(err / batches));
  }
  auto fit = fit_line(logK, logErr);
  CHECK(fit.slope == Catch::Approx(-0.5).margin(0.15));
}
