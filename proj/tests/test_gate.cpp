#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levyrd/gate.hpp"
#include "levyrd/noise.hpp"
#include "levyrd/rng.hpp"

using namespace levyrd;

TEST_CASE("main condition: admissible tuple passes with the right margin") {
  auto rep = check_main(0.8, 0.5, 0.2, 0.3, 2.0);
  CHECK(rep.pass);
  // max clause is delta_G + 1/p = 0.7
  CHECK(rep.checks.back().lhs == Catch::Approx(0.7));
  CHECK(rep.checks.back().slack == Catch::Approx(0.1));
}

TEST_CASE("main condition: boundary delta fails the strict inequality") {
  auto rep = check_main(0.7, 0.5, 0.2, 0.3, 2.0);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("main condition: delta_G out of domain is flagged") {
  auto rep = check_main(0.9, 0.5, 0.6, 0.3, 2.0);
  CHECK_FALSE(rep.pass);
  bool domain_fail = false;
  for (const auto& c : rep.checks)
    if (c.domain && !c.pass) domain_fail = true;
  CHECK(domain_fail);
}

TEST_CASE("spectral example: alpha threshold at d=1, p=q=r=2 is alpha > 2") {
  // clause 1 reduces to 1/2 < alpha/4
  auto pass = check_ex01(1.0, 2.0, 2.0, 2.0, 3.0, -0.6);
  CHECK(pass.checks[5].pass);  // clause 1
  auto fail = check_ex01(1.0, 2.0, 2.0, 2.0, 2.0, -0.6);
  CHECK_FALSE(fail.checks[5].pass);
}

TEST_CASE("spectral example: large alpha admits some delta") {
  auto rep = check_ex01(1.0, 2.0, 2.0, 2.0, 12.0, 1.0);
  CHECK(rep.pass);
}

TEST_CASE("spectral example: exact threshold fails strictly") {
  // clause 2 boundary: delta + 2/p == d/(2p)(alpha - 1/2 + 1/p)
  double alpha = 3.0, d = 1, p = 2, q = 2, r = 2;
  double delta = d / (2 * p) * (alpha - 0.5 + 1 / p) - 2 / p;
  auto rep = check_ex01(d, p, q, r, alpha, delta);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("space-time condition: sample verdicts") {
  auto r1 = check_stpn(1.0, 2, 2.0, 2.0, 0.6);
  CHECK(r1.pass);  // 1 < 2 and 0.6 > 0.5
  auto r2 = check_stpn(1.0, 2, 2.0, 2.0, 0.5);
  CHECK_FALSE(r2.pass);  // gamma at the boundary
  // threshold of clause 2 for p = 2, d = 1 is 1/2
  bool found = false;
  for (const auto& c : r1.checks)
    if (c.name.find("gamma") != std::string::npos) {
      CHECK(c.lhs == Catch::Approx(0.5));
      found = true;
    }
  CHECK(found);
}

TEST_CASE("mode-sum condition agrees with its arithmetic threshold") {
  auto pass = check_claim_spectral(1.5, 0.0, 1.0, 2.0, 2.0);
  CHECK(pass.pass);
  auto fail = check_claim_spectral(1.0, 0.0, 1.0, 2.0, 2.0);
  CHECK_FALSE(fail.pass);
}

TEST_CASE("gate verdicts match partial-sum growth on random tuples") {
  RngStream rng(31337);
  int agreements = 0;
  for (int trial = 0; trial < 50; ++trial) {
    double gamma = rng.uniform(0.0, 1.0);
    double p = rng.uniform(1.1, 2.0);
    double r = rng.uniform(2.0, 4.0);
    double thr = 1.0 + p * (gamma + 0.5 - 1.0 / r);
    // keep clear of the boundary where growth is numerically undecidable
    double alpha = thr + (trial % 2 == 0 ? 1.0 : -1.0) * rng.uniform(0.15, 1.0);
    if (alpha <= 0.0) alpha = thr + 0.2;
    auto rep = check_claim_spectral(alpha, gamma, 1.0, p, r);
    // dyadic block growth classifier on the partial sums
    long N = 4096;
    double b1 = spectral_moment_sum(alpha, gamma, p, r, 2 * N).partial_sum -
                spectral_moment_sum(alpha, gamma, p, r, N).partial_sum;
    double b0 = spectral_moment_sum(alpha, gamma, p, r, N).partial_sum -
                spectral_moment_sum(alpha, gamma, p, r, N / 2).partial_sum;
    bool convergent = b1 / b0 < 0.999;
    if (convergent == rep.pass) ++agreements;
  }
  CHECK(agreements == 50);
}

TEST_CASE("raising the noise decay never flips a pass to fail") {
  RngStream rng(8080);
  for (int trial = 0; trial < 100; ++trial) {
    double d = 1.0 + std::floor(rng.uniform(0.0, 3.0));
    double p = rng.uniform(1.1, 2.0);
    double q = p + rng.uniform(0.0, 2.0);
    double r = std::max(2.0, p + rng.uniform(0.0, 2.0));
    double alpha = rng.uniform(0.1, 6.0);
    double delta = rng.uniform(-1.0, 1.0);
    double gamma = rng.uniform(0.0, 1.0);
    double alpha2 = alpha + rng.uniform(0.0, 4.0);
    if (check_ex01(d, p, q, r, alpha, delta).pass)
      CHECK(check_ex01(d, p, q, r, alpha2, delta).pass);
    if (check_claim_spectral(alpha, gamma, d, p, r).pass)
      CHECK(check_claim_spectral(alpha2, gamma, d, p, r).pass);
  }
}

TEST_CASE("gate verdicts track the spectral tail report") {
  auto nu = LevyMeasure::finite_atomic({{1.0, 0.5}, {-1.0, 0.5}});
  // failing tuple with alpha p <= 1: the discarded mass is infinite and the
  // partial tails keep growing with N
  double alpha_bad = 0.4, p = 2.0;
  REQUIRE_FALSE(check_claim_spectral(alpha_bad, 0.0, 1.0, p, 2.0).pass);
  SpectralNoiseSpec bad{alpha_bad, 8, nu};
  CHECK(std::isinf(bad.tail_pmoment(1.2, 8)));
  double t1 = bad.partial_tail_pmoment(1.2, 8, 80);
  double t2 = bad.partial_tail_pmoment(1.2, 8, 800);
  CHECK(t2 > 2.0 * t1);
  // passing tuple: the tail vanishes as the Galerkin dimension grows
  double alpha_good = 1.5;
  REQUIRE(check_claim_spectral(alpha_good, 0.0, 1.0, p, 2.0).pass);
  SpectralNoiseSpec good{alpha_good, 8, nu};
  CHECK(good.tail_pmoment(p, 64) < 0.1 * good.tail_pmoment(p, 8));
  CHECK(good.tail_pmoment(p, 512) < 0.02 * good.tail_pmoment(p, 8));
}

TEST_CASE("reports serialize with slack per clause") {
  auto rep = check_main(0.8, 0.5, 0.2, 0.3, 2.0);
  auto j = rep.to_json();
  CHECK(j["verdict"] == "pass");
  CHECK(j["checks"].size() == rep.checks.size());
  CHECK(j.contains("note"));
}
