#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "levyrd/rng.hpp"
#include "levyrd/spectral.hpp"

namespace levyrd {

// Polynomial dissipative drift f(u) = -|u|^q sgn(u) + beta u, optionally
// clamped at a truncation level n (f_n freezes f outside [-n, n]).  The
// dissipativity constants (k, k0) certify the one-sided bound
// f(v + z) sgn(v) <= k0 (1 + |z|^q) - k |v| used by the a-priori diagnostic.
struct DriftSpec {
  enum class Kind { None, Poly };

  Kind kind = Kind::None;
  double q = 3.0;
  double beta = 0.0;
  std::optional<int> truncation;
  double k = 0.0;
  double k0 = 1.0;

  static DriftSpec none() { return {}; }
  static DriftSpec poly(double q_, double beta_,
                        std::optional<int> trunc = std::nullopt) {
    if (q_ < 1.0) throw std::invalid_argument("DriftSpec: q >= 1 required");
    DriftSpec d;
    d.kind = Kind::Poly;
    d.q = q_;
    d.beta = beta_;
    d.truncation = trunc;
    return d;
  }

  double scalar_untruncated(double u) const {
    if (kind == Kind::None) return 0.0;
    return -std::pow(std::abs(u), q) * (u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0)) +
           beta * u;
  }

  double scalar(double u) const {
    if (kind == Kind::None) return 0.0;
    if (truncation) {
      double n = static_cast<double>(*truncation);
      u = std::clamp(u, -n, n);
    }
    return scalar_untruncated(u);
  }

  // R_F^n = sup |f_n| = max(|f(n)|, |f(-n)|) together with the interior hump.
  double truncated_bound() const {
    if (kind == Kind::None) return 0.0;
    if (!truncation) throw std::invalid_argument("truncated_bound: no truncation set");
    double n = static_cast<double>(*truncation);
    double b = std::max(std::abs(scalar_untruncated(n)),
                        std::abs(scalar_untruncated(-n)));
    if (beta > 0.0 && q > 1.0) {
      double r = std::pow(beta / q, 1.0 / (q - 1.0));  // interior extremum of |f|
      if (r < n) b = std::max(b, std::abs(scalar_untruncated(r)));
    }
    return b;
  }

  double dissipativity_a(double r) const { return k0 * (1.0 + std::pow(r, q)); }
};

// Nemytskii action on the grid, projected back to coefficients.
inline SpectralField drift_apply(const SpectralOperator& op, const DriftSpec& f,
                                 const SpectralField& u) {
  if (f.kind == DriftSpec::Kind::None) return SpectralField(op.modes());
  auto v = op.reconstruct(u.c);
  for (double& x : v) x = f.scalar(x);
  return SpectralField(op.project(v));
}

inline std::vector<double> drift_grid_values(const SpectralOperator& op,
                                             const DriftSpec& f,
                                             std::span<const double> grid_u) {
  std::vector<double> v(grid_u.begin(), grid_u.end());
  for (double& x : v) x = f.scalar(x);
  return v;
}

struct DissipativityReport {
  bool ok = true;
  double max_violation = -std::numeric_limits<double>::infinity();  // max of lhs - rhs
  std::pair<double, double> witness{0.0, 0.0};                      // (v, z)
  long samples = 0;
};

// Samples (v, z) pairs over a wide range and checks the paper-style bound
// f(v + z) sgn(v) <= K (1 + |z|^q).  A positive max slack is a violation and
// the witness pair is reported.
inline DissipativityReport dissipativity_sample_check(const DriftSpec& f, double K,
                                                      long trials,
                                                      std::uint64_t seed,
                                                      double range = 1e3) {
  DissipativityReport rep;
  RngStream rng(seed);
  auto probe = [&](double v, double z) {
    double sgn = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    double lhs = f.scalar_untruncated(v + z) * sgn;
    double rhs = K * (1.0 + std::pow(std::abs(z), f.q));
    double slack = lhs - rhs;
    if (slack > rep.max_violation) {
      rep.max_violation = slack;
      rep.witness = {v, z};
    }
    ++rep.samples;
  };
  // coarse grid pass, then random refinement
  const int G = 64;
  for (int i = 0; i <= G; ++i)
    for (int j = 0; j <= G; ++j)
      probe(-range + 2.0 * range * i / G, -range + 2.0 * range * j / G);
  for (long s = rep.samples; s < trials; ++s) {
    double scale = std::pow(10.0, rng.uniform(-3.0, std::log10(range)));
    probe(rng.uniform(-1.0, 1.0) * scale, rng.uniform(-1.0, 1.0) * scale);
  }
  rep.ok = rep.max_violation <= 0.0;
  return rep;
}

// sup-grid |F_n(u) - F(u)|; zero whenever sup|u| <= n.
inline double truncation_consistency(const SpectralOperator& op,
                                     const DriftSpec& f, const SpectralField& u) {
  if (!f.truncation)
    throw std::invalid_argument("truncation_consistency: truncation level not set");
  auto v = op.reconstruct(u.c);
  double worst = 0.0;
  for (double x : v)
    worst = std::max(worst, std::abs(f.scalar(x) - f.scalar_untruncated(x)));
  return worst;
}

// Bounded diffusion coefficient g.  The sin-sin-inverse kind evaluates the
// indicator first: g(0) = 0 exactly.
struct DiffusionSpec {
  enum class Kind { None, Sin, SinSinInv, Const, Custom };

  Kind kind = Kind::None;
  double value = 1.0;                                  // Const
  std::vector<std::pair<double, double>> table;        // Custom: (u, g(u)), sorted

  static DiffusionSpec none() { return {}; }
  static DiffusionSpec sin() { return {Kind::Sin, 1.0, {}}; }
  static DiffusionSpec sinsininv() { return {Kind::SinSinInv, 1.0, {}}; }
  static DiffusionSpec constant(double v) { return {Kind::Const, v, {}}; }
  static DiffusionSpec custom(std::vector<std::pair<double, double>> tab) {
    if (tab.size() < 2) throw std::invalid_argument("DiffusionSpec: table too small");
    return {Kind::Custom, 1.0, std::move(tab)};
  }

  double scalar(double u) const {
    switch (kind) {
      case Kind::None:
        return 0.0;
      case Kind::Sin:
        return std::sin(u);
      case Kind::SinSinInv:
        if (u == 0.0) return 0.0;  // 1_{R \ {0}} branch, not a limit
        return std::sin(u) * std::sin(1.0 / u);
      case Kind::Const:
        return value;
      case Kind::Custom: {
        if (u <= table.front().first) return table.front().second;
        if (u >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(), u,
                                   [](double x, const auto& e) { return x < e.first; });
        auto [u1, g1] = *it;
        auto [u0, g0] = *(it - 1);
        return g0 + (g1 - g0) * (u - u0) / (u1 - u0);
      }
    }
    return 0.0;
  }

  double bound() const {
    switch (kind) {
      case Kind::None:
        return 0.0;
      case Kind::Sin:
      case Kind::SinSinInv:
        return 1.0;
      case Kind::Const:
        return std::abs(value);
      case Kind::Custom: {
        double b = 0.0;
        for (auto& [u, g] : table) b = std::max(b, std::abs(g));
        return b;
      }
    }
    return 0.0;
  }
};

// Pointwise g(u(xi_m)) on the quadrature grid.
inline std::vector<double> diffusion_apply(const SpectralOperator& op,
                                           const DiffusionSpec& g,
                                           const SpectralField& u) {
  auto v = op.reconstruct(u.c);
  for (double& x : v) x = g.scalar(x);
  return v;
}

}  // namespace levyrd
