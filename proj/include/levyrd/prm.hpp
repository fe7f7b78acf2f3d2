#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "levyrd/levy_measure.hpp"
#include "levyrd/point_measure.hpp"
#include "levyrd/quadrature.hpp"
#include "levyrd/rng.hpp"

namespace levyrd {

// Compensator of a time homogeneous PRM: product of the intensity with
// Lebesgue measure in time, gamma(A x I) = nu(A) |I|.
struct CompensatorSpec {
  LevyMeasure measure;

  double of(double mark_set_mass, double t0, double t1) const {
    return mark_set_mass * (t1 - t0);
  }
  template <class Pred>
  double of_window(Pred&& mark_pred, double t0, double t1) const {
    double nuA =
        measure.integral([&](double z) { return mark_pred(z) ? 1.0 : 0.0; });
    return nuA * (t1 - t0);
  }
};

// Draws a time homogeneous PRM realization on (0, T]: interarrival gaps are
// exponential with the truncated total mass as rate, marks are i.i.d.
// nu/nu(R).  Gap/mark draws alternate, so the realization is a pure function
// of (nu, T, seed).  Time collisions (probability zero) are resampled.
inline PointMeasure<ScalarMark> sample_prm(const LevyMeasure& nu, double T,
                                           std::uint64_t seed) {
  if (!(T > 0.0)) throw std::invalid_argument("sample_prm: horizon must be positive");
  double m = nu.total_mass();
  if (!std::isfinite(m)) throw NumericError("sample_prm: truncated mass must be finite");
  PointMeasure<ScalarMark> pm;
  pm.horizon = T;
  pm.seed = seed;
  pm.measure_descriptor = nu.descriptor();
  if (m <= 0.0) return pm;
  RngStream rng(seed);
  double t = 0.0;
  while (true) {
    double gap = rng.exponential(m);
    while (gap <= 0.0) gap = rng.exponential(m);  // reject ties
    t += gap;
    if (t > T) break;
    pm.atoms.push_back({t, ScalarMark{nu.sample(rng)}});
  }
  return pm;
}

// sum_{atoms in (a,b]} f(t_k, z_k)  -  \int_a^b \int_Z f(s,z) nu(dz) ds.
// The compensator term is evaluated by adaptive quadrature (the mark integral
// is analytic for atomic measures).
template <class F>
double compensated_integral(const PointMeasure<ScalarMark>& pm,
                            const LevyMeasure& nu, F&& f,
                            std::pair<double, double> window) {
  auto [a, b] = window;
  if (!(a <= b)) throw std::invalid_argument("compensated_integral: need a <= b");
  double jump_sum = 0.0;
  for (const auto& [t, mark] : pm.atoms)
    if (t > a && t <= b) jump_sum += f(t, mark.z);
  double compensator = integrate(
      [&](double s) { return nu.integral([&](double z) { return f(s, z); }); }, a,
      b, 1e-9);
  if (!std::isfinite(compensator))
    throw NumericError("compensated_integral: compensator term not finite");
  return jump_sum - compensator;
}

// Scalar Levy path L(t) = sum_{t_k <= t} z_k - t \int z nu(dz), evaluated at
// the grid times merged with the jump times; cadlag, L(0) = 0.
inline std::vector<std::pair<double, double>> levy_path_from_prm(
    const PointMeasure<ScalarMark>& pm, const LevyMeasure& nu,
    const std::vector<double>& grid) {
  double drift = nu.moment1();
  std::vector<double> times;
  times.reserve(grid.size() + pm.atoms.size() + 1);
  times.push_back(0.0);
  for (double t : grid)
    if (t > 0.0) times.push_back(t);
  for (const auto& [t, m] : pm.atoms) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<std::pair<double, double>> path;
  path.reserve(times.size());
  double jumps = 0.0;
  std::size_t k = 0;
  for (double t : times) {
    while (k < pm.atoms.size() && pm.atoms[k].first <= t)
      jumps += pm.atoms[k++].second.z;
    path.push_back({t, jumps - drift * t});
  }
  return path;
}

}  // namespace levyrd
