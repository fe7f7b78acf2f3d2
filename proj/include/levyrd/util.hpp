#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace levyrd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi1(x) = (1 - e^{-x}) / x, continuous at 0.
inline double phi1(double x) {
  if (std::abs(x) < 1e-12) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// phi2(x) = (1 - phi1(x)) / x, continuous at 0 with value 1/2.
inline double phi2(double x) {
  if (std::abs(x) < 1e-6) return 0.5 - x / 6.0 + x * x / 24.0;
  return (1.0 - phi1(x)) / x;
}

// Exact integral of e^{-lambda t} over [a, b].
inline double exp_weight_integral(double lambda, double a, double b) {
  if (lambda == 0.0) return b - a;
  return std::exp(-lambda * a) * (b - a) * phi1(lambda * (b - a));
}

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  double residual = 0.0;  // RMS residual
};

inline LinearFit fit_line(const std::vector<double>& x,
                          const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.residual = std::sqrt(ss_res / n);
  f.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  return f;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean_of: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace levyrd
