#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

namespace levyrd {

// Adaptive Gauss-Kronrod quadrature; rel_tol governs the adaptive refinement.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-9) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 12, rel_tol);
}

// Lower incomplete gamma  gamma(a, x) = \int_0^x t^{a-1} e^{-t} dt.
inline double lower_incomplete_gamma(double a, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::tgamma_lower(a, x);
}

// \int_lo^hi tau^{alpha-1} e^{-rho tau} dtau  for alpha in (0,1], rho >= 0.
inline double power_exp_kernel_integral(double alpha, double rho, double lo,
                                        double hi) {
  if (hi <= lo) return 0.0;
  if (rho <= 0.0) return (std::pow(hi, alpha) - std::pow(lo, alpha)) / alpha;
  double s = std::pow(rho, -alpha);
  return s * (lower_incomplete_gamma(alpha, rho * hi) -
              lower_incomplete_gamma(alpha, rho * lo));
}

}  // namespace levyrd
