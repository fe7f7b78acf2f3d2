#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyrd/util.hpp"

namespace levyrd {

// Diagonal spectral model of the dissipative elliptic operator A: eigenpairs
// (rho_i, e_i) with rho_i > 0 nondecreasing, plus a uniform quadrature grid
// on which eigenfunctions are evaluated.  The semigroup e^{-tA} and the
// fractional powers A^gamma act diagonally on coefficients.
//
// The concrete instantiation is the Dirichlet Laplacian on (0,1):
// rho_i = (i pi)^2, e_i(xi) = sqrt(2) sin(i pi xi).  The grid xi_m = m/(M+1)
// makes the discrete sine basis exactly orthonormal for modes i <= M.
class SpectralOperator {
 public:
  static SpectralOperator dirichlet_laplacian(int modes, double shift = 0.0,
                                              int grid_points = 0) {
    if (modes < 1) throw std::invalid_argument("SpectralOperator: modes >= 1 required");
    if (shift < 0.0) throw std::invalid_argument("SpectralOperator: shift >= 0 required");
    SpectralOperator op;
    op.modes_ = modes;
    op.shift_ = shift;
    op.rho_.resize(modes);
    for (int i = 0; i < modes; ++i) {
      double ip = (i + 1) * std::numbers::pi;
      op.rho_[i] = ip * ip + shift;
    }
    int M = grid_points > 0 ? grid_points : std::max(4 * modes, 64);
    if (M < modes)
      throw std::invalid_argument("SpectralOperator: grid must resolve all modes");
    op.grid_.resize(M);
    op.weight_ = 1.0 / (M + 1);
    op.basis_.resize(static_cast<std::size_t>(modes) * M);
    for (int m = 0; m < M; ++m) {
      op.grid_[m] = static_cast<double>(m + 1) / (M + 1);
      for (int i = 0; i < modes; ++i)
        op.basis_[static_cast<std::size_t>(i) * M + m] =
            std::sqrt(2.0) * std::sin((i + 1) * std::numbers::pi * op.grid_[m]);
    }
    return op;
  }

  int modes() const { return modes_; }
  double shift() const { return shift_; }
  double rho(int mode) const { return rho_.at(mode - 1); }  // 1-based
  const std::vector<double>& eigenvalues() const { return rho_; }

  int grid_size() const { return static_cast<int>(grid_.size()); }
  double node(int m) const { return grid_[m]; }
  const std::vector<double>& nodes() const { return grid_; }
  double quad_weight() const { return weight_; }

  double eigenfunction(int mode, double xi) const {
    return std::sqrt(2.0) * std::sin(mode * std::numbers::pi * xi);
  }
  double basis(int mode, int m) const {
    return basis_[static_cast<std::size_t>(mode - 1) * grid_.size() + m];
  }

  // c_i = sum_m w v(xi_m) e_i(xi_m)
  std::vector<double> project(std::span<const double> grid_values) const {
    if (grid_values.size() != grid_.size())
      throw std::invalid_argument("project: grid size mismatch");
    std::vector<double> c(modes_, 0.0);
    const int M = grid_size();
    for (int i = 0; i < modes_; ++i) {
      const double* row = &basis_[static_cast<std::size_t>(i) * M];
      double s = 0.0;
      for (int m = 0; m < M; ++m) s += grid_values[m] * row[m];
      c[i] = weight_ * s;
    }
    return c;
  }

  // v(xi_m) = sum_i c_i e_i(xi_m)
  std::vector<double> reconstruct(std::span<const double> coeffs) const {
    if (coeffs.size() != static_cast<std::size_t>(modes_))
      throw std::invalid_argument("reconstruct: coefficient count mismatch");
    const int M = grid_size();
    std::vector<double> v(M, 0.0);
    for (int i = 0; i < modes_; ++i) {
      const double* row = &basis_[static_cast<std::size_t>(i) * M];
      double ci = coeffs[i];
      if (ci == 0.0) continue;
      for (int m = 0; m < M; ++m) v[m] += ci * row[m];
    }
    return v;
  }

  std::string descriptor() const {
    return "dirichlet_laplacian(N=" + std::to_string(modes_) +
           ",shift=" + std::to_string(shift_) + ")";
  }

 private:
  int modes_ = 0;
  double shift_ = 0.0;
  std::vector<double> rho_;
  std::vector<double> grid_;
  double weight_ = 0.0;
  std::vector<double> basis_;  // [mode * M + m]
};

// Coefficient vector of a field u = sum_i c_i e_i at a fixed time.
struct SpectralField {
  std::vector<double> c;

  SpectralField() = default;
  explicit SpectralField(int modes) : c(modes, 0.0) {}
  explicit SpectralField(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  int modes() const { return static_cast<int>(c.size()); }

  SpectralField& operator+=(const SpectralField& o) {
    if (o.c.size() != c.size()) throw std::invalid_argument("field size mismatch");
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    if (o.c.size() != c.size()) throw std::invalid_argument("field size mismatch");
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (double& x : c) x *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double a, SpectralField f) { return f *= a; }
};

// c_i -> e^{-rho_i t} c_i; identity at t = 0.
inline SpectralField semigroup_apply(const SpectralOperator& op, double t,
                                     SpectralField u) {
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: t >= 0 required");
  if (u.modes() != op.modes()) throw std::invalid_argument("semigroup_apply: size mismatch");
  if (t == 0.0) return u;
  for (int i = 1; i <= op.modes(); ++i) u.c[i - 1] *= std::exp(-op.rho(i) * t);
  return u;
}

// c_i -> rho_i^gamma c_i (diagonal fractional power; gamma may be negative).
inline SpectralField frac_power_apply(const SpectralOperator& op, double gamma,
                                      SpectralField u) {
  if (u.modes() != op.modes()) throw std::invalid_argument("frac_power_apply: size mismatch");
  if (gamma == 0.0) return u;
  for (int i = 1; i <= op.modes(); ++i) u.c[i - 1] *= std::pow(op.rho(i), gamma);
  return u;
}

}  // namespace levyrd
