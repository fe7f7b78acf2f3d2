#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace levyrd {

namespace detail {

// Smooth bump: 1 on |x| <= 1, 0 on |x| >= 3/2, monotone in between.
inline double besov_psi(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 1.5) return 0.0;
  auto h = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  double t = (r - 1.0) / 0.5;  // in (0,1)
  return h(1.0 - t) / (h(1.0 - t) + h(t));
}

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

// Dyadic Littlewood-Paley filter bank on a periodic grid of n points (d = 1):
//   phi_0 = psi,  phi_1(x) = psi(x/2) - psi(x),  phi_j(x) = phi_1(2^{-j+1} x).
// Band j lives on wavenumbers |k| in 2^{j-1} [1, 3]; bands beyond the grid
// Nyquist are clipped, which only lowers the (negative-order) norms.
class DyadicFilterBank {
 public:
  explicit DyadicFilterBank(int n = 4096) : n_(n) {
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument("DyadicFilterBank: grid size must be a power of two >= 8");
    int nyquist = n_ / 2;
    levels_ = 1;
    while ((1 << levels_) <= nyquist) ++levels_;  // bands j = 0 .. levels_-1
    filters_.assign(levels_, std::vector<double>(nyquist + 1, 0.0));
    for (int k = 0; k <= nyquist; ++k) {
      double x = static_cast<double>(k);
      filters_[0][k] = detail::besov_psi(x);
      for (int j = 1; j < levels_; ++j) {
        double xs = std::ldexp(x, -j + 1);  // 2^{-j+1} x
        filters_[j][k] = detail::besov_psi(xs / 2.0) - detail::besov_psi(xs);
      }
    }
  }

  int grid_size() const { return n_; }
  int levels() const { return levels_; }
  double node(int m) const { return static_cast<double>(m) / n_; }

  // L^p norms of the band components F^{-1}[phi_j F f], j = 0..levels-1.
  std::vector<double> band_lp_norms(std::span<const double> f, double p) const {
    if (static_cast<int>(f.size()) != n_)
      throw std::invalid_argument("band_lp_norms: grid size mismatch");
    int nc = n_ / 2 + 1;
    double* in = fftw_alloc_real(n_);
    fftw_complex* spec = fftw_alloc_complex(nc);
    double* out = fftw_alloc_real(n_);
    fftw_plan fwd, bwd;
    {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      fwd = fftw_plan_dft_r2c_1d(n_, in, spec, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_1d(n_, spec, out, FFTW_ESTIMATE);
    }
    for (int m = 0; m < n_; ++m) in[m] = f[m];
    fftw_execute(fwd);
    std::vector<std::complex<double>> base(nc);
    for (int k = 0; k < nc; ++k) base[k] = {spec[k][0], spec[k][1]};

    std::vector<double> norms(levels_, 0.0);
    const double h = 1.0 / n_;
    for (int j = 0; j < levels_; ++j) {
      for (int k = 0; k < nc; ++k) {
        std::complex<double> v = base[k] * filters_[j][k];
        spec[k][0] = v.real();
        spec[k][1] = v.imag();
      }
      fftw_execute(bwd);
      double s = 0.0;
      for (int m = 0; m < n_; ++m) s += std::pow(std::abs(out[m] / n_), p);
      norms[j] = std::pow(h * s, 1.0 / p);
    }
    {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      fftw_destroy_plan(fwd);
      fftw_destroy_plan(bwd);
    }
    fftw_free(in);
    fftw_free(spec);
    fftw_free(out);
    return norms;
  }

  // B^s_{p,infty} norm: sup_j 2^{sj} |F^{-1}[phi_j F f]|_{L^p}.
  double besov_norm(std::span<const double> f, double s, double p) const {
    auto bands = band_lp_norms(f, p);
    double nrm = 0.0;
    for (int j = 0; j < levels_; ++j)
      nrm = std::max(nrm, std::pow(2.0, s * j) * bands[j]);
    return nrm;
  }

 private:
  int n_;
  int levels_;
  std::vector<std::vector<double>> filters_;
};

// Besov norm of the distribution f delta_a on the periodic grid surrogate,
// with the natural order s = d/p - d (d = 1).  The atom is realized as the
// grid delta at the node nearest to a, carrying weight f(a)/h.
inline double besov_dirac_norm(const DyadicFilterBank& bank,
                               std::span<const double> f_grid, double a,
                               double p) {
  int n = bank.grid_size();
  if (static_cast<int>(f_grid.size()) != n)
    throw std::invalid_argument("besov_dirac_norm: grid size mismatch");
  int m = static_cast<int>(std::lround(a * n)) % n;
  if (m < 0) m += n;
  std::vector<double> v(n, 0.0);
  v[m] = f_grid[m] * n;  // f(a) delta_a, h = 1/n
  double s = 1.0 / p - 1.0;
  return bank.besov_norm(v, s, p);
}

}  // namespace levyrd
