#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levyrd/quadrature.hpp"
#include "levyrd/rng.hpp"
#include "levyrd/util.hpp"

namespace levyrd {

enum class MeasureKind { FiniteAtomic, DensityOnInterval, TemperedPowerLaw };
enum class TailSide { Both, Positive, Negative };

// Jump-size intensity measure nu on the real mark space.  Three parametric
// kinds are supported:
//   * finite_atomic:        nu = sum_j m_j delta_{z_j},  z_j != 0
//   * density_on_interval:  d nu/dz = height on [lo, hi]
//   * tempered_power_law:   d nu/dz = scale |z|^{-1-beta} e^{-eta |z|} on
//                           {|z| >= eps} (one or both sides)
// Infinite-activity kinds are represented by the eps-truncation; the
// truncated mass is finite and the sampler draws from nu_trunc / nu_trunc(R).
// Values are immutable after construction and cheap to copy.
class LevyMeasure {
 public:
  LevyMeasure() = default;

  static LevyMeasure finite_atomic(std::vector<std::pair<double, double>> atoms) {
    LevyMeasure nu;
    nu.kind_ = MeasureKind::FiniteAtomic;
    for (auto& [z, m] : atoms) {
      if (z == 0.0) throw ConfigError("LevyMeasure: atom at 0 not allowed (nu({0}) = 0)");
      if (m < 0.0) throw ConfigError("LevyMeasure: negative atom mass");
    }
    nu.atoms_ = std::move(atoms);
    nu.finalize();
    return nu;
  }

  static LevyMeasure null_measure() { return finite_atomic({}); }

  static LevyMeasure density_on_interval(double lo, double hi, double height) {
    if (!(lo < hi)) throw ConfigError("LevyMeasure: need lo < hi");
    if (height < 0.0) throw ConfigError("LevyMeasure: negative density");
    LevyMeasure nu;
    nu.kind_ = MeasureKind::DensityOnInterval;
    nu.lo_ = lo;
    nu.hi_ = hi;
    nu.height_ = height;
    nu.finalize();
    return nu;
  }

  // If trunc_eps <= 0 the cutoff is chosen so that the discarded small-jump
  // p-moment mass (p = p_for_eps) is below 1e-6 of the full p-moment.
  static LevyMeasure tempered_power_law(double beta, double eta, double scale,
                                        double trunc_eps, double p_for_eps = 2.0,
                                        TailSide side = TailSide::Both) {
    if (beta <= 0.0) throw ConfigError("LevyMeasure: beta must be positive");
    if (eta < 0.0) throw ConfigError("LevyMeasure: eta must be >= 0");
    if (scale <= 0.0) throw ConfigError("LevyMeasure: scale must be positive");
    LevyMeasure nu;
    nu.kind_ = MeasureKind::TemperedPowerLaw;
    nu.beta_ = beta;
    nu.eta_ = eta;
    nu.scale_ = scale;
    nu.side_ = side;
    if (trunc_eps > 0.0) {
      nu.eps_ = trunc_eps;
    } else {
      if (p_for_eps <= beta)
        throw ConfigError(
            "LevyMeasure: automatic truncation needs p > beta (otherwise the "
            "untruncated p-moment is infinite); pass an explicit epsilon");
      nu.eps_ = auto_epsilon(beta, eta, p_for_eps);
    }
    nu.finalize();
    return nu;
  }

  MeasureKind kind() const { return kind_; }
  double truncation_epsilon() const { return eps_; }
  double total_mass() const { return mass_; }
  bool symmetric() const { return symmetric_; }

  // \int g(z) nu(dz) over the truncated support.
  template <class G>
  double integral(G&& g) const {
    switch (kind_) {
      case MeasureKind::FiniteAtomic: {
        double s = 0.0;
        for (auto& [z, m] : atoms_) s += m * g(z);
        return s;
      }
      case MeasureKind::DensityOnInterval:
        if (height_ == 0.0) return 0.0;
        return height_ * integrate(g, lo_, hi_, 1e-9);
      case MeasureKind::TemperedPowerLaw: {
        auto one_side = [&](double sign) {
          auto integrand = [&](double z) {
            return g(sign * z) * scale_ * std::pow(z, -1.0 - beta_) *
                   std::exp(-eta_ * z);
          };
          return integrate(integrand, eps_, z_hi_, 1e-9);
        };
        double s = 0.0;
        if (side_ != TailSide::Negative) s += one_side(+1.0);
        if (side_ != TailSide::Positive) s += one_side(-1.0);
        return s;
      }
    }
    return 0.0;
  }

  // C_nu(p) = \int |z|^p nu(dz).  Throws NumericError when the tail makes the
  // moment infinite (untempered power law with p >= beta).
  double p_moment(double p) const {
    if (p <= 0.0) throw std::invalid_argument("p_moment: p must be positive");
    switch (kind_) {
      case MeasureKind::FiniteAtomic: {
        double s = 0.0;
        for (auto& [z, m] : atoms_) s += m * std::pow(std::abs(z), p);
        return s;
      }
      case MeasureKind::DensityOnInterval: {
        auto antideriv = [p](double x) {
          return std::copysign(std::pow(std::abs(x), p + 1.0), x) / (p + 1.0);
        };
        return height_ * (antideriv(hi_) - antideriv(lo_));
      }
      case MeasureKind::TemperedPowerLaw:
        if (eta_ == 0.0 && p >= beta_)
          throw NumericError("LevyMeasure: infinite p-moment (untempered tail, p >= beta)");
        return integral([p](double z) { return std::pow(std::abs(z), p); });
    }
    return 0.0;
  }

  double moment1() const {
    if (symmetric_) return 0.0;
    if (kind_ == MeasureKind::TemperedPowerLaw && eta_ == 0.0 && beta_ <= 1.0)
      throw NumericError("LevyMeasure: infinite first moment");
    return integral([](double z) { return z; });
  }

  double moment2() const {
    if (kind_ == MeasureKind::TemperedPowerLaw && eta_ == 0.0 && beta_ <= 2.0)
      throw NumericError("LevyMeasure: infinite second moment");
    return integral([](double z) { return z * z; });
  }

  // Mark with law nu_trunc / nu_trunc(R).
  double sample(RngStream& rng) const {
    if (mass_ <= 0.0) throw NumericError("LevyMeasure: cannot sample from a null measure");
    switch (kind_) {
      case MeasureKind::FiniteAtomic: {
        double u = rng.uniform() * mass_;
        double acc = 0.0;
        for (auto& [z, m] : atoms_) {
          acc += m;
          if (u <= acc) return z;
        }
        return atoms_.back().first;
      }
      case MeasureKind::DensityOnInterval:
        return rng.uniform(lo_, hi_);
      case MeasureKind::TemperedPowerLaw: {
        double sign = 1.0;
        if (side_ == TailSide::Both) sign = (rng.uniform() < 0.5) ? -1.0 : 1.0;
        if (side_ == TailSide::Negative) sign = -1.0;
        return sign * sample_from_table(rng.uniform());
      }
    }
    return 0.0;
  }

  std::string descriptor() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind_) {
      case MeasureKind::FiniteAtomic:
        os << "finite_atomic{";
        for (std::size_t j = 0; j < atoms_.size(); ++j) {
          if (j) os << ";";
          os << atoms_[j].first << ":" << atoms_[j].second;
        }
        os << "}";
        break;
      case MeasureKind::DensityOnInterval:
        os << "density[" << lo_ << "," << hi_ << "]h=" << height_;
        break;
      case MeasureKind::TemperedPowerLaw:
        os << "tempered(beta=" << beta_ << ",eta=" << eta_ << ",scale=" << scale_
           << ",eps=" << eps_ << ",side="
           << (side_ == TailSide::Both ? "both"
                                       : (side_ == TailSide::Positive ? "pos" : "neg"))
           << ")";
        break;
    }
    return os.str();
  }

  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

 private:
  static double auto_epsilon(double beta, double eta, double p) {
    auto small_mass = [&](double eps) {
      // \int_0^eps z^{p-1-beta} e^{-eta z} dz, convergent since p > beta.
      return integrate(
          [&](double z) { return std::pow(z, p - 1.0 - beta) * std::exp(-eta * z); },
          0.0, eps, 1e-10);
    };
    double full = small_mass(1.0) +
                  integrate(
                      [&](double z) {
                        return std::pow(z, p - 1.0 - beta) * std::exp(-eta * z);
                      },
                      1.0, tail_cutoff(beta, eta, 1.0), 1e-10);
    double lo = 1e-12, hi = 1.0;
    for (int it = 0; it < 200 && small_mass(lo) > 1e-6 * full; ++it) lo *= 0.5;
    for (int it = 0; it < 100; ++it) {
      double mid = std::sqrt(lo * hi);
      if (small_mass(mid) > 1e-6 * full)
        hi = mid;
      else
        lo = mid;
    }
    return lo;
  }

  static double tail_cutoff(double beta, double eta, double eps) {
    if (eta > 0.0) return std::max(eps * 2.0, eps + 80.0 / eta);
    // Untempered: mass tail ~ z^{-beta}; cut where the remaining mass is
    // negligible relative to the mass at eps.
    return eps * std::pow(1e14, 1.0 / beta);
  }

  void finalize() {
    switch (kind_) {
      case MeasureKind::FiniteAtomic: {
        mass_ = 0.0;
        for (auto& [z, m] : atoms_) mass_ += m;
        symmetric_ = true;
        for (auto& [z, m] : atoms_) {
          bool found = false;
          for (auto& [z2, m2] : atoms_)
            if (z2 == -z && m2 == m) found = true;
          if (!found) symmetric_ = false;
        }
        break;
      }
      case MeasureKind::DensityOnInterval:
        mass_ = height_ * (hi_ - lo_);
        symmetric_ = (lo_ == -hi_);
        break;
      case MeasureKind::TemperedPowerLaw: {
        z_hi_ = tail_cutoff(beta_, eta_, eps_);
        double side_mass = integrate(
            [&](double z) { return scale_ * std::pow(z, -1.0 - beta_) * std::exp(-eta_ * z); },
            eps_, z_hi_, 1e-10);
        mass_ = (side_ == TailSide::Both) ? 2.0 * side_mass : side_mass;
        symmetric_ = (side_ == TailSide::Both);
        build_table(side_mass);
        break;
      }
    }
  }

  void build_table(double side_mass) {
    const int K = 2048;
    auto table = std::make_shared<std::vector<std::pair<double, double>>>();
    table->reserve(K + 1);
    double log_lo = std::log(eps_), log_hi = std::log(z_hi_);
    double cum = 0.0;
    double prev = eps_;
    table->push_back({0.0, eps_});
    for (int j = 1; j <= K; ++j) {
      double z = std::exp(log_lo + (log_hi - log_lo) * j / K);
      cum += integrate(
          [&](double t) { return scale_ * std::pow(t, -1.0 - beta_) * std::exp(-eta_ * t); },
          prev, z, 1e-10);
      table->push_back({std::min(cum / side_mass, 1.0), z});
      prev = z;
    }
    table->back().first = 1.0;
    cdf_table_ = std::move(table);
  }

  double sample_from_table(double u) const {
    const auto& tab = *cdf_table_;
    auto it = std::lower_bound(tab.begin(), tab.end(), u,
                               [](const auto& a, double v) { return a.first < v; });
    if (it == tab.begin()) return tab.front().second;
    if (it == tab.end()) return tab.back().second;
    auto [c1, z1] = *it;
    auto [c0, z0] = *(it - 1);
    if (c1 <= c0) return z1;
    return z0 + (z1 - z0) * (u - c0) / (c1 - c0);
  }

  MeasureKind kind_ = MeasureKind::FiniteAtomic;
  std::vector<std::pair<double, double>> atoms_;
  double lo_ = 0.0, hi_ = 0.0, height_ = 0.0;
  double beta_ = 0.0, eta_ = 0.0, scale_ = 0.0, eps_ = 0.0, z_hi_ = 0.0;
  TailSide side_ = TailSide::Both;
  double mass_ = 0.0;
  bool symmetric_ = true;
  std::shared_ptr<const std::vector<std::pair<double, double>>> cdf_table_;
};

}  // namespace levyrd
