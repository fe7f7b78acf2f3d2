#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <variant>
#include <vector>

#include "levyrd/coefficients.hpp"
#include "levyrd/noise.hpp"
#include "levyrd/norms.hpp"
#include "levyrd/path_record.hpp"
#include "levyrd/prm.hpp"
#include "levyrd/spectral.hpp"
#include "levyrd/util.hpp"

namespace levyrd {

// One cell of a frozen-coefficient stochastic convolution: the integrand is
// constant on (t0, t1], atoms carry precomputed jump coefficient vectors and
// comp holds the mark integral \int G d nu per coefficient.
struct ConvolutionCell {
  double t0 = 0.0, t1 = 0.0;
  std::vector<std::pair<double, std::vector<double>>> atoms;
  std::vector<double> comp;
};

// S(t) = sum_{atoms tau <= t} e^{-(t-tau)A} w  -  sum_cells comp \int e^{-(t-s)A} ds,
// exact in time for cell-frozen integrands (exponential integrator).
inline SpectralField stochastic_convolution(const SpectralOperator& op,
                                            const std::vector<ConvolutionCell>& cells,
                                            double t) {
  SpectralField out(op.modes());
  for (const auto& cell : cells) {
    for (const auto& [tau, w] : cell.atoms)
      if (!(tau > cell.t0 && tau <= cell.t1))
        throw std::invalid_argument("stochastic_convolution: atom outside its cell window");
    if (cell.t0 >= t) continue;
    double b = std::min(cell.t1, t);
    for (const auto& [tau, w] : cell.atoms) {
      if (tau > t) continue;
      for (int i = 1; i <= op.modes(); ++i)
        out.c[i - 1] += std::exp(-op.rho(i) * (t - tau)) * w[i - 1];
    }
    if (!cell.comp.empty()) {
      double len = b - cell.t0;
      for (int i = 1; i <= op.modes(); ++i) {
        double r = op.rho(i);
        double kern = std::exp(-r * (t - b)) * len * phi1(r * len);
        out.c[i - 1] -= cell.comp[i - 1] * kern;
      }
    }
  }
  return out;
}

// Deterministic fractional convolution
//   (Lambda^{-alpha} f)(t) = 1/Gamma(alpha) \int_0^t (t-s)^{alpha-1} e^{-(t-s)A} f(s) ds
// with f piecewise constant on its recorded segments; the singular kernel is
// integrated exactly against each segment per mode.
inline PathRecord lambda_frac_inverse(const SpectralOperator& op, double alpha,
                                      const PathRecord& f) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("lambda_frac_inverse: alpha in (0,1] required");
  if (f.empty()) throw std::invalid_argument("lambda_frac_inverse: empty input");
  double gamma_a = std::tgamma(alpha);
  PathRecord out;
  for (std::size_t j = 0; j < f.size(); ++j) {
    double t = f.times[j];
    SpectralField acc(op.modes());
    for (std::size_t s = 0; s + 1 <= j; ++s) {
      double a = f.times[s];
      double b = f.times[s + 1];
      if (a >= t) break;
      b = std::min(b, t);
      for (int i = 1; i <= op.modes(); ++i) {
        double kern =
            power_exp_kernel_integral(alpha, op.rho(i), t - b, t - a) / gamma_a;
        acc.c[i - 1] += kern * f.states[s].c[i - 1];
      }
    }
    if (out.times.empty() || t > out.times.back()) out.push(t, std::move(acc));
  }
  return out;
}

struct GridScheme {
  int level = 4;           // time step 2^{-level}
  double horizon = 1.0;    // T
  SpectralField x0;        // initial coefficients x_n
  DriftSpec drift;
  DiffusionSpec diffusion;
  NoiseBlock noise;
  int initial_cutoff = 0;  // optional spectral cutoff emulating x_n -> x

  double step() const { return std::ldexp(1.0, -level); }
};

using SampledNoise =
    std::variant<std::monostate, PointMeasure<ScalarMark>,
                 PointMeasure<SpectralMark>, PointMeasure<SpaceTimeMark>>;

inline SampledNoise sample_noise(const NoiseBlock& noise, double T,
                                 std::uint64_t seed,
                                 const SpectralOperator* snap_grid = nullptr) {
  return std::visit(
      [&](const auto& spec) -> SampledNoise {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, std::monostate>)
          return std::monostate{};
        else if constexpr (std::is_same_v<S, ScalarNoiseSpec>)
          return sample_prm(spec.base, T, seed);
        else if constexpr (std::is_same_v<S, SpectralNoiseSpec>)
          return sample_spectral_noise(spec, T, seed);
        else
          return sample_spacetime_noise(spec, T, seed, snap_grid);
      },
      noise);
}

struct GridApproxOptions {
  bool record_drift_part = false;  // also record z(t) = \int e^{-(t-s)A} F(u_hat) ds
};

struct GridApproxResult {
  PathRecord u;                     // u_n at grid and atom times (right limits)
  std::unordered_map<std::size_t, SpectralField> jumps;  // record index -> jump
  PathRecord u_hat;                 // cell-frozen u_hat_n at cell start times
  PathRecord drift_part;            // z_n, when requested
  std::size_t atom_count = 0;
};

// Exact time-average of the path over cell k-1 (step 2^{-level}); k = 0
// returns the initial state.  Within each recorded segment the path solves
// u' = -rho u + const per mode, so the forcing constant is recovered from the
// segment endpoints (left limit at the segment end) and the average follows
// in closed form, jumps included.
inline SpectralField cell_average(
    const SpectralOperator& op, const PathRecord& path, int level, long k,
    const std::unordered_map<std::size_t, SpectralField>* jumps = nullptr) {
  if (path.empty()) throw std::invalid_argument("cell_average: empty path");
  if (k == 0) return path.states.front();
  double h = std::ldexp(1.0, -level);
  double a = (k - 1) * h;
  double b = std::min(k * h, path.horizon());
  if (!(b > a)) throw std::invalid_argument("cell_average: empty cell");
  std::size_t ja = path.index_at(a);
  if (path.times[ja] != a || path.horizon() < b)
    throw std::invalid_argument("cell_average: cell not fully covered by path");
  SpectralField integral(op.modes());
  for (std::size_t j = ja; j + 1 < path.size() && path.times[j] < b; ++j) {
    double t0 = path.times[j];
    double t1 = std::min(path.times[j + 1], b);
    double dt = t1 - t0;
    if (dt <= 0.0) continue;
    const SpectralField& u0 = path.states[j];
    SpectralField left = path.states[j + 1];
    if (jumps) {
      auto it = jumps->find(j + 1);
      if (it != jumps->end()) left -= it->second;
    }
    for (int i = 1; i <= op.modes(); ++i) {
      double r = op.rho(i);
      double p1 = phi1(r * dt);
      double C = (left.c[i - 1] - std::exp(-r * dt) * u0.c[i - 1]) / (dt * p1);
      integral.c[i - 1] += u0.c[i - 1] * dt * p1 + C * dt * dt * phi2(r * dt);
    }
  }
  integral *= 1.0 / (b - a);
  return integral;
}

namespace detail {

struct FrozenCell {
  std::vector<double> forcing;  // F_i - Comp_i
  std::vector<double> drift_coeffs;
  std::vector<double> comp_coeffs;
  std::vector<double> g_grid;  // g(u_hat(xi_m))
};

// Coefficients frozen at u_hat for the current cell.
inline FrozenCell freeze_cell(const SpectralOperator& op, const GridScheme& scheme,
                              const SpectralField& u_hat) {
  FrozenCell fc;
  auto grid_u = op.reconstruct(u_hat.c);
  if (scheme.drift.kind != DriftSpec::Kind::None) {
    auto fv = drift_grid_values(op, scheme.drift, grid_u);
    fc.drift_coeffs = op.project(fv);
  } else {
    fc.drift_coeffs.assign(op.modes(), 0.0);
  }
  std::vector<double> gv(op.grid_size(), 0.0);
  if (scheme.diffusion.kind != DiffusionSpec::Kind::None) {
    gv = grid_u;
    for (double& x : gv) x = scheme.diffusion.scalar(x);
  }
  fc.g_grid = gv;
  fc.comp_coeffs.assign(op.modes(), 0.0);
  std::visit(
      [&](const auto& spec) {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, ScalarNoiseSpec>) {
          double m1 = spec.base.moment1();
          if (m1 != 0.0) {
            auto pc = op.project(gv);
            for (int i = 0; i < op.modes(); ++i) fc.comp_coeffs[i] = m1 * pc[i];
          }
        } else if constexpr (std::is_same_v<S, SpaceTimeNoiseSpec>) {
          double m1 = spec.jump.moment1();
          if (m1 != 0.0) {
            auto pc = op.project(gv);
            for (int i = 0; i < op.modes(); ++i) fc.comp_coeffs[i] = m1 * pc[i];
          }
        } else if constexpr (std::is_same_v<S, SpectralNoiseSpec>) {
          double m1 = spec.base.moment1();
          if (m1 != 0.0) {
            std::vector<double> tmp(op.grid_size());
            for (int j = 1; j <= spec.modes; ++j) {
              for (int m = 0; m < op.grid_size(); ++m)
                tmp[m] = gv[m] * op.basis(j, m);
              auto pc = op.project(tmp);
              double w = m1 * spec.weight(j);
              for (int i = 0; i < op.modes(); ++i) fc.comp_coeffs[i] += w * pc[i];
            }
          }
        }
      },
      scheme.noise);
  fc.forcing.resize(op.modes());
  for (int i = 0; i < op.modes(); ++i)
    fc.forcing[i] = fc.drift_coeffs[i] - fc.comp_coeffs[i];
  return fc;
}

// Jump coefficient vector for one atom, with G frozen at u_hat.
template <class Mark>
std::vector<double> jump_coeffs(const SpectralOperator& op, const GridScheme& scheme,
                                const FrozenCell& fc, const Mark& mark) {
  if constexpr (std::is_same_v<Mark, ScalarMark>) {
    std::vector<double> v = fc.g_grid;
    for (double& x : v) x *= mark.z;
    return op.project(v);
  } else if constexpr (std::is_same_v<Mark, SpectralMark>) {
    const auto& spec = std::get<SpectralNoiseSpec>(scheme.noise);
    std::vector<double> v(op.grid_size());
    double w = spec.weight(mark.mode) * mark.z;
    for (int m = 0; m < op.grid_size(); ++m)
      v[m] = fc.g_grid[m] * w * op.basis(mark.mode, m);
    return op.project(v);
  } else {
    int M = op.grid_size();
    int idx = std::clamp(static_cast<int>(mark.xi * (M + 1) + 0.5), 1, M) - 1;
    double gu = fc.g_grid[idx];
    std::vector<double> c(op.modes());
    for (int i = 1; i <= op.modes(); ++i)
      c[i - 1] = gu * mark.zeta * op.eigenfunction(i, mark.xi);
    return c;
  }
}

inline void advance_segment(const SpectralOperator& op, SpectralField& u,
                            const std::vector<double>& forcing, double dt) {
  for (int i = 1; i <= op.modes(); ++i) {
    double r = op.rho(i);
    u.c[i - 1] = std::exp(-r * dt) * u.c[i - 1] + forcing[i - 1] * dt * phi1(r * dt);
  }
}

}  // namespace detail

// The grid-approximation scheme: on each cell [s_k, s_{k+1}) of width 2^{-n}
// the coefficients F(u_hat), G(u_hat; .) are frozen at the previous cell's
// time average, the linear part is integrated exactly per mode, jumps are
// applied at atom times and the compensator is integrated analytically.
// Returns the cadlag record of u_n (grid + atom times) and the piecewise
// constant u_hat_n.
template <class Mark>
GridApproxResult grid_approx_path_only(const SpectralOperator& op,
                                       const GridScheme& scheme,
                                       const PointMeasure<Mark>& noise,
                                       const GridApproxOptions& opts = {}) {
  if (scheme.x0.modes() != op.modes())
    throw std::invalid_argument("grid_approx_path: x0 size mismatch");
  const double T = scheme.horizon;
  if (!(T > 0.0)) throw std::invalid_argument("grid_approx_path: horizon > 0 required");
  const double h = scheme.step();
  const long K = static_cast<long>(std::ceil(T / h - 1e-12));

  GridApproxResult res;
  res.atom_count = noise.atoms.size();

  SpectralField u = scheme.x0;
  if (scheme.initial_cutoff > 0)
    for (int i = scheme.initial_cutoff; i < op.modes(); ++i) u.c[i] = 0.0;
  SpectralField z(op.modes());

  res.u.push(0.0, u);
  if (opts.record_drift_part) res.drift_part.push(0.0, z);

  SpectralField u_hat = u;
  res.u_hat.push(0.0, u_hat);

  std::size_t next_atom = 0;
  const std::vector<double> zero(op.modes(), 0.0);

  for (long k = 0; k < K; ++k) {
    double a = k * h;
    double b = std::min((k + 1) * h, T);
    if (k > 0) {
      u_hat = cell_average(op, res.u, scheme.level, k, &res.jumps);
      if (res.u_hat.times.back() < a) res.u_hat.push(a, u_hat);
    }
    auto fc = detail::freeze_cell(op, scheme, u_hat);

    double t = a;
    while (true) {
      // atoms of this cell: times in (a, b]
      bool has_atom =
          next_atom < noise.atoms.size() && noise.atoms[next_atom].first <= b;
      double te = has_atom ? noise.atoms[next_atom].first : b;
      double dt = te - t;
      if (dt > 0.0) {
        detail::advance_segment(op, u, fc.forcing, dt);
        if (opts.record_drift_part)
          detail::advance_segment(op, z, fc.drift_coeffs, dt);
      }
      if (te > res.u.times.back()) {
        res.u.push(te, u);
        if (opts.record_drift_part) res.drift_part.push(te, z);
      }
      if (has_atom) {
        // grid state recorded first (left limit), then the jump; the stored
        // state is the right limit
        SpectralField jump(detail::jump_coeffs(op, scheme, fc,
                                               noise.atoms[next_atom].second));
        u += jump;
        res.u.replace_back(u);
        auto it = res.jumps.find(res.u.size() - 1);
        if (it == res.jumps.end())
          res.jumps.emplace(res.u.size() - 1, jump);
        else
          it->second += jump;
        ++next_atom;
        t = te;
        if (t >= b) break;
      } else {
        break;
      }
    }
  }
  if (!all_finite(u.c))
    throw NumericError("grid_approx_path: state became non-finite (blow-up)");
  return res;
}

inline GridApproxResult grid_approx_path(const SpectralOperator& op,
                                         const GridScheme& scheme,
                                         const SampledNoise& noise,
                                         const GridApproxOptions& opts = {}) {
  return std::visit(
      [&](const auto& pm) -> GridApproxResult {
        using P = std::decay_t<decltype(pm)>;
        if constexpr (std::is_same_v<P, std::monostate>) {
          PointMeasure<ScalarMark> empty;
          empty.horizon = scheme.horizon;
          return grid_approx_path_only(op, scheme, empty, opts);
        } else {
          return grid_approx_path_only(op, scheme, pm, opts);
        }
      },
      noise);
}

inline GridApproxResult grid_approx_path(const SpectralOperator& op,
                                         const GridScheme& scheme,
                                         std::uint64_t seed,
                                         const GridApproxOptions& opts = {}) {
  return grid_approx_path(op, scheme,
                          sample_noise(scheme.noise, scheme.horizon, seed, &op),
                          opts);
}

inline int thread_budget() {
  if (const char* env = std::getenv("LEVYRD_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

struct McOptions {
  std::vector<double> checkpoints;   // defaults to 17 uniform times
  NormSpec e_norm{SpaceKind::E, 2.0, 0.5, 0.5};
  double p = 2.0;
  double lambda = 1.0;
  bool store_coeffs = false;
  bool record_drift_part = false;
};

struct ReplicaSummary {
  std::vector<double> norm_B;    // per checkpoint
  std::vector<double> norm_E_p;  // |u(t)|_E^p per checkpoint
  std::vector<std::vector<double>> coeffs;  // per checkpoint (optional)
  double weighted_integral = 0.0;  // \int e^{-lambda t} |u(t)|_E^p dt
  std::size_t atom_count = 0;
};

struct Ensemble {
  std::vector<double> checkpoints;
  std::vector<ReplicaSummary> replicas;
  long completed = 0;
  long failed = 0;
  std::string first_error;
  double p = 2.0;
  double lambda = 1.0;
};

// Replica-parallel Monte Carlo: replica r owns the derived seed (base, r) and
// private state; results are merged by index, so the ensemble is a pure
// function of (scheme, replicas, base_seed) regardless of thread count.
inline Ensemble simulate_mc(const SpectralOperator& op, const GridScheme& scheme,
                            long replicas, std::uint64_t base_seed,
                            const McOptions& opts = {}) {
  if (replicas < 1) throw std::invalid_argument("simulate_mc: replicas >= 1 required");
  Ensemble ens;
  ens.p = opts.p;
  ens.lambda = opts.lambda;
  ens.checkpoints = opts.checkpoints;
  if (ens.checkpoints.empty()) {
    for (int j = 0; j <= 16; ++j)
      ens.checkpoints.push_back(scheme.horizon * j / 16.0);
  }
  ens.replicas.resize(replicas);
  std::vector<char> ok(replicas, 0);
  std::vector<std::string> errors(replicas);

  std::atomic<long> next{0};
  auto worker = [&]() {
    while (true) {
      long r = next.fetch_add(1);
      if (r >= replicas) break;
      try {
        auto run = grid_approx_path(op, scheme, derive_seed(base_seed, r),
                                    GridApproxOptions{opts.record_drift_part});
        ReplicaSummary& s = ens.replicas[r];
        s.atom_count = run.atom_count;
        for (double t : ens.checkpoints) {
          const SpectralField& u = run.u.state_at(std::min(t, run.u.horizon()));
          s.norm_B.push_back(norm_B(u, opts.p));
          s.norm_E_p.push_back(std::pow(field_norm(op, u, opts.e_norm), opts.p));
          if (opts.store_coeffs) s.coeffs.push_back(u.c);
        }
        s.weighted_integral =
            lp_lambda_norm_pth(op, run.u, opts.p, opts.lambda, opts.e_norm);
        ok[r] = 1;
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  };
  int nthreads = std::min<long>(thread_budget(), replicas);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (long r = 0; r < replicas; ++r) {
    if (ok[r]) {
      ++ens.completed;
    } else {
      ++ens.failed;
      if (ens.first_error.empty()) ens.first_error = errors[r];
    }
  }
  // keep only completed replicas, in index order
  if (ens.failed > 0) {
    std::vector<ReplicaSummary> kept;
    kept.reserve(ens.completed);
    for (long r = 0; r < replicas; ++r)
      if (ok[r]) kept.push_back(std::move(ens.replicas[r]));
    ens.replicas = std::move(kept);
  }
  return ens;
}

}  // namespace levyrd
