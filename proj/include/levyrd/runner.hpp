#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "levyrd/config.hpp"
#include "levyrd/diagnostics.hpp"
#include "levyrd/gate.hpp"
#include "levyrd/norms.hpp"
#include "levyrd/solver.hpp"

namespace levyrd {

inline constexpr int kArtifactSchemaVersion = 1;

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitGateFailure = 2;
inline constexpr int kExitPartialMc = 3;

// Collects artifacts as (name, content) pairs, writes them under the output
// directory and emits a manifest whose hash is a pure function of the
// contents (no timestamps).
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void add(const std::string& name, const std::string& content) {
    entries_.push_back({name, content});
  }

  std::filesystem::path dir() const { return dir_; }

  // Returns the manifest hash.
  std::string finalize(const RunConfig& cfg) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    nlohmann::ordered_json manifest;
    manifest["schema_version"] = kArtifactSchemaVersion;
    {
      std::ostringstream h;
      h << std::hex << std::setw(16) << std::setfill('0')
        << fnv1a64(cfg.resolved_toml());
      manifest["config_hash"] = h.str();
    }
    manifest["base_seed"] = cfg.base_seed;
    nlohmann::ordered_json arts = nlohmann::ordered_json::array();
    std::uint64_t combined = 0xcbf29ce484222325ULL;
    for (const auto& [name, content] : entries_) {
      std::ostringstream h;
      h << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(content);
      nlohmann::ordered_json e;
      e["name"] = name;
      e["bytes"] = content.size();
      e["fnv1a64"] = h.str();
      arts.push_back(e);
      combined = fnv1a64(name, combined);
      combined = fnv1a64(content, combined);
      std::ofstream out(dir_ / name, std::ios::binary);
      out << content;
    }
    manifest["artifacts"] = arts;
    std::ostringstream ch;
    ch << std::hex << std::setw(16) << std::setfill('0') << combined;
    manifest["manifest_hash"] = ch.str();
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
    return ch.str();
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

inline HypothesisReport evaluate_gate(const GateConfig& g) {
  if (g.theorem == "main")
    return check_main(g.delta, g.delta_F, g.delta_G, g.delta_I, g.p);
  if (g.theorem == "ex01")
    return check_ex01(g.d, g.p, g.q, g.r, g.alpha, g.delta);
  if (g.theorem == "stpn")
    return check_stpn(g.d, g.k_order, g.p, g.q, g.gamma);
  if (g.theorem == "claim")
    return check_claim_spectral(g.alpha, g.gamma, g.d, g.p, g.r);
  throw ConfigError("gate.theorem: main|ex01|stpn|claim");
}

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> replicas;
  std::optional<std::string> out;
  bool gate_required = false;
};

inline void apply_overrides(RunConfig& cfg, const RunOverrides& ov) {
  if (ov.seed) cfg.base_seed = *ov.seed;
  if (ov.replicas) cfg.replicas = *ov.replicas;
  if (ov.out) cfg.out_directory = *ov.out;
  cfg.validate();
}

inline nlohmann::ordered_json ensemble_summary_json(const SpectralOperator& op,
                                                    const RunConfig& cfg,
                                                    const Ensemble& ens) {
  nlohmann::ordered_json j;
  j["schema_version"] = kArtifactSchemaVersion;
  j["operator"] = op.descriptor();
  j["replicas_requested"] = cfg.replicas;
  j["replicas_completed"] = ens.completed;
  j["replicas_failed"] = ens.failed;
  if (!ens.first_error.empty()) j["first_error"] = ens.first_error;
  j["p"] = ens.p;
  j["lambda"] = ens.lambda;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  if (!ens.replicas.empty()) {
    for (std::size_t ci = 0; ci < ens.checkpoints.size(); ++ci) {
      std::vector<double> bs, eps;
      for (const auto& r : ens.replicas) {
        bs.push_back(r.norm_B[ci]);
        eps.push_back(r.norm_E_p[ci]);
      }
      auto ci_e = bootstrap_mean(eps);
      nlohmann::ordered_json row;
      row["time"] = ens.checkpoints[ci];
      row["mean_norm_B"] = mean_of(bs);
      row["p_moment_E"] = ci_e.mean;
      row["ci_low"] = ci_e.lo;
      row["ci_high"] = ci_e.hi;
      rows.push_back(row);
    }
  }
  j["checkpoints"] = rows;
  if (!ens.replicas.empty()) {
    std::vector<double> wi;
    for (const auto& r : ens.replicas) wi.push_back(r.weighted_integral);
    auto ci_w = bootstrap_mean(wi);
    j["weighted_p_moment_integral"] = {
        {"value", ci_w.mean}, {"ci_low", ci_w.lo}, {"ci_high", ci_w.hi}};
  }
  return j;
}

inline int run_simulate(RunConfig cfg, const RunOverrides& ov,
                        std::ostream& log = std::cout) {
  apply_overrides(cfg, ov);
  ArtifactWriter art(cfg.out_directory);
  art.add("resolved.toml", cfg.resolved_toml());
  if (ov.gate_required) {
    if (cfg.gate.theorem.empty())
      throw ConfigError("--gate requires a [gate] block with a theorem");
    auto rep = evaluate_gate(cfg.gate);
    art.add("gate_report.json", rep.to_json().dump(2) + "\n");
    if (!rep.pass) {
      log << "gate failed; aborting simulation\n";
      art.finalize(cfg);
      return kExitGateFailure;
    }
  }
  auto op = cfg.make_operator();
  auto scheme = cfg.make_scheme(op);
  McOptions mo;
  mo.lambda = cfg.effective_lambda();
  auto ens = simulate_mc(op, scheme, cfg.replicas, cfg.base_seed, mo);
  art.add("ensemble_summary.json", ensemble_summary_json(op, cfg, ens).dump(2) + "\n");
  if (cfg.save_paths) {
    nlohmann::ordered_json meta;
    meta["operator"] = op.descriptor();
    meta["schema_version"] = kArtifactSchemaVersion;
    meta["columns"] = "t,c_1..c_N";
    art.add("paths_meta.json", meta.dump(2) + "\n");
    for (long r = 0; r < cfg.replicas; ++r) {
      auto run = grid_approx_path(op, scheme, derive_seed(cfg.base_seed, r));
      std::ostringstream os;
      run.u.write_csv(os);
      art.add("replica_" + std::to_string(r) + ".csv", os.str());
    }
  }
  auto hash = art.finalize(cfg);
  log << "manifest " << hash << " (" << ens.completed << "/" << cfg.replicas
      << " replicas)\n";
  if (ens.failed > 0) {
    log << "partial MC failure: " << ens.first_error << "\n";
    return kExitPartialMc;
  }
  return kExitOk;
}

inline int run_gate(RunConfig cfg, const RunOverrides& ov,
                    std::ostream& log = std::cout) {
  apply_overrides(cfg, ov);
  auto rep = evaluate_gate(cfg.gate);
  ArtifactWriter art(cfg.out_directory);
  art.add("resolved.toml", cfg.resolved_toml());
  art.add("gate_report.json", rep.to_json().dump(2) + "\n");
  art.finalize(cfg);
  log << rep.to_json().dump(2) << "\n";
  return rep.pass ? kExitOk : kExitGateFailure;
}

inline int run_ladder(RunConfig cfg, const RunOverrides& ov,
                      std::vector<int> levels, std::ostream& log = std::cout) {
  apply_overrides(cfg, ov);
  if (levels.empty()) levels = cfg.levels;
  if (levels.size() < 3)
    throw ConfigError("ladder: need at least 3 levels (scheme.levels or --levels)");
  auto op = cfg.make_operator();
  auto scheme = cfg.make_scheme(op);
  NormSpec norm{SpaceKind::E, 2.0, 0.5, 0.5};
  auto fit = cauchy_decay_fit(op, scheme, levels, cfg.base_seed,
                              static_cast<int>(std::min<long>(cfg.replicas, 64)),
                              2.0, cfg.effective_lambda(), norm);
  nlohmann::ordered_json j;
  j["schema_version"] = kArtifactSchemaVersion;
  j["theta_hat"] = fit.theta_hat;
  j["r_squared"] = fit.r_squared;
  j["residual"] = fit.residual;
  j["levels"] = fit.levels;
  j["distances"] = fit.distances;
  ArtifactWriter art(cfg.out_directory);
  art.add("resolved.toml", cfg.resolved_toml());
  art.add("rate_report.json", j.dump(2) + "\n");
  art.finalize(cfg);
  log << j.dump(2) << "\n";
  return kExitOk;
}

inline int run_noise_sample(RunConfig cfg, const RunOverrides& ov,
                            std::ostream& log = std::cout) {
  apply_overrides(cfg, ov);
  if (cfg.noise_kind == "none")
    throw ConfigError("noise-sample: noise.kind must not be 'none'");
  auto op = cfg.make_operator();
  auto noise = sample_noise(cfg.make_noise(), cfg.horizon, cfg.base_seed, &op);
  std::ostringstream os;
  std::size_t n = std::visit(
      [&](const auto& pm) -> std::size_t {
        using P = std::decay_t<decltype(pm)>;
        if constexpr (std::is_same_v<P, std::monostate>) {
          return 0;
        } else {
          pm.write_csv(os);
          return pm.atoms.size();
        }
      },
      noise);
  ArtifactWriter art(cfg.out_directory);
  art.add("resolved.toml", cfg.resolved_toml());
  art.add("noise.csv", os.str());
  art.finalize(cfg);
  log << "sampled " << n << " atoms\n";
  return kExitOk;
}

inline int run_diagnose(RunConfig cfg, const RunOverrides& ov,
                        std::ostream& log = std::cout) {
  apply_overrides(cfg, ov);
  auto op = cfg.make_operator();
  auto scheme = cfg.make_scheme(op);
  std::vector<EstimateReport> reports;

  McOptions mo;
  mo.lambda = cfg.effective_lambda();
  auto ens = simulate_mc(op, scheme, cfg.replicas, cfg.base_seed, mo);
  if (ens.completed == 0) throw NumericError("diagnose: all replicas failed");
  reports.push_back(moment_estimate(ens));
  reports.back().seed = cfg.base_seed;

  if (scheme.drift.kind == DriftSpec::Kind::Poly) {
    // pathwise a-priori bound over the replicas
    long checked = 0, passed = 0;
    double worst = -std::numeric_limits<double>::infinity();
    DriftSpec drift = cfg.make_drift();
    auto a = [&](double rr) { return drift.dissipativity_a(rr); };
    for (long r = 0; r < cfg.replicas; ++r) {
      GridApproxOptions go;
      go.record_drift_part = true;
      auto run = grid_approx_path(op, scheme, derive_seed(cfg.base_seed, r), go);
      PathRecord v;
      for (std::size_t j = 0; j < run.u.size(); ++j)
        v.push(run.u.times[j], run.u.states[j] - run.drift_part.states[j]);
      auto rep = apriori_bound_check(op, run.drift_part, v, drift.k, a, 0.05);
      ++checked;
      if (rep.pass) ++passed;
      worst = std::max(worst, rep.value);
    }
    EstimateReport rep;
    rep.name = "apriori_bound";
    rep.value = worst;
    rep.tolerance = 0.05;
    rep.pass = (passed == checked);
    rep.replicas = checked;
    rep.seed = cfg.base_seed;
    rep.detail = std::to_string(passed) + "/" + std::to_string(checked) +
                 " replicas within tolerance";
    reports.push_back(rep);

    auto diss = dissipativity_sample_check(cfg.make_drift(), cfg.drift_k0, 100000,
                                           derive_seed(cfg.base_seed, 0xd155));
    EstimateReport drep;
    drep.name = "dissipativity_sample_check";
    drep.value = diss.max_violation;
    drep.bound = 0.0;
    drep.pass = diss.ok;
    drep.replicas = diss.samples;
    drep.seed = cfg.base_seed;
    drep.detail = "witness v=" + std::to_string(diss.witness.first) +
                  " z=" + std::to_string(diss.witness.second);
    reports.push_back(drep);
  }

  if (cfg.noise_kind == "spectral") {
    SpectralNoiseSpec spec{cfg.noise_alpha, cfg.modes, cfg.measure.build()};
    EstimateReport rep;
    rep.name = "spectral_tail_pmoment";
    rep.value = spec.tail_pmoment(2.0, cfg.modes);
    rep.pass = std::isfinite(rep.value);
    rep.detail = "discarded-tail p-moment beyond N=" + std::to_string(cfg.modes);
    reports.push_back(rep);
  }

  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "name,value,bound,verdict\n";
  bool all_pass = true;
  for (const auto& r : reports) {
    arr.push_back(r.to_json());
    csv << r.name << ',' << r.value << ','
        << (std::isfinite(r.bound) ? std::to_string(r.bound) : "") << ','
        << (r.pass ? "pass" : "fail") << "\n";
    all_pass = all_pass && r.pass;
  }
  ArtifactWriter art(cfg.out_directory);
  art.add("resolved.toml", cfg.resolved_toml());
  art.add("diagnostics.json", arr.dump(2) + "\n");
  art.add("diagnostics_summary.csv", csv.str());
  art.finalize(cfg);
  log << csv.str();
  (void)all_pass;  // verdicts are carried by the artifacts
  return kExitOk;
}

}  // namespace levyrd
