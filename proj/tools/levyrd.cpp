// Command-line front end: simulate | ladder | gate | diagnose | noise-sample.
// Configs are TOML files; LEVYRD_THREADS caps replica parallelism.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "levyrd/runner.hpp"

namespace {

levyrd::RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw levyrd::ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return levyrd::RunConfig::from_toml(ss.str());
}

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long replicas = 0;
  bool replicas_set = false;
  std::string out;
  bool gate_required = false;

  levyrd::RunOverrides overrides() const {
    levyrd::RunOverrides ov;
    if (seed_set) ov.seed = seed;
    if (replicas_set) ov.replicas = replicas;
    if (!out.empty()) ov.out = out;
    ov.gate_required = gate_required;
    return ov;
  }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_gate = true) {
  cmd->add_option("--config", args.config, "run config (TOML)")->required();
  cmd->add_option("--seed", args.seed, "override mc.base_seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--replicas", args.replicas, "override mc.replicas")
      ->each([&](const std::string&) { args.replicas_set = true; });
  cmd->add_option("--out", args.out, "override outputs.directory");
  if (with_gate)
    cmd->add_flag("--gate", args.gate_required,
                  "validate the [gate] block before simulating");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion SPDE simulator driven by Poisson random measures"};
  app.require_subcommand(1);

  CommonArgs sim_args, ladder_args, gate_args, diag_args, noise_args;
  std::vector<int> ladder_levels;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the grid scheme");
  add_common(sim, sim_args);

  auto* ladder = app.add_subcommand("ladder", "shared-noise refinement ladder");
  add_common(ladder, ladder_args, false);
  ladder->add_option("--levels", ladder_levels, "grid levels (>= 3)");

  auto* gate = app.add_subcommand("gate", "evaluate the theorem hypothesis gate");
  add_common(gate, gate_args, false);

  auto* diag = app.add_subcommand("diagnose", "estimate/check battery on a config");
  add_common(diag, diag_args, false);

  auto* noise = app.add_subcommand("noise-sample", "sample one noise realization");
  add_common(noise, noise_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return levyrd::run_simulate(load_config(sim_args.config), sim_args.overrides());
    if (ladder->parsed())
      return levyrd::run_ladder(load_config(ladder_args.config),
                                ladder_args.overrides(), ladder_levels);
    if (gate->parsed())
      return levyrd::run_gate(load_config(gate_args.config), gate_args.overrides());
    if (diag->parsed())
      return levyrd::run_diagnose(load_config(diag_args.config), diag_args.overrides());
    if (noise->parsed())
      return levyrd::run_noise_sample(load_config(noise_args.config),
                                      noise_args.overrides());
  } catch (const levyrd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return levyrd::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return levyrd::kExitConfigError;
  }
  return levyrd::kExitOk;
}
