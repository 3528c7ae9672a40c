// Command-line driver: simulate / stability / reproduce.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pdnet/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distributed adaptive estimation over networks: simulation and stability theory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  auto* simulate = app.add_subcommand("simulate", "Run Monte Carlo trials for every algorithm in a config");
  simulate->add_option("config", config_path, "Scenario config file")->required();
  simulate->add_option("--out", out_dir, "Output directory");

  auto* stability = app.add_subcommand("stability", "Write stability reports for every algorithm in a config");
  stability->add_option("config", config_path, "Scenario config file")->required();
  stability->add_option("--out", out_dir, "Output directory");

  std::string case_id;
  std::uint64_t seed = 0;
  int trials = 0;
  int horizon = 0;
  bool emit = false;
  auto* reproduce = app.add_subcommand("reproduce", "Run a canonical experiment grid with theory overlays");
  reproduce->add_option("case", case_id, "fig2 | eta_sweep | bench_n20 | partial_obs")->required();
  auto* seed_opt = reproduce->add_option("--seed", seed, "Scenario and run seed");
  auto* trials_opt = reproduce->add_option("--trials", trials, "Monte Carlo trials");
  auto* horizon_opt = reproduce->add_option("--horizon", horizon, "Iterations per trial");
  reproduce->add_option("--out", out_dir, "Output directory");
  reproduce->add_flag("--emit-config", emit, "Also write the resolved config next to the outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pdnet::kExitConfigError;
  }

  const std::optional<std::string> out = out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
  if (*simulate) return pdnet::cmd_simulate(config_path, out, std::cout, std::cerr);
  if (*stability) return pdnet::cmd_stability(config_path, out, std::cout, std::cerr);

  pdnet::ReproduceOptions opts;
  if (*seed_opt) opts.seed = seed;
  if (*trials_opt) opts.trials = trials;
  if (*horizon_opt) opts.horizon = horizon;
  opts.out = out;
  opts.emit_config = emit;
  return pdnet::cmd_reproduce(case_id, opts, std::cout, std::cerr);
}
