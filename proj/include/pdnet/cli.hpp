#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdnet/analysis.hpp"
#include "pdnet/config.hpp"
#include "pdnet/error.hpp"
#include "pdnet/montecarlo.hpp"
#include "pdnet/scenarios.hpp"

namespace pdnet {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum ExitCode : int { kExitOk = 0, kExitConfigError = 2, kExitNumericalError = 3 };

inline constexpr const char* kOutDirEnv = "PDNET_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "pdnet_out";

/// --out flag, then the config's outputs.dir, then $PDNET_OUT_DIR, then ./pdnet_out.
inline fs::path resolve_output_dir(const std::optional<std::string>& flag, const std::optional<std::string>& config) {
  if (flag && !flag->empty()) return *flag;
  if (config && !config->empty()) return *config;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kDefaultOutDir;
}

// JSON has no infinity; non-finite numbers are written as the strings "inf",
// "-inf" or "nan".
inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

template <class T>
Json json_optional(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) {
    return json_number(*v);
  } else {
    return *v;
  }
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string learning_curve_csv(const LearningCurve& curve) {
  std::string out = "iteration,msd,msd_db\n";
  out.reserve(curve.msd.size() * 48);
  for (std::size_t i = 0; i < curve.msd.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += csv_number(curve.msd[i]);
    out += ',';
    out += csv_number(to_db(curve.msd[i]));
    out += '\n';
  }
  return out;
}

/// Theory prediction for a configured strategy, or nothing when the formula's
/// preconditions fail (e.g. H + eta L singular).
inline std::optional<double> theory_for(const AlgorithmConfig& a, const Scenario& s) {
  try {
    return msd_theory(s.ensemble, s.topology, a.mu, a.effective_eta(), theory_method(a));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct SimulationResult {
  std::vector<LearningCurve> curves;
  std::vector<std::optional<double>> theory;
};

inline SimulationResult simulate(const Scenario& s) {
  SimulationResult r;
  r.curves = monte_carlo(s.run, s.ensemble, s.topology, s.algorithms);
  for (const auto& a : s.algorithms) r.theory.push_back(theory_for(a, s));
  return r;
}

inline Json summary_json(const Scenario& s, const SimulationResult& r) {
  Json algs = Json::array();
  for (std::size_t i = 0; i < r.curves.size(); ++i) {
    const auto& a = s.algorithms[i];
    const auto& c = r.curves[i];
    Json agents = Json::array();
    for (Index k = 0; k < c.per_agent_msd.size(); ++k) agents.push_back(json_number(to_db(c.per_agent_msd(k))));
    algs.push_back({
        {"label", a.label},
        {"kind", std::string(to_string(a.kind))},
        {"family", a.family()},
        {"mu", a.mu},
        {"eta", a.effective_eta()},
        {"steady_state_msd", json_number(c.steady_state_msd)},
        {"steady_state_msd_db", json_number(to_db(c.steady_state_msd))},
        {"diverged", c.diverged},
        {"diverged_trials", c.diverged_trials},
        {"per_agent_msd_db", agents},
        {"theory_msd", r.theory[i] ? json_number(*r.theory[i]) : Json(nullptr)},
        {"theory_msd_db", r.theory[i] ? json_number(to_db(*r.theory[i])) : Json(nullptr)},
        {"csv", a.label + ".csv"},
    });
  }
  return {
      {"scenario", s.name},
      {"scenario_seed", s.seed},
      {"num_agents", s.topology.num_nodes()},
      {"dim", s.ensemble.dim()},
      {"horizon", s.run.horizon},
      {"trials", s.run.trials},
      {"run_seed", s.run.seed},
      {"tail_window", s.run.effective_tail()},
      {"initial", std::string(to_string(s.run.initial))},
      {"algorithms", algs},
  };
}

inline std::string overlay_csv(const Scenario& s, const SimulationResult& r) {
  std::string out = "algorithm,steady_state_msd_db,theory_msd_db,diverged\n";
  for (std::size_t i = 0; i < r.curves.size(); ++i) {
    out += s.algorithms[i].label + "," + csv_number(to_db(r.curves[i].steady_state_msd)) + "," +
           (r.theory[i] ? csv_number(to_db(*r.theory[i])) : std::string("nan")) + "," +
           (r.curves[i].diverged ? "true" : "false") + "\n";
  }
  return out;
}

inline void write_simulation(const fs::path& dir, const Scenario& s, const SimulationResult& r) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < r.curves.size(); ++i) {
    write_text(dir / (s.algorithms[i].label + ".csv"), learning_curve_csv(r.curves[i]));
  }
  write_text(dir / "overlay.csv", overlay_csv(s, r));
  write_text(dir / "summary.json", summary_json(s, r).dump(2) + "\n");
}

inline Json stability_json(const StabilityReport& r) {
  return {
      {"label", r.label},
      {"family", r.family},
      {"mu", r.mu},
      {"eta", r.eta},
      {"hurwitz", json_optional(r.hurwitz)},
      {"hurwitz_class", json_optional(r.hurwitz_class)},
      {"mu_bar", json_optional(r.mu_bar)},
      {"eta_bar", json_optional(r.eta_bar)},
      {"rho_b_prime", json_number(r.rho_b_prime)},
      {"mean_stable", r.mean_stable},
      {"topo_bound_large_eta", json_optional(r.topo_bound_large_eta)},
      {"diffusion_mu_bound", json_optional(r.diffusion_mu_bound)},
  };
}

inline Json stability_document(const Scenario& s) {
  Json reports = Json::array();
  for (const auto& a : s.algorithms) reports.push_back(stability_json(stability_report(a, s.ensemble, s.topology)));
  return {{"scenario", s.name}, {"scenario_seed", s.seed}, {"reports", reports}};
}

/// Runs `body`, mapping configuration problems to exit code 2 and numerical
/// failures to exit code 3.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumericalError;
  }
}

inline void print_summary(std::ostream& out, const Scenario& s, const SimulationResult& r) {
  for (std::size_t i = 0; i < r.curves.size(); ++i) {
    char line[160];
    const double sim = to_db(r.curves[i].steady_state_msd);
    if (r.theory[i]) {
      std::snprintf(line, sizeof line, "  %-16s steady %9.3f dB   theory %9.3f dB%s\n", s.algorithms[i].label.c_str(),
                    sim, to_db(*r.theory[i]), r.curves[i].diverged ? "   DIVERGED" : "");
    } else {
      std::snprintf(line, sizeof line, "  %-16s steady %9.3f dB   theory       n/a%s\n",
                    s.algorithms[i].label.c_str(), sim, r.curves[i].diverged ? "   DIVERGED" : "");
    }
    out << line;
  }
}

inline int cmd_simulate(const fs::path& config_path, const std::optional<std::string>& out_flag, std::ostream& out,
                        std::ostream& err) {
  return guarded(err, [&] {
    const ResolvedConfig cfg = load_resolved_config(config_path);
    const fs::path dir = resolve_output_dir(out_flag, cfg.output_dir);
    const SimulationResult r = simulate(cfg.scenario);
    write_simulation(dir, cfg.scenario, r);
    out << "simulate " << cfg.scenario.name << " -> " << dir.string() << "\n";
    print_summary(out, cfg.scenario, r);
    return static_cast<int>(kExitOk);
  });
}

inline int cmd_stability(const fs::path& config_path, const std::optional<std::string>& out_flag, std::ostream& out,
                         std::ostream& err) {
  return guarded(err, [&] {
    const ResolvedConfig cfg = load_resolved_config(config_path);
    const fs::path dir = resolve_output_dir(out_flag, cfg.output_dir);
    const Json doc = stability_document(cfg.scenario);
    fs::create_directories(dir);
    write_text(dir / "stability.json", doc.dump(2) + "\n");
    out << doc.dump(2) << "\n";
    return static_cast<int>(kExitOk);
  });
}

struct ReproduceOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> horizon;
  std::optional<std::string> out;
  bool emit_config = false;
};

inline const std::vector<std::string>& reproduce_cases() {
  static const std::vector<std::string> cases{"fig2", "eta_sweep", "bench_n20", "partial_obs"};
  return cases;
}

inline void apply_overrides(Scenario& s, const ReproduceOptions& o) {
  if (o.seed) s.run.seed = *o.seed;
  if (o.trials) s.run.trials = *o.trials;
  if (o.horizon) {
    s.run.horizon = *o.horizon;
    s.run.tail_window = 0;
  }
  s.run.validate();
}

inline void run_case(const fs::path& dir, Scenario s, const ReproduceOptions& o, std::ostream& out) {
  apply_overrides(s, o);
  fs::create_directories(dir);
  if (o.emit_config) write_text(dir / "config.txt", emit_config(s));
  const SimulationResult r = simulate(s);
  write_simulation(dir, s, r);
  out << s.name << " -> " << dir.string() << "\n";
  print_summary(out, s, r);
}

/// Step sizes of the three Fig. 2 panels and their directory names.
inline const std::vector<std::pair<double, std::string>>& fig2_step_sizes() {
  static const std::vector<std::pair<double, std::string>> grid{
      {1.1, "mu_1.1"}, {0.75, "mu_0.75"}, {3.0 / 64.0, "mu_0.046875"}};
  return grid;
}

/// Regularization grid of the eta sweep: 0 plus 41 log-spaced values in [1e-2, 1e2].
inline std::vector<double> eta_sweep_grid() {
  std::vector<double> etas{0.0};
  for (int i = 0; i <= 40; ++i) etas.push_back(std::pow(10.0, -2.0 + 0.1 * i));
  return etas;
}

inline std::string eta_sweep_csv(const Scenario& s) {
  const double mu = s.mu;
  const auto db = [&](MsdMethod m, double eta) { return csv_number(to_db(msd_theory(s.ensemble, s.topology, mu, eta, m))); };
  const std::string diffusion = db(MsdMethod::diffusion, 0.0);
  const std::string consensus = db(MsdMethod::consensus, 0.0);
  const std::string noncoop = db(MsdMethod::noncoop, 0.0);
  const std::string ah = db(MsdMethod::ah, 0.0);
  std::string out = "eta,al_msd_db,al_large_eta_msd_db,diffusion_msd_db,consensus_msd_db,noncoop_msd_db,ah_msd_db\n";
  for (double eta : eta_sweep_grid()) {
    out += csv_number(eta) + "," + db(MsdMethod::primal_dual, eta) + "," +
           (eta > 0.0 ? db(MsdMethod::al_large_eta, eta) : std::string("nan")) + "," + diffusion + "," + consensus +
           "," + noncoop + "," + ah + "\n";
  }
  return out;
}

inline int cmd_reproduce(const std::string& case_id, const ReproduceOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path root = resolve_output_dir(o.out, std::nullopt);
    const std::uint64_t seed = o.seed.value_or(kDefaultScenarioSeed);
    if (o.trials && *o.trials < 1) throw InvalidArgument("--trials must be at least 1");
    if (o.horizon && *o.horizon < 1) throw InvalidArgument("--horizon must be at least 1");

    if (case_id == "fig2") {
      for (const auto& [mu, name] : fig2_step_sizes()) {
        Scenario s = scenario_library("two_node", seed);
        s.mu = mu;
        for (auto& a : s.algorithms) a.mu = mu;
        run_case(root / name, std::move(s), o, out);
      }
    } else if (case_id == "eta_sweep") {
      Scenario s = scenario_library("eta_sweep_n100", seed);
      apply_overrides(s, o);
      fs::create_directories(root);
      if (o.emit_config) write_text(root / "config.txt", emit_config(s));
      write_text(root / "eta_sweep.csv", eta_sweep_csv(s));
      out << "eta_sweep -> " << (root / "eta_sweep.csv").string() << "\n";
    } else if (case_id == "bench_n20") {
      run_case(root, scenario_library("bench_n20", seed), o, out);
    } else if (case_id == "partial_obs") {
      run_case(root, scenario_library("partial_obs_3node", seed), o, out);
    } else {
      throw InvalidArgument("unknown reproduce case '" + case_id + "' (fig2, eta_sweep, bench_n20, partial_obs)");
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace pdnet
