#pragma once

// Flat scenario configuration: one `key = value` per line, '#' starts a
// comment, lists are comma separated. Keys:
//
//   scenario              named base scenario (two_node, partial_obs_3node, ...)
//   scenario.seed         seed for every random ingredient of the base scenario
//   scenario.name         label written to summaries (defaults to the base name or "custom")
//   topology.file         path to an "N E" + edge-list file, relative to the config
//   topology.nodes        N (inline topology)
//   topology.edges        1-based pairs "1-2, 2-3, ..."
//   ensemble.dim          M
//   ensemble.truth        M values; omitted -> seeded unit-norm random vector
//   ensemble.covariance.all / ensemble.covariance.<k>   M*M values, row major
//   ensemble.noise_var    one value (all agents) or N values
//   ensemble.distribution gaussian | rademacher
//   combination           metropolis | explicit
//   combination.weights   N*N values, row major (a_{lk} at row l, column k)
//   mu                    step size for algorithms that do not set their own
//   algorithm.<name>.kind noncoop | diffusion_atc | consensus | primal_dual
//   algorithm.<name>.mu / .eta / .theta / .allow_linked_override
//   run.horizon / run.trials / run.seed / run.tail_window / run.initial / run.threads
//   outputs.dir
//
// When any algorithm.* key is present the listed algorithms replace the
// scenario defaults, in order of first appearance.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdnet/error.hpp"
#include "pdnet/graph.hpp"
#include "pdnet/montecarlo.hpp"
#include "pdnet/scenarios.hpp"
#include "pdnet/strategies.hpp"

namespace pdnet {

struct ConfigFile {
  std::vector<std::pair<std::string, std::string>> entries;  ///< in file order
  std::filesystem::path base_dir;                            ///< for relative paths

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
  bool has(std::string_view key) const { return get(key).has_value(); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InvalidArgument("config: '" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return value;
}

inline std::vector<double> parse_doubles(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

inline long long parse_integer(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  long long value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument("config: '" + std::string(key) + "' expects an integer, got '" + s + "'");
  }
  return value;
}

inline int parse_int_in(std::string_view key, std::string_view text, long long lo, long long hi) {
  const long long v = parse_integer(key, text);
  if (v < lo || v > hi) throw InvalidArgument("config: '" + std::string(key) + "' out of range");
  return static_cast<int>(v);
}

inline std::uint64_t parse_seed(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument("config: '" + std::string(key) + "' expects a nonnegative integer");
  }
  return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw InvalidArgument("config: '" + std::string(key) + "' expects true or false");
}

inline Matrix square_from_list(std::string_view key, const std::vector<double>& values, Index size) {
  if (static_cast<Index>(values.size()) != size * size) {
    throw InvalidArgument("config: '" + std::string(key) + "' needs " + std::to_string(size * size) + " values");
  }
  Matrix m(size, size);
  for (Index r = 0; r < size; ++r)
    for (Index c = 0; c < size; ++c) m(r, c) = values[static_cast<std::size_t>(r * size + c)];
  return m;
}

inline std::vector<Edge> parse_edges(std::string_view text) {
  std::vector<Edge> edges;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw InvalidArgument("config: edge '" + item + "' must look like k-l");
    const auto k = parse_integer("topology.edges", item.substr(0, dash));
    const auto l = parse_integer("topology.edges", item.substr(dash + 1));
    if (k < 1 || l < 1 || k > 1'000'000 || l > 1'000'000) {
      throw InvalidArgument("config: edge '" + item + "' uses invalid node index");
    }
    edges.push_back({static_cast<int>(k - 1), static_cast<int>(l - 1)});
  }
  return edges;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  return std::string(buf, ptr);
}

inline std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

inline std::string join_matrix(const Matrix& m) {
  std::vector<double> values;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  return join(values);
}

inline bool valid_algorithm_name(std::string_view name) {
  if (name.empty()) return false;
  for (char ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                    ch == '.' || ch == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

inline ConfigFile parse_config(std::istream& in, std::filesystem::path base_dir = {}) {
  ConfigFile cfg;
  cfg.base_dir = std::move(base_dir);
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = detail::trim(std::string_view(body).substr(0, eq));
    std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    cfg.entries.emplace_back(std::move(key), std::move(value));
  }
  return cfg;
}

inline ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

struct ResolvedConfig {
  Scenario scenario;
  std::optional<std::string> output_dir;
};

/// Builds a validated scenario from a parsed config. Every failure is an
/// InvalidArgument so callers can report a configuration error before any
/// output is produced.
inline ResolvedConfig resolve_config(const ConfigFile& cfg) {
  using namespace detail;
  static const std::set<std::string> known{
      "scenario",          "scenario.seed",     "scenario.name",     "topology.file",         "topology.nodes", "topology.edges",
      "ensemble.dim",      "ensemble.truth",    "ensemble.covariance.all", "ensemble.noise_var",
      "ensemble.distribution", "combination",   "combination.weights",   "mu",             "run.horizon",
      "run.trials",        "run.seed",          "run.tail_window",       "run.initial",    "run.threads",
      "outputs.dir"};
  static const std::set<std::string> algorithm_fields{"kind", "mu", "eta", "theta", "allow_linked_override"};

  std::vector<std::string> algorithm_order;
  std::map<std::string, std::map<std::string, std::string>> algorithm_keys;
  std::map<int, std::string> covariance_keys;
  for (const auto& [key, value] : cfg.entries) {
    if (known.contains(key)) continue;
    if (key.starts_with("algorithm.")) {
      const auto last = key.rfind('.');
      const std::string name = key.substr(10, last > 10 ? last - 10 : 0);
      const std::string field = key.substr(last + 1);
      if (last <= 10 || !valid_algorithm_name(name) || !algorithm_fields.contains(field)) {
        throw InvalidArgument("config: invalid algorithm key '" + key + "'");
      }
      if (!algorithm_keys.contains(name)) algorithm_order.push_back(name);
      algorithm_keys[name][field] = value;
      continue;
    }
    if (key.starts_with("ensemble.covariance.")) {
      const int k = parse_int_in(key, key.substr(20), 1, 1'000'000);
      covariance_keys[k] = value;
      continue;
    }
    throw InvalidArgument("config: unknown key '" + key + "'");
  }

  const std::uint64_t seed = cfg.has("scenario.seed") ? parse_seed("scenario.seed", *cfg.get("scenario.seed"))
                                                       : kDefaultScenarioSeed;
  std::optional<Scenario> base;
  if (auto name = cfg.get("scenario")) base = scenario_library(*name, seed);

  Scenario s = base ? *base : Scenario{};
  s.seed = seed;
  if (!base) {
    s.name = "custom";
    s.run.seed = seed;
  }
  if (auto label = cfg.get("scenario.name")) {
    if (label->empty()) throw InvalidArgument("config: scenario.name must not be empty");
    s.name = *label;
  }

  // Topology.
  const bool inline_topology = cfg.has("topology.nodes") || cfg.has("topology.edges");
  if (cfg.has("topology.file") && inline_topology) {
    throw InvalidArgument("config: give either topology.file or topology.nodes/edges, not both");
  }
  bool topology_changed = false;
  if (auto file = cfg.get("topology.file")) {
    std::filesystem::path p(*file);
    if (p.is_relative()) p = cfg.base_dir / p;
    s.topology = load_topology(p.string());
    topology_changed = true;
  } else if (inline_topology) {
    if (!cfg.has("topology.nodes")) throw InvalidArgument("config: topology.edges requires topology.nodes");
    const int n = parse_int_in("topology.nodes", *cfg.get("topology.nodes"), 1, 1'000'000);
    s.topology = build_topology(n, parse_edges(cfg.get("topology.edges").value_or("")));
    topology_changed = true;
  } else if (!base) {
    throw InvalidArgument("config: no topology (set scenario, topology.file or topology.nodes)");
  }
  const int n = s.topology.num_nodes();

  // Ensemble.
  const bool ensemble_keys = cfg.has("ensemble.dim") || cfg.has("ensemble.truth") ||
                             cfg.has("ensemble.covariance.all") || !covariance_keys.empty() ||
                             cfg.has("ensemble.noise_var") || cfg.has("ensemble.distribution");
  if (ensemble_keys || topology_changed || !base) {
    Index m = 0;
    if (auto dim = cfg.get("ensemble.dim")) {
      m = parse_int_in("ensemble.dim", *dim, 1, 10'000);
    } else if (base) {
      m = base->ensemble.dim();
    } else {
      throw InvalidArgument("config: ensemble.dim is required");
    }
    const bool same_shape = base && base->ensemble.dim() == m && base->ensemble.num_agents() == n;

    Vector truth;
    if (auto t = cfg.get("ensemble.truth")) {
      const auto values = parse_doubles("ensemble.truth", *t);
      if (static_cast<Index>(values.size()) != m) throw InvalidArgument("config: ensemble.truth needs M values");
      truth = Eigen::Map<const Vector>(values.data(), m);
    } else if (base && base->ensemble.dim() == m) {
      truth = base->ensemble.truth();
    } else {
      RandomStream truth_rng(seed, detail::kTruthStream);
      truth = random_unit_vector(m, truth_rng);
    }

    std::vector<Matrix> covs(static_cast<std::size_t>(n));
    if (auto all = cfg.get("ensemble.covariance.all")) {
      const Matrix r = square_from_list("ensemble.covariance.all", parse_doubles("ensemble.covariance.all", *all), m);
      for (auto& c : covs) c = r;
    } else if (same_shape) {
      covs = base->ensemble.covariances();
    } else if (covariance_keys.empty()) {
      throw InvalidArgument("config: ensemble covariances are required");
    }
    for (const auto& [k, text] : covariance_keys) {
      if (k > n) throw InvalidArgument("config: ensemble.covariance." + std::to_string(k) + " exceeds N");
      const std::string key = "ensemble.covariance." + std::to_string(k);
      covs[static_cast<std::size_t>(k - 1)] = square_from_list(key, parse_doubles(key, text), m);
    }
    for (std::size_t k = 0; k < covs.size(); ++k) {
      if (covs[k].size() == 0) {
        throw InvalidArgument("config: missing covariance for agent " + std::to_string(k + 1));
      }
    }

    std::vector<double> noise;
    if (auto nv = cfg.get("ensemble.noise_var")) {
      noise = parse_doubles("ensemble.noise_var", *nv);
      if (noise.size() == 1) noise.assign(static_cast<std::size_t>(n), noise.front());
      if (noise.size() != static_cast<std::size_t>(n)) {
        throw InvalidArgument("config: ensemble.noise_var needs 1 or N values");
      }
    } else if (same_shape) {
      noise = base->ensemble.noise_vars();
    } else {
      throw InvalidArgument("config: ensemble.noise_var is required");
    }

    EnsembleOptions opts;
    if (auto d = cfg.get("ensemble.distribution")) {
      opts.distribution = parse_distribution(*d);
    } else if (base) {
      opts.distribution = base->ensemble.distribution();
    }
    s.ensemble = make_ensemble(std::move(truth), std::move(covs), std::move(noise), opts);
  }

  // Combination matrix.
  const std::string combination = cfg.get("combination").value_or(cfg.has("combination.weights") ? "explicit" : "");
  if (combination == "explicit") {
    auto w = cfg.get("combination.weights");
    if (!w) throw InvalidArgument("config: combination = explicit requires combination.weights");
    s.combination = CombinationMatrix::from_weights(
        s.topology, square_from_list("combination.weights", parse_doubles("combination.weights", *w), n));
  } else if (combination == "metropolis" || (combination.empty() && (topology_changed || !base))) {
    if (s.topology.connected()) s.combination = metropolis_weights(s.topology);
  } else if (!combination.empty()) {
    throw InvalidArgument("config: combination must be metropolis or explicit");
  }
  if (cfg.has("combination.weights") && combination != "explicit") {
    throw InvalidArgument("config: combination.weights given but combination is not explicit");
  }

  // Algorithms.
  if (auto mu = cfg.get("mu")) {
    s.mu = parse_double("mu", *mu);
    for (auto& a : s.algorithms) a.mu = s.mu;
  }
  if (!algorithm_order.empty()) {
    s.algorithms.clear();
    for (const auto& name : algorithm_order) {
      const auto& fields = algorithm_keys[name];
      const std::string prefix = "algorithm." + name + ".";
      AlgorithmConfig a;
      a.label = name;
      if (!fields.contains("kind")) throw InvalidArgument("config: " + prefix + "kind is required");
      a.kind = parse_algorithm_kind(fields.at("kind"));
      if (fields.contains("mu")) {
        a.mu = parse_double(prefix + "mu", fields.at("mu"));
      } else if (cfg.has("mu") || base) {
        a.mu = s.mu;
      } else {
        throw InvalidArgument("config: " + prefix + "mu is required (or set a top-level mu)");
      }
      if (fields.contains("eta")) a.eta = parse_double(prefix + "eta", fields.at("eta"));
      if (fields.contains("theta")) a.theta = parse_double(prefix + "theta", fields.at("theta"));
      if (fields.contains("allow_linked_override")) {
        a.allow_linked_override = parse_bool(prefix + "allow_linked_override", fields.at("allow_linked_override"));
      }
      if (a.kind != AlgorithmKind::primal_dual && (fields.contains("eta") || fields.contains("theta"))) {
        throw InvalidArgument("config: eta/theta only apply to primal_dual (" + name + ")");
      }
      if (a.kind == AlgorithmKind::diffusion_atc || a.kind == AlgorithmKind::consensus) {
        if (s.combination.size() != n) {
          throw InvalidArgument("config: " + name + " needs a combination matrix (connected topology)");
        }
        a.combination = s.combination;
      }
      s.algorithms.push_back(std::move(a));
    }
  }
  if (s.algorithms.empty()) throw InvalidArgument("config: at least one algorithm is required");
  for (auto& a : s.algorithms) {
    if ((a.kind == AlgorithmKind::diffusion_atc || a.kind == AlgorithmKind::consensus) && s.combination.size() == n) {
      a.combination = s.combination;
    }
    a.validate(n);
    if (a.kind == AlgorithmKind::primal_dual && (n < 2 || !s.topology.connected())) {
      throw InvalidArgument("config: primal_dual algorithm '" + a.label + "' needs a connected topology");
    }
  }
  if (s.ensemble.num_agents() != n) throw InvalidArgument("config: ensemble and topology sizes differ");

  // Run protocol.
  if (auto v = cfg.get("run.horizon")) s.run.horizon = parse_int_in("run.horizon", *v, 1, 1'000'000'000);
  if (auto v = cfg.get("run.trials")) s.run.trials = parse_int_in("run.trials", *v, 1, 100'000'000);
  if (auto v = cfg.get("run.seed")) s.run.seed = parse_seed("run.seed", *v);
  else if (cfg.has("scenario.seed")) s.run.seed = seed;
  if (auto v = cfg.get("run.tail_window")) s.run.tail_window = parse_int_in("run.tail_window", *v, 0, 1'000'000'000);
  if (auto v = cfg.get("run.initial")) s.run.initial = parse_initial_condition(detail::trim(*v));
  if (auto v = cfg.get("run.threads")) s.run.threads = parse_int_in("run.threads", *v, 0, 4096);
  s.run.validate();

  ResolvedConfig out{std::move(s), cfg.get("outputs.dir")};
  return out;
}

inline ResolvedConfig load_resolved_config(const std::filesystem::path& path) {
  return resolve_config(load_config(path));
}

/// Writes a self-contained config (no scenario reference) that resolves to
/// exactly the same scenario; every number is printed with round-trip precision.
inline std::string emit_config(const Scenario& s, const std::optional<std::string>& output_dir = std::nullopt) {
  using detail::format_double;
  std::ostringstream out;
  out << "# generated from scenario " << s.name << " (seed " << s.seed << ")\n";
  out << "scenario.name = " << s.name << "\n";
  out << "scenario.seed = " << s.seed << "\n\n";
  out << "topology.nodes = " << s.topology.num_nodes() << "\n";
  out << "topology.edges = ";
  for (std::size_t e = 0; e < s.topology.edges().size(); ++e) {
    const auto& edge = s.topology.edges()[e];
    out << (e ? ", " : "") << edge.lower + 1 << '-' << edge.upper + 1;
  }
  out << "\n\n";
  const auto& ens = s.ensemble;
  out << "ensemble.dim = " << ens.dim() << "\n";
  out << "ensemble.truth = " << detail::join({ens.truth().data(), ens.truth().data() + ens.dim()}) << "\n";
  if (ens.common_covariance()) {
    out << "ensemble.covariance.all = " << detail::join_matrix(ens.covariance(0)) << "\n";
  } else {
    for (int k = 0; k < ens.num_agents(); ++k) {
      out << "ensemble.covariance." << k + 1 << " = " << detail::join_matrix(ens.covariance(k)) << "\n";
    }
  }
  out << "ensemble.noise_var = " << detail::join(ens.noise_vars()) << "\n";
  out << "ensemble.distribution = " << to_string(ens.distribution()) << "\n\n";
  if (s.combination.size() == s.topology.num_nodes()) {
    out << "combination = explicit\n";
    out << "combination.weights = " << detail::join_matrix(s.combination.weights()) << "\n\n";
  }
  out << "mu = " << format_double(s.mu) << "\n";
  for (const auto& a : s.algorithms) {
    const std::string p = "algorithm." + a.label + ".";
    out << p << "kind = " << to_string(a.kind) << "\n";
    out << p << "mu = " << format_double(a.mu) << "\n";
    if (a.kind == AlgorithmKind::primal_dual) {
      if (a.theta) {
        out << p << "theta = " << format_double(*a.theta) << "\n";
      } else {
        out << p << "eta = " << format_double(a.eta) << "\n";
      }
      if (a.allow_linked_override) out << p << "allow_linked_override = true\n";
    }
  }
  out << "\nrun.horizon = " << s.run.horizon << "\n";
  out << "run.trials = " << s.run.trials << "\n";
  out << "run.seed = " << s.run.seed << "\n";
  out << "run.tail_window = " << s.run.effective_tail() << "\n";
  out << "run.initial = " << to_string(s.run.initial) << "\n";
  if (s.run.threads > 0) out << "run.threads = " << s.run.threads << "\n";
  if (output_dir) out << "outputs.dir = " << *output_dir << "\n";
  return out.str();
}

}  // namespace pdnet
