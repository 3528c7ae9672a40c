#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdnet/data_model.hpp"
#include "pdnet/error.hpp"
#include "pdnet/graph.hpp"
#include "pdnet/montecarlo.hpp"
#include "pdnet/strategies.hpp"

namespace pdnet {

/// A fully specified experiment: network, data model, default strategies and
/// run protocol.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  NetworkTopology topology;
  AgentEnsemble ensemble;
  CombinationMatrix combination;
  double mu = 0.0;
  std::vector<AlgorithmConfig> algorithms;
  RunSpec run;
};

inline constexpr std::uint64_t kDefaultScenarioSeed = 20150901;

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"two_node", "partial_obs_3node", "bench_n20", "eta_sweep_n100"};
  return names;
}

namespace detail {

// Independent sub-streams of the scenario seed, one per random ingredient.
enum ScenarioStream : std::uint64_t { kTruthStream = 1u << 20, kGraphStream, kCovStream, kNoiseStream };

inline AlgorithmConfig make_config(AlgorithmKind kind, double mu, std::string label, double eta = 0.0,
                                   const std::optional<CombinationMatrix>& a = std::nullopt) {
  AlgorithmConfig c;
  c.kind = kind;
  c.mu = mu;
  c.eta = eta;
  c.label = std::move(label);
  if (kind == AlgorithmKind::diffusion_atc || kind == AlgorithmKind::consensus) c.combination = a;
  return c;
}

/// Common covariance with eigenvalues 1 + x_m, x_m ~ U[0,1], in a random basis.
inline Matrix random_common_covariance(Index m, RandomStream& rng) {
  Vector eig(m);
  for (Index j = 0; j < m; ++j) eig(j) = 1.0 + rng.uniform(0.0, 1.0);
  const Matrix q = random_orthogonal(m, rng);
  Matrix r = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (r + r.transpose());
}

inline Scenario common_covariance_network(std::string name, std::uint64_t seed, int n, Index m, double edge_prob,
                                          double mu) {
  RandomStream graph_rng(seed, kGraphStream);
  RandomStream cov_rng(seed, kCovStream);
  RandomStream noise_rng(seed, kNoiseStream);
  RandomStream truth_rng(seed, kTruthStream);
  Scenario s{.name = std::move(name),
             .seed = seed,
             .topology = random_connected_topology(n, edge_prob, graph_rng.engine()),
             .ensemble = {},
             .combination = {},
             .mu = mu,
             .algorithms = {},
             .run = {}};
  const Matrix r = random_common_covariance(m, cov_rng);
  std::vector<double> noise;
  for (int k = 0; k < n; ++k) noise.push_back(noise_rng.uniform(0.001, 0.01));
  s.ensemble = make_ensemble(random_unit_vector(m, truth_rng), std::vector<Matrix>(static_cast<std::size_t>(n), r),
                             std::move(noise));
  s.combination = metropolis_weights(s.topology);
  return s;
}

inline void add_standard_algorithms(Scenario& s, const std::vector<double>& al_etas) {
  const auto& a = s.combination;
  s.algorithms = {make_config(AlgorithmKind::noncoop, s.mu, "noncoop"),
                  make_config(AlgorithmKind::diffusion_atc, s.mu, "diffusion", 0.0, a),
                  make_config(AlgorithmKind::consensus, s.mu, "consensus", 0.0, a),
                  make_config(AlgorithmKind::primal_dual, s.mu, "ah", 0.0)};
  for (double eta : al_etas) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "al_eta%g", eta);
    s.algorithms.push_back(make_config(AlgorithmKind::primal_dual, s.mu, buf, eta));
  }
}

}  // namespace detail

/// Named scenarios. Every random ingredient (truth vector, graph, covariance
/// basis, noise levels) is drawn from `seed`.
///
///  two_node           N=2, M=1, R_u=1, noise 0.1, mu=3/64, AL eta=20. Regressors
///                     are +-1 so u^2 = 1 exactly; A = [[3/4,1/4],[1/4,3/4]].
///  partial_obs_3node  triangle, R_{u,k} = e_k e_k^T, noise 0.01, mu=0.02, AL eta=1,
///                     random (non-consensus) starting points.
///  bench_n20          N=20, M=5, random graph (edge prob 0.5), common R_u with eigenvalues 1+U[0,1],
///                     noise U[0.001,0.01], mu=0.01, AL eta in {0.2, 2}.
///  eta_sweep_n100     N=100 version of bench_n20 with mu=1e-4.
inline Scenario scenario_library(std::string_view name, std::uint64_t seed = kDefaultScenarioSeed) {
  using detail::make_config;
  RandomStream truth_rng(seed, detail::kTruthStream);

  if (name == "two_node") {
    auto topology = build_topology(2, {{0, 1}});
    Matrix a(2, 2);
    a << 0.75, 0.25, 0.25, 0.75;
    EnsembleOptions opts;
    opts.distribution = RegressorDistribution::rademacher;
    Scenario s{.name = "two_node",
               .seed = seed,
               .topology = topology,
               .ensemble = make_ensemble(random_unit_vector(1, truth_rng), {Matrix::Ones(1, 1), Matrix::Ones(1, 1)},
                                         {0.1, 0.1}, opts),
               .combination = CombinationMatrix::from_weights(topology, a),
               .mu = 3.0 / 64.0,
               .algorithms = {},
               .run = {.horizon = 2000, .trials = 100, .seed = seed}};
    detail::add_standard_algorithms(s, {20.0});
    return s;
  }
  if (name == "partial_obs_3node") {
    std::vector<Matrix> covs;
    for (int k = 0; k < 3; ++k) {
      Matrix r = Matrix::Zero(3, 3);
      r(k, k) = 1.0;
      covs.push_back(r);
    }
    auto topology = complete_topology(3);
    auto combination = metropolis_weights(topology);
    Scenario s{.name = "partial_obs_3node",
               .seed = seed,
               .topology = std::move(topology),
               .ensemble = make_ensemble(random_unit_vector(3, truth_rng), std::move(covs), {0.01, 0.01, 0.01}),
               .combination = std::move(combination),
               .mu = 0.02,
               .algorithms = {},
               .run = {.horizon = 10000, .trials = 1000, .seed = seed, .initial = InitialCondition::random}};
    detail::add_standard_algorithms(s, {1.0});
    return s;
  }
  if (name == "bench_n20") {
    auto s = detail::common_covariance_network("bench_n20", seed, 20, 5, 0.5, 0.01);
    s.run = {.horizon = 3000, .trials = 100, .seed = seed};
    detail::add_standard_algorithms(s, {0.2, 2.0});
    return s;
  }
  if (name == "eta_sweep_n100") {
    auto s = detail::common_covariance_network("eta_sweep_n100", seed, 100, 5, 0.05, 1e-4);
    s.run = {.horizon = 100000, .trials = 10, .seed = seed};
    detail::add_standard_algorithms(s, {1.0, 10.0});
    return s;
  }
  throw InvalidArgument("unknown scenario '" + std::string(name) + "'");
}

}  // namespace pdnet
