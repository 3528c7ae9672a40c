#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pdnet/data_model.hpp"
#include "pdnet/error.hpp"
#include "pdnet/graph.hpp"
#include "pdnet/strategies.hpp"

namespace pdnet {

/// Starting point of the primal iterates. `random` draws every w_{k,0}
/// independently from N(0, I_M) on a stream separate from the data, which
/// excites modes that a common starting point leaves untouched.
enum class InitialCondition { zero, truth, random };

inline std::string_view to_string(InitialCondition c) {
  switch (c) {
    case InitialCondition::zero: return "zero";
    case InitialCondition::truth: return "truth";
    case InitialCondition::random: return "random";
  }
  return "?";
}

inline InitialCondition parse_initial_condition(std::string_view s) {
  if (s == "zero") return InitialCondition::zero;
  if (s == "truth") return InitialCondition::truth;
  if (s == "random") return InitialCondition::random;
  throw InvalidArgument("unknown initial condition '" + std::string(s) + "'");
}

struct RunSpec {
  int horizon = 1000;
  int trials = 100;
  std::uint64_t seed = 1;
  int tail_window = 0;  ///< 0 selects the last 10% of the horizon.
  InitialCondition initial = InitialCondition::zero;
  int threads = 0;      ///< 0 selects std::thread::hardware_concurrency().

  int effective_tail() const { return tail_window > 0 ? tail_window : std::max(1, horizon / 10); }

  void validate() const {
    if (horizon < 1) throw InvalidArgument("run: horizon must be at least 1");
    if (trials < 1) throw InvalidArgument("run: trials must be at least 1");
    if (tail_window < 0 || effective_tail() > horizon) {
      throw InvalidArgument("run: tail window must lie in [1, horizon]");
    }
    if (threads < 0) throw InvalidArgument("run: thread count must be nonnegative");
  }
};

/// A run is flagged diverged once the network MSD is non-finite or exceeds
/// this multiple of its initial value.
inline constexpr double kDivergenceFactor = 1e6;

struct TrialTrace {
  std::vector<double> msd;  ///< network MSD after each iteration, +inf after divergence
  bool diverged = false;
  int diverged_at = -1;     ///< 1-based iteration of divergence, -1 if none
  Vector agent_tail_msd;    ///< per-agent squared error averaged over the tail window
};

struct LearningCurve {
  std::string label;
  std::vector<double> msd;  ///< averaged over trials
  bool diverged = false;
  int diverged_trials = 0;
  double steady_state_msd = 0.0;
  Vector per_agent_msd;
};

namespace detail {

inline double squared_error_sum(const Matrix& primal, const Vector& truth, Vector* per_agent) {
  double total = 0.0;
  for (Index k = 0; k < primal.rows(); ++k) {
    double s = 0.0;
    for (Index j = 0; j < primal.cols(); ++j) {
      const double e = primal(k, j) - truth(j);
      s += e * e;
    }
    if (per_agent) (*per_agent)(k) += s;
    total += s;
  }
  return total;
}

}  // namespace detail

/// Runs every configuration on the same data stream (common random numbers),
/// so comparisons across strategies are not blurred by sampling noise.
/// Deterministic in (spec.seed, trial_index).
inline std::vector<TrialTrace> run_trial(const RunSpec& spec, const AgentEnsemble& ensemble,
                                         const NetworkTopology& topology, std::span<const AlgorithmConfig> configs,
                                         int trial_index) {
  const int n = topology.num_nodes();
  const int tail_start = spec.horizon - spec.effective_tail();
  RandomStream rng(spec.seed, static_cast<std::uint64_t>(trial_index));
  const Vector& truth = ensemble.truth();

  Matrix start = Matrix::Zero(n, ensemble.dim());
  if (spec.initial == InitialCondition::truth) start.rowwise() = truth.transpose();
  if (spec.initial == InitialCondition::random) {
    RandomStream init_rng(RandomStream::splitmix64(spec.seed ^ 0x5bd1e9955bd1e995ULL),
                          static_cast<std::uint64_t>(trial_index));
    for (int k = 0; k < n; ++k)
      for (Index j = 0; j < ensemble.dim(); ++j) start(k, j) = init_rng.normal();
  }

  std::vector<AlgState> current;
  std::vector<AlgState> next;
  std::vector<TrialTrace> traces(configs.size());
  std::vector<double> reference(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    current.push_back(init_state(configs[c], topology, ensemble.dim()));
    current.back().primal = start;
    next.push_back(current.back());
    traces[c].msd.assign(static_cast<std::size_t>(spec.horizon), std::numeric_limits<double>::infinity());
    traces[c].agent_tail_msd = Vector::Zero(n);
    const double initial = detail::squared_error_sum(current[c].primal, truth, nullptr) / n;
    reference[c] = initial > 0.0 ? initial : 1.0;
  }

  SampleBatch batch;
  std::size_t active = configs.size();
  for (int i = 0; i < spec.horizon && active > 0; ++i) {
    sample_step_into(ensemble, rng, batch);
    const bool in_tail = i >= tail_start;
    for (std::size_t c = 0; c < configs.size(); ++c) {
      TrialTrace& t = traces[c];
      if (t.diverged) continue;
      step_into(configs[c], topology, current[c], batch, next[c]);
      std::swap(current[c], next[c]);
      const double msd =
          detail::squared_error_sum(current[c].primal, truth, in_tail ? &t.agent_tail_msd : nullptr) / n;
      if (!std::isfinite(msd) || msd > kDivergenceFactor * reference[c]) {
        t.diverged = true;
        t.diverged_at = i + 1;
        t.agent_tail_msd.setConstant(std::numeric_limits<double>::infinity());
        --active;
        continue;
      }
      t.msd[static_cast<std::size_t>(i)] = msd;
    }
  }
  for (auto& t : traces) {
    if (!t.diverged) t.agent_tail_msd /= static_cast<double>(spec.effective_tail());
  }
  return traces;
}

inline TrialTrace run_trial(const RunSpec& spec, const AgentEnsemble& ensemble, const NetworkTopology& topology,
                            const AlgorithmConfig& config, int trial_index) {
  return run_trial(spec, ensemble, topology, std::span<const AlgorithmConfig>(&config, 1), trial_index).front();
}

/// Mean of the last `window` values.
inline double steady_state(std::span<const double> curve, int window) {
  if (window < 1) throw InvalidArgument("steady_state: window must be positive");
  if (static_cast<std::size_t>(window) > curve.size()) {
    throw InvalidArgument("steady_state: window longer than curve");
  }
  double s = 0.0;
  for (std::size_t i = curve.size() - static_cast<std::size_t>(window); i < curve.size(); ++i) s += curve[i];
  return s / window;
}

/// Trials are grouped in fixed blocks; each block is summed in trial order and
/// the blocks are then combined in block order, so the result does not depend
/// on the number of worker threads.
inline std::vector<LearningCurve> monte_carlo(const RunSpec& spec, const AgentEnsemble& ensemble,
                                              const NetworkTopology& topology,
                                              std::span<const AlgorithmConfig> configs) {
  spec.validate();
  if (configs.empty()) throw InvalidArgument("monte_carlo: no algorithms configured");
  if (topology.num_nodes() != ensemble.num_agents()) {
    throw InvalidArgument("monte_carlo: topology and ensemble sizes differ");
  }
  for (const auto& c : configs) c.validate(topology.num_nodes());

  constexpr int kBlock = 16;
  const int num_blocks = (spec.trials + kBlock - 1) / kBlock;
  const std::size_t nc = configs.size();
  const auto horizon = static_cast<std::size_t>(spec.horizon);
  const int n = topology.num_nodes();

  struct BlockSum {
    std::vector<std::vector<double>> msd;
    std::vector<Vector> agents;
    std::vector<int> diverged;
  };
  std::vector<BlockSum> blocks(static_cast<std::size_t>(num_blocks));

  auto run_block = [&](int b) {
    BlockSum& sum = blocks[static_cast<std::size_t>(b)];
    sum.msd.assign(nc, std::vector<double>(horizon, 0.0));
    sum.agents.assign(nc, Vector::Zero(n));
    sum.diverged.assign(nc, 0);
    const int end = std::min(spec.trials, (b + 1) * kBlock);
    for (int trial = b * kBlock; trial < end; ++trial) {
      const auto traces = run_trial(spec, ensemble, topology, configs, trial);
      for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t i = 0; i < horizon; ++i) sum.msd[c][i] += traces[c].msd[i];
        sum.agents[c] += traces[c].agent_tail_msd;
        sum.diverged[c] += traces[c].diverged ? 1 : 0;
      }
    }
  };

  unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(num_blocks));
  if (workers == 1) {
    for (int b = 0; b < num_blocks; ++b) run_block(b);
  } else {
    std::atomic<int> next_block{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int b = next_block++; b < num_blocks; b = next_block++) run_block(b);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<LearningCurve> curves(nc);
  const double inv_trials = 1.0 / spec.trials;
  for (std::size_t c = 0; c < nc; ++c) {
    LearningCurve& lc = curves[c];
    lc.label = configs[c].label;
    lc.msd.assign(horizon, 0.0);
    lc.per_agent_msd = Vector::Zero(n);
    for (const auto& blk : blocks) {
      for (std::size_t i = 0; i < horizon; ++i) lc.msd[i] += blk.msd[c][i];
      lc.per_agent_msd += blk.agents[c];
      lc.diverged_trials += blk.diverged[c];
    }
    for (double& v : lc.msd) v *= inv_trials;
    lc.per_agent_msd *= inv_trials;
    lc.diverged = lc.diverged_trials > 0;
    lc.steady_state_msd =
        lc.diverged ? std::numeric_limits<double>::infinity() : steady_state(lc.msd, spec.effective_tail());
  }
  return curves;
}

inline LearningCurve monte_carlo(const RunSpec& spec, const AgentEnsemble& ensemble, const NetworkTopology& topology,
                                 const AlgorithmConfig& config) {
  return monte_carlo(spec, ensemble, topology, std::span<const AlgorithmConfig>(&config, 1)).front();
}

}  // namespace pdnet
