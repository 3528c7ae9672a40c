#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace pdnet;

namespace {

const AlgorithmConfig& find(const std::vector<AlgorithmConfig>& algs, const std::string& label) {
  for (const auto& a : algs)
    if (a.label == label) return a;
  throw std::runtime_error("no algorithm " + label);
}

}  // namespace

TEST(RunSpec, Validation) {
  RunSpec ok;
  EXPECT_NO_THROW(ok.validate());
  EXPECT_EQ(RunSpec{.horizon = 1000}.effective_tail(), 100);
  EXPECT_EQ(RunSpec{.horizon = 5}.effective_tail(), 1);
  EXPECT_THROW(RunSpec{.horizon = 0}.validate(), InvalidArgument);
  EXPECT_THROW((RunSpec{.horizon = 10, .trials = 0}).validate(), InvalidArgument);
  EXPECT_THROW((RunSpec{.horizon = 10, .tail_window = 11}).validate(), InvalidArgument);
  EXPECT_THROW((RunSpec{.horizon = 10, .tail_window = -1}).validate(), InvalidArgument);
}

TEST(SteadyState, Examples) {
  const std::vector<double> constant(40, 2.5);
  EXPECT_EQ(steady_state(constant, 7), 2.5);
  std::vector<double> ramp;
  for (int i = 1; i <= 100; ++i) ramp.push_back(i);
  EXPECT_EQ(steady_state(ramp, 1), 100.0);
  EXPECT_EQ(steady_state(ramp, 4), 98.5);
  EXPECT_THROW(steady_state(ramp, 0), InvalidArgument);
  EXPECT_THROW(steady_state(ramp, 101), InvalidArgument);
}

TEST(RunTrial, NoiselessStartAtTruthStaysThere) {
  auto s = scenario_library("bench_n20");
  auto noiseless = make_ensemble(s.ensemble.truth(), s.ensemble.covariances(), std::vector<double>(20, 0.0));
  RunSpec spec{.horizon = 200, .trials = 1, .seed = 3, .initial = InitialCondition::truth};
  for (const auto& a : s.algorithms) {
    const auto t = run_trial(spec, noiseless, s.topology, a, 0);
    EXPECT_FALSE(t.diverged);
    for (double v : t.msd) EXPECT_LT(v, 1e-28) << a.label;
  }
}

TEST(RunTrial, DeterministicPerTrialIndex) {
  const auto s = scenario_library("two_node");
  RunSpec spec{.horizon = 300, .trials = 1, .seed = 77, .initial = InitialCondition::random};
  const auto a = run_trial(spec, s.ensemble, s.topology, s.algorithms, 4);
  const auto b = run_trial(spec, s.ensemble, s.topology, s.algorithms, 4);
  const auto c = run_trial(spec, s.ensemble, s.topology, s.algorithms, 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].msd, b[i].msd);
    EXPECT_EQ(a[i].agent_tail_msd, b[i].agent_tail_msd);
    EXPECT_NE(a[i].msd, c[i].msd);
  }
  // A config run alone sees the same data as when run alongside others.
  const auto alone = run_trial(spec, s.ensemble, s.topology, s.algorithms[2], 4);
  EXPECT_EQ(alone.msd, a[2].msd);
}

TEST(RunTrial, ArrowHurwiczDivergesAtLargeStep) {
  auto s = scenario_library("two_node");
  auto ah = find(s.algorithms, "ah");
  ah.mu = 1.1;
  RunSpec spec{.horizon = 10000, .trials = 1, .seed = 1};
  const auto t = run_trial(spec, s.ensemble, s.topology, ah, 0);
  EXPECT_TRUE(t.diverged);
  EXPECT_GT(t.diverged_at, 0);
  EXPECT_LE(t.diverged_at, 10000);
  EXPECT_TRUE(std::isinf(t.msd.back()));
}

TEST(MonteCarlo, SingleTrialEqualsRunTrial) {
  const auto s = scenario_library("two_node");
  RunSpec spec{.horizon = 250, .trials = 1, .seed = 9};
  const auto curves = monte_carlo(spec, s.ensemble, s.topology, s.algorithms);
  const auto traces = run_trial(spec, s.ensemble, s.topology, s.algorithms, 0);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    EXPECT_EQ(curves[i].msd, traces[i].msd);
    EXPECT_EQ(curves[i].per_agent_msd, traces[i].agent_tail_msd);
    EXPECT_EQ(curves[i].label, s.algorithms[i].label);
  }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const auto s = scenario_library("two_node");
  RunSpec spec{.horizon = 200, .trials = 50, .seed = 12, .threads = 1};
  const auto one = monte_carlo(spec, s.ensemble, s.topology, s.algorithms);
  spec.threads = 4;
  const auto four = monte_carlo(spec, s.ensemble, s.topology, s.algorithms);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].msd, four[i].msd);
    EXPECT_EQ(one[i].steady_state_msd, four[i].steady_state_msd);
  }
}

TEST(MonteCarlo, DivergedCurveReportsInfinity) {
  auto s = scenario_library("two_node");
  for (auto& a : s.algorithms) a.mu = 1.1;
  RunSpec spec{.horizon = 2000, .trials = 8, .seed = 2};
  for (const auto& c : monte_carlo(spec, s.ensemble, s.topology, s.algorithms)) {
    const bool primal_dual = c.label == "ah" || c.label == "al_eta20";
    EXPECT_EQ(c.diverged, primal_dual) << c.label;
    if (primal_dual) {
      EXPECT_TRUE(std::isinf(c.steady_state_msd));
      EXPECT_EQ(c.diverged_trials, 8);
    } else {
      EXPECT_TRUE(std::isfinite(c.steady_state_msd));
    }
    for (double v : c.msd) EXPECT_GE(v, 0.0);
  }
}

TEST(MonteCarlo, RejectsInvalidInput) {
  const auto s = scenario_library("two_node");
  RunSpec spec{.horizon = 10, .trials = 1};
  EXPECT_THROW(monte_carlo(spec, s.ensemble, s.topology, std::span<const AlgorithmConfig>()), InvalidArgument);
  EXPECT_THROW(monte_carlo(spec, s.ensemble, complete_topology(3), s.algorithms), InvalidArgument);
  auto bad = s.algorithms[0];
  bad.mu = -1.0;
  EXPECT_THROW(monte_carlo(spec, s.ensemble, s.topology, bad), InvalidArgument);
}

TEST(MonteCarlo, StableDivergenceAgreesWithSpectralRadius) {
  auto s = scenario_library("two_node");
  RunSpec spec{.horizon = 10000, .trials = 4, .seed = 5};
  for (double mu : {3.0 / 64.0, 0.75, 1.1}) {
    for (const char* label : {"ah", "al_eta20"}) {
      auto a = find(s.algorithms, label);
      a.mu = mu;
      const bool stable = spectral_radius(mean_transition(a, s.ensemble, s.topology)) < 1.0;
      const auto c = monte_carlo(spec, s.ensemble, s.topology, a);
      EXPECT_EQ(c.diverged, !stable) << label << " mu " << mu;
    }
  }
}

TEST(MonteCarlo, HalvingStepHalvesSteadyState) {
  auto s = scenario_library("bench_n20");
  std::vector<AlgorithmConfig> algs{find(s.algorithms, "noncoop"), find(s.algorithms, "diffusion"),
                                    find(s.algorithms, "al_eta2")};
  RunSpec spec{.horizon = 4000, .trials = 40, .seed = 21, .tail_window = 2000};
  auto at = [&](double mu) {
    for (auto& a : algs) a.mu = mu;
    return monte_carlo(spec, s.ensemble, s.topology, algs);
  };
  const auto full = at(0.01);
  const auto half = at(0.005);
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const double ratio = half[i].steady_state_msd / full[i].steady_state_msd;
    EXPECT_NEAR(ratio, 0.5, 0.5 * 0.15) << algs[i].label;
  }
}

TEST(MonteCarlo, CooperationEqualizesAgents) {
  auto s = scenario_library("bench_n20");
  std::vector<AlgorithmConfig> algs{find(s.algorithms, "diffusion"), find(s.algorithms, "consensus")};
  for (auto& a : algs) a.mu = 1e-3;
  RunSpec spec{.horizon = 20000, .trials = 10, .seed = 4, .tail_window = 10000};
  for (const auto& c : monte_carlo(spec, s.ensemble, s.topology, algs)) {
    const double network_db = to_db(c.per_agent_msd.mean());
    for (Index k = 0; k < c.per_agent_msd.size(); ++k)
      EXPECT_LE(std::abs(to_db(c.per_agent_msd(k)) - network_db), 1.0) << c.label << " agent " << k;
  }
}
