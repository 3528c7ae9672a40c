#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace pdnet;

namespace {

AgentEnsemble partial_observation() {
  std::vector<Matrix> covs;
  for (int k = 0; k < 3; ++k) {
    Matrix r = Matrix::Zero(3, 3);
    r(k, k) = 1.0;
    covs.push_back(r);
  }
  return make_ensemble(Vector::Ones(3) / std::sqrt(3.0), covs, {0.01, 0.01, 0.01});
}

AgentEnsemble scalar_pair(double noise = 0.1) {
  return make_ensemble(Vector::Ones(1), {Matrix::Ones(1, 1), Matrix::Ones(1, 1)}, {noise, noise});
}

AgentEnsemble common_ensemble(const Matrix& r_u, int n, std::mt19937_64& g) {
  std::uniform_real_distribution<double> noise(0.001, 0.1);
  std::vector<double> vars;
  for (int k = 0; k < n; ++k) vars.push_back(noise(g));
  return make_ensemble(test::random_matrix(r_u.rows(), 1, g), std::vector<Matrix>(static_cast<std::size_t>(n), r_u),
                       vars);
}

struct Instance {
  NetworkTopology topology;
  Matrix r_u;
  AgentEnsemble ensemble;
  double eta;
};

// Random connected graph (3 <= N <= 8), random PD R_u (1 <= M <= 3), eta from {0, 1, 10}.
std::vector<Instance> random_instances(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<Instance> out;
  const double etas[] = {0.0, 1.0, 10.0};
  for (int i = 0; i < count; ++i) {
    const int n = 3 + i % 6;
    const Index m = 1 + i % 3;
    auto topology = test::random_graph(n, g);
    const Matrix r_u = test::random_spd(m, g);
    auto ensemble = common_ensemble(r_u, n, g);
    out.push_back({std::move(topology), r_u, std::move(ensemble), etas[i % 3]});
  }
  return out;
}

double bisect_mu_bar(const Matrix& r_prime, double hi) {
  double lo = 0.0;
  const Matrix id = Matrix::Identity(r_prime.rows(), r_prime.cols());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spectral_radius(id - mid * r_prime) < 1.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST(Dynamics, PairMatrixMatchesHandDerivation) {
  const auto split = spectral_split(build_topology(2, {{0, 1}}));
  const auto d = build_dynamics(scalar_pair(), split, 0.0, 0.1);
  Matrix expected(3, 3);
  const double s = std::sqrt(2.0);
  expected << 1, 0, s, 0, 1, 0, -s, 0, 0;
  EXPECT_LT((d.r_prime - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((d.b_prime - (Matrix::Identity(3, 3) - 0.1 * expected)).cwiseAbs().maxCoeff(), 1e-14);

  const std::vector<Complex> oracle{1.0, Complex(0.5, std::sqrt(7.0) / 2), Complex(0.5, -std::sqrt(7.0) / 2)};
  EXPECT_LT(match_spectra(eigenvalues(d.r_prime), oracle), 1e-12);
  EXPECT_TRUE(is_hurwitz(-d.r_prime));
}

TEST(Dynamics, PartialObservationHasImaginaryMode) {
  const auto split = spectral_split(complete_topology(3));
  const auto d = build_dynamics(partial_observation(), split, 0.0, 0.02);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues(-d.r_prime)) best = std::min(best, std::abs(z - Complex(0.0, std::sqrt(3.0))));
  EXPECT_LT(best, 1e-8);
  EXPECT_FALSE(is_hurwitz(-d.r_prime));
  EXPECT_EQ(classify_hurwitz(-d.r_prime), HurwitzClass::marginal);
  EXPECT_FALSE(mu_bar(d.r_prime).has_value());
}

TEST(Dynamics, BlockLayout) {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 5;
    const Index m = 1 + rep % 3;
    const auto t = test::random_graph(n, g);
    std::vector<Matrix> covs;
    std::vector<double> noise;
    for (int k = 0; k < n; ++k) {
      covs.push_back(test::random_spd(m, g));
      noise.push_back(0.05 * (k + 1));
    }
    const auto ens = make_ensemble(test::random_matrix(m, 1, g), covs, noise);
    const auto split = spectral_split(t);
    const auto d = build_dynamics(ens, split, 0.0, 0.01);
    const auto d1 = build_dynamics(ens, split, 1.0, 0.01);
    const Index nm = n * m, rm = (n - 1) * m;
    const Matrix s2 = kron(split.s2(), Matrix::Identity(m, m));
    ASSERT_EQ(d.size(), nm + rm);
    EXPECT_EQ(d.r_prime.bottomRightCorner(rm, rm).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(d.r_prime.block(nm, 0, rm, rm), -s2);
    EXPECT_EQ(d.r_prime.block(0, nm, rm, rm), s2.transpose());
    EXPECT_EQ(d.r_prime.block(rm, nm, m, rm).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(d.r_prime.block(nm, rm, rm, m).cwiseAbs().maxCoeff(), 0.0);

    // Only the disagreement block picks up eta S2^T S2.
    Matrix delta = Matrix::Zero(nm + rm, nm + rm);
    delta.topLeftCorner(rm, rm) = s2.transpose() * s2;
    EXPECT_LT((d1.r_prime - d.r_prime - delta).cwiseAbs().maxCoeff(), 1e-12);

    Matrix vcal(nm, nm);
    vcal << kron(split.v2, Matrix::Identity(m, m)), kron(split.v0, Matrix::Identity(m, m));
    EXPECT_LT((d.r_h.topLeftCorner(nm, nm) - vcal.transpose() * d.r_z * vcal).norm(), 1e-12);
    EXPECT_EQ(d.r_h.rightCols(rm).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(d.r_h.bottomRows(rm).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Hurwitz, Examples) {
  EXPECT_TRUE(is_hurwitz(-Matrix::Identity(3, 3)));
  EXPECT_FALSE(is_hurwitz(Matrix::Identity(3, 3)));
  EXPECT_EQ(classify_hurwitz(Matrix::Zero(2, 2)), HurwitzClass::marginal);
  Matrix rotation(2, 2);
  rotation << 0, 1, -1, 0;
  EXPECT_EQ(classify_hurwitz(rotation), HurwitzClass::marginal);
}

TEST(MuBar, KnownValues) {
  EXPECT_NEAR(*mu_bar(Matrix::Identity(4, 4)), 2.0, 1e-14);
  const auto split = spectral_split(build_topology(2, {{0, 1}}));
  const Matrix rp = build_dynamics(scalar_pair(), split, 0.0, 0.0).r_prime;
  const double bar = *mu_bar(rp);
  EXPECT_NEAR(bar, 0.5, 1e-12);
  EXPECT_NEAR(bisect_mu_bar(rp, 2.0), bar, 1e-9);
  EXPECT_FALSE(mu_bar(-Matrix::Identity(2, 2)).has_value());
}

TEST(MuBar, BoundaryStraddleOnRandomInstances) {
  int hurwitz_count = 0;
  for (const auto& inst : random_instances(60, 17)) {
    const auto d = build_dynamics(inst.ensemble, spectral_split(inst.topology), inst.eta, 0.0);
    const auto bar = mu_bar(d.r_prime);
    ASSERT_EQ(bar.has_value(), is_hurwitz(-d.r_prime));
    if (!bar) continue;
    ++hurwitz_count;
    const Matrix id = Matrix::Identity(d.size(), d.size());
    EXPECT_LT(spectral_radius(id - 0.99 * *bar * d.r_prime), 1.0);
    EXPECT_GE(spectral_radius(id - 1.01 * *bar * d.r_prime), 1.0);
  }
  EXPECT_EQ(hurwitz_count, 60);  // common PD covariance keeps -R' Hurwitz for every eta
}

TEST(MuBar, Lemma2BlockFormIsHurwitz) {
  std::mt19937_64 g(23);
  for (int rep = 0; rep < 50; ++rep) {
    const Index p = 2 + rep % 5;
    const Index q = 1 + rep % static_cast<int>(p);
    const Matrix x = test::random_spd(p, g, 0.05);
    Matrix y = test::random_matrix(q, p, g);
    ASSERT_EQ(Eigen::FullPivLU<Matrix>(y).rank(), q);
    Matrix block = Matrix::Zero(p + q, p + q);
    block.topLeftCorner(p, p) = x;
    block.topRightCorner(p, q) = y.transpose();
    block.bottomLeftCorner(q, p) = -y;
    EXPECT_TRUE(is_hurwitz(-block));
  }
}

TEST(EtaBar, CommonCovarianceNeedsNoRegularization) {
  std::mt19937_64 g(31);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rep % 6;
    const auto t = test::random_graph(n, g);
    const auto ens = common_ensemble(test::random_spd(1 + rep % 3, g), n, g);
    const auto split = spectral_split(t);
    const auto d = build_dynamics(ens, split, 0.0, 0.0);
    EXPECT_GE(symmetric_eigenvalues(d.schur_z).minCoeff(), -1e-12);
    EXPECT_EQ(eta_bar(ens, split), 0.0);
  }
}

TEST(EtaBar, PartialObservation) {
  const auto split = spectral_split(complete_topology(3));
  const auto ens = partial_observation();
  // The Schur complement is PSD but singular here; the regression value is 0.
  const auto d0 = build_dynamics(ens, split, 0.0, 0.0);
  EXPECT_NEAR(symmetric_eigenvalues(d0.schur_z).minCoeff(), 0.0, 1e-12);
  EXPECT_EQ(eta_bar(ens, split), 0.0);
  for (double eta : {1e-3, 0.1, 1.0}) {
    const auto d = build_dynamics(ens, split, eta, 0.0);
    EXPECT_GT(symmetric_eigenvalues(d.r_prime.topLeftCorner(d.primal_size(), d.primal_size())).minCoeff(), 0.0);
    EXPECT_TRUE(is_hurwitz(-d.r_prime));
  }
}

TEST(EtaBar, PositiveWhenLocalCovariancesAreIndefiniteAcrossTheNetwork) {
  // Synthetic Schur complement with a negative eigenvalue: eta_bar then
  // equals -lambda_min(Z) / fiedler and regularizing past it restores definiteness.
  const auto split = spectral_split(path_topology(3));
  DynamicsMatrices d;
  d.h_block = Matrix::Identity(3, 3);
  d.schur_z = Matrix(2, 2);
  d.schur_z << -0.5, 0, 0, 2.0;
  EXPECT_NEAR(eta_bar(d, split), 0.5 / split.fiedler(), 1e-14);
}

TEST(ClosedForm, PairExample) {
  Vector lap(2);
  lap << 0.0, 2.0;
  const std::vector<Complex> oracle{1.0, Complex(0.5, std::sqrt(7.0) / 2), Complex(0.5, -std::sqrt(7.0) / 2)};
  EXPECT_LT(match_spectra(closed_form_eigenvalues(Matrix::Ones(1, 1), lap, 0.0), oracle), 1e-14);
  EXPECT_THROW(closed_form_eigenvalues(Matrix::Zero(1, 1), lap, 0.0), InvalidArgument);
}

TEST(ClosedForm, LargeEtaRootsApproachScaledLaplacian) {
  Vector lap(3);
  lap << 0.0, 1.0, 3.0;
  const double eta = 1e6;
  const auto ev = closed_form_eigenvalues(Matrix::Identity(1, 1), lap, eta);
  std::vector<double> big;
  for (const auto& z : ev)
    if (z.real() > 1e3) big.push_back(z.real());
  ASSERT_EQ(big.size(), 2u);
  std::sort(big.begin(), big.end());
  EXPECT_NEAR(big[0] / (eta * 1.0), 1.0, 1e-5);
  EXPECT_NEAR(big[1] / (eta * 3.0), 1.0, 1e-5);
}

TEST(ClosedForm, MatchesEigensolverOnRandomInstances) {
  for (const auto& inst : random_instances(60, 5)) {
    const auto split = spectral_split(inst.topology);
    const auto d = build_dynamics(inst.ensemble, split, inst.eta, 0.0);
    const auto numeric = eigenvalues(d.r_prime);
    const auto closed = closed_form_eigenvalues(inst.r_u, laplacian_spectrum(inst.topology), inst.eta);
    ASSERT_EQ(numeric.size(), closed.size());
    EXPECT_LT(match_spectra(numeric, closed), 1e-8);
  }
}

TEST(StepBounds, LargeEta) {
  const auto pair = step_bound_large_eta(build_topology(2, {{0, 1}}), 20.0);
  EXPECT_EQ(pair.general, 0.05);
  const auto tri = step_bound_large_eta(complete_topology(3), 1.0);
  EXPECT_NEAR(tri.general, 2.0 / 3.0, 1e-14);
  ASSERT_TRUE(tri.fully_connected.has_value());
  EXPECT_NEAR(*tri.fully_connected, 2.0 / 3.0, 1e-15);
  const auto star = step_bound_large_eta(star_topology(4), 2.0);
  EXPECT_NEAR(star.degree_necessary, 2.0 * 3.0 / (2.0 * 4.0 * 3.0), 1e-15);
  EXPECT_GE(star.degree_necessary, star.general - 1e-14);
  EXPECT_FALSE(star.fully_connected.has_value());
  EXPECT_THROW(step_bound_large_eta(star_topology(4), 0.0), InvalidArgument);

  std::mt19937_64 g(8);
  for (int rep = 0; rep < 30; ++rep) {
    const auto b = step_bound_large_eta(test::random_graph(2 + rep % 9, g), 3.0);
    EXPECT_GE(b.degree_necessary, b.general - 1e-12);
  }
}

TEST(StepBounds, Diffusion) {
  EXPECT_DOUBLE_EQ(diffusion_mu_bound(scalar_pair()), 2.0);
  EXPECT_DOUBLE_EQ(diffusion_mu_bound(partial_observation()), 2.0);
  Matrix big = Matrix::Identity(2, 2);
  big(1, 1) = 4.0;
  EXPECT_NEAR(diffusion_mu_bound(make_ensemble(Vector::Ones(2), {Matrix::Identity(2, 2), big}, {0.1, 0.1})), 0.5,
              1e-14);
  EnsembleOptions opts;
  opts.allow_singular_sum = true;
  EXPECT_THROW(diffusion_mu_bound(make_ensemble(Vector::Ones(1), {Matrix::Zero(1, 1)}, {0.1}, opts)),
               InvalidArgument);
}

TEST(MsdTheory, ArrowHurwiczEqualsNonCooperative) {
  std::mt19937_64 g(41);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rep % 7;
    const Index m = 1 + rep % 4;
    std::vector<Matrix> covs;
    std::vector<double> noise;
    std::uniform_real_distribution<double> u(0.001, 0.5);
    for (int k = 0; k < n; ++k) {
      covs.push_back(test::random_spd(m, g));
      noise.push_back(u(g));
    }
    const auto ens = make_ensemble(test::random_matrix(m, 1, g), covs, noise);
    const auto t = test::random_graph(n, g);
    const double mu = 0.003;
    double sum = 0.0;
    for (double v : noise) sum += v;
    const double expected = mu * static_cast<double>(m) * sum / (2.0 * n);
    EXPECT_NEAR(msd_theory(ens, t, mu, 0.0, MsdMethod::ah), expected, 1e-15 * expected);
    EXPECT_EQ(msd_theory(ens, t, mu, 0.0, MsdMethod::ah), msd_theory(ens, t, mu, 0.0, MsdMethod::noncoop));
  }
}

TEST(MsdTheory, PrimalDualWithoutRegularizerReducesToArrowHurwicz) {
  std::mt19937_64 g(43);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 6;
    const auto ens = common_ensemble(test::random_spd(1 + rep % 3, g), n, g);
    const auto t = test::random_graph(n, g);
    const double pd = msd_theory(ens, t, 0.01, 0.0, MsdMethod::primal_dual);
    const double ah = msd_theory(ens, t, 0.01, 0.0, MsdMethod::ah);
    EXPECT_NEAR(pd / ah, 1.0, 1e-12);
  }
}

TEST(MsdTheory, DiffusionFormulaOnKnownEnsembles) {
  // Common covariance: Tr((sum R)^-1 sum sigma^2 R) = M * mean(sigma^2).
  const auto pair = scalar_pair(0.1);
  const auto t = build_topology(2, {{0, 1}});
  EXPECT_NEAR(msd_theory(pair, t, 1e-4, 0.0, MsdMethod::diffusion), 1e-4 / 4.0 * 0.1, 1e-18);
  EXPECT_EQ(msd_theory(pair, t, 1e-4, 0.0, MsdMethod::consensus), msd_theory(pair, t, 1e-4, 0.0, MsdMethod::diffusion));
  // One-hot covariances: each coordinate is observed by a single agent.
  EXPECT_NEAR(msd_theory(partial_observation(), complete_topology(3), 0.02, 0.0, MsdMethod::diffusion),
              0.02 / 6.0 * 0.03, 1e-16);
}

TEST(MsdTheory, SingularSystemReportsEtaBar) {
  try {
    msd_theory(partial_observation(), complete_topology(3), 0.02, 0.0, MsdMethod::primal_dual);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("eta_bar"), std::string::npos);
  }
  EXPECT_NO_THROW(msd_theory(partial_observation(), complete_topology(3), 0.02, 1.0, MsdMethod::primal_dual));
  EXPECT_THROW(msd_theory(scalar_pair(), build_topology(2, {{0, 1}}), 0.01, 0.0, MsdMethod::al_large_eta),
               InvalidArgument);
}

TEST(MsdTheory, MonotoneInEtaOnBenchmark) {
  const auto s = scenario_library("bench_n20");
  double previous = std::numeric_limits<double>::infinity();
  for (double eta : {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0}) {
    const double v = msd_theory(s.ensemble, s.topology, s.mu, eta, MsdMethod::primal_dual);
    EXPECT_LE(v, previous * (1.0 + 1e-12)) << "eta " << eta;
    previous = v;
  }
  EXPECT_GE(previous, msd_theory(s.ensemble, s.topology, s.mu, 0.0, MsdMethod::diffusion) * (1.0 - 1e-12));
}

TEST(MsdTheory, LargeEtaExpansion) {
  const auto s = scenario_library("bench_n20");
  const double exact = msd_theory(s.ensemble, s.topology, s.mu, 100.0, MsdMethod::primal_dual);
  const double approx = msd_theory(s.ensemble, s.topology, s.mu, 100.0, MsdMethod::al_large_eta);
  EXPECT_LT(std::abs(exact - approx) / exact, 0.02);
  // The correction term is an independent computation via the dense pseudoinverse.
  const Index m = s.ensemble.dim();
  const Matrix lpinv = laplacian(s.topology).completeOrthogonalDecomposition().pseudoInverse();
  const double correction = s.mu / (2.0 * 20 * 100.0) * (noise_block(s.ensemble) * kron(lpinv, Matrix::Identity(m, m))).trace();
  EXPECT_NEAR(approx, msd_theory(s.ensemble, s.topology, s.mu, 0.0, MsdMethod::diffusion) + correction, 1e-12 * approx);
}

TEST(FixedPoint, ApproachesFirstOrderTheory) {
  const auto t = build_topology(2, {{0, 1}});
  const auto split = spectral_split(t);
  for (double mu : {1e-3, 1e-4}) {
    const auto d = build_dynamics(scalar_pair(), split, 1.0, mu);
    const double fp = msd_fixed_point(d);
    const double theory = msd_theory(scalar_pair(), t, mu, 1.0, MsdMethod::primal_dual);
    EXPECT_LT(std::abs(fp - theory) / theory, mu == 1e-3 ? 0.05 : 0.01) << "mu " << mu;
  }
}

TEST(FixedPoint, ExplicitAndLyapunovPathsAgree) {
  std::mt19937_64 g(61);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 4;
    const Index m = 1 + rep % 2;
    const auto t = test::random_graph(n, g);
    std::vector<Matrix> covs;
    for (int k = 0; k < n; ++k) covs.push_back(test::random_spd(m, g));
    const auto ens = make_ensemble(test::random_matrix(m, 1, g), covs, std::vector<double>(static_cast<std::size_t>(n), 0.05));
    const auto d = build_dynamics(ens, spectral_split(t), 0.5 * rep, 0.02);
    if (spectral_radius(d.b_prime) >= 1.0) continue;
    const double a = msd_fixed_point(d, FixedPointPath::explicit_solve);
    const double b = msd_fixed_point(d, FixedPointPath::lyapunov);
    EXPECT_LT(std::abs(a - b) / a, 1e-10);
  }
}

TEST(FixedPoint, NilpotentTransitionTruncatesSeries) {
  // B' = 0 leaves only the first term mu^2 Tr(Phi R_h) / N.
  DynamicsMatrices d;
  d.dim = 1;
  d.num_agents = 2;
  d.mu = 0.5;
  d.r_prime = Matrix::Identity(3, 3) / d.mu;
  d.b_prime = Matrix::Zero(3, 3);
  d.r_h = Matrix::Zero(3, 3);
  d.r_h.topLeftCorner(2, 2) << 0.3, 0.1, 0.1, 0.7;
  const double expected = 0.25 * 1.0 / 2.0;
  EXPECT_NEAR(msd_fixed_point(d, FixedPointPath::lyapunov), expected, 1e-15);
  EXPECT_NEAR(msd_fixed_point(d, FixedPointPath::explicit_solve), expected, 1e-15);
}

TEST(FixedPoint, RejectsUnstableAndOversized) {
  const auto split = spectral_split(build_topology(2, {{0, 1}}));
  EXPECT_THROW(msd_fixed_point(build_dynamics(scalar_pair(), split, 0.0, 0.75)), NumericalError);
  const auto s = scenario_library("bench_n20");
  const auto d = build_dynamics(s.ensemble, spectral_split(s.topology), 1.0, 1e-3);
  EXPECT_THROW(msd_fixed_point(d, FixedPointPath::explicit_solve), InvalidArgument);
}

TEST(Stability, ReportInvariants) {
  for (const auto& name : {"two_node", "partial_obs_3node", "bench_n20"}) {
    const auto s = scenario_library(name);
    for (const auto& a : s.algorithms) {
      const auto r = stability_report(a, s.ensemble, s.topology);
      if (r.hurwitz) {
        EXPECT_EQ(*r.hurwitz, r.mu_bar.has_value() && *r.mu_bar > 0.0) << name << " " << a.label;
        if (r.rho_b_prime < 1.0 && r.mu_bar) EXPECT_LT(r.mu, *r.mu_bar) << name << " " << a.label;
      }
      EXPECT_EQ(r.mean_stable, r.rho_b_prime < 1.0);
    }
  }
}

TEST(Stability, PairReport) {
  auto s = scenario_library("two_node");
  for (const auto& a : s.algorithms) {
    const auto r = stability_report(a, s.ensemble, s.topology);
    if (a.label == "al_eta20") {
      ASSERT_TRUE(r.topo_bound_large_eta.has_value());
      EXPECT_DOUBLE_EQ(*r.topo_bound_large_eta, 0.05);
    }
    if (a.label == "ah") {
      EXPECT_NEAR(*r.mu_bar, 0.5, 1e-12);
      // rho(B') = sqrt(1 - mu + 2 mu^2) for the scalar pair without regularization.
      EXPECT_NEAR(r.rho_b_prime, std::sqrt(1 - s.mu + 2 * s.mu * s.mu), 1e-12);
    }
    EXPECT_EQ(*r.diffusion_mu_bound, 2.0);
  }
  const auto partial = scenario_library("partial_obs_3node");
  for (const auto& a : partial.algorithms) {
    if (a.label != "ah") continue;
    const auto r = stability_report(a, partial.ensemble, partial.topology);
    EXPECT_FALSE(*r.hurwitz);
    EXPECT_EQ(*r.hurwitz_class, "marginal");
  }
}
