#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdnet/data_model.hpp"
#include "pdnet/error.hpp"
#include "pdnet/graph.hpp"
#include "pdnet/linalg.hpp"
#include "pdnet/strategies.hpp"

namespace pdnet {

/// Error-dynamics matrices of the primal-dual recursion in the rotated
/// coordinates (w'_1, w'_2, lambda'_1), each block row of width M per agent.
struct DynamicsMatrices {
  Index dim = 0;        ///< M
  int num_agents = 0;   ///< N
  double mu = 0.0;
  double eta = 0.0;
  Matrix h_block;  ///< blockdiag{R_{u,k}}, NM x NM
  Matrix r_prime;  ///< (2N-1)M square
  Matrix b_prime;  ///< I - mu R'
  Matrix r_z;      ///< blockdiag{sigma_k^2 R_{u,k}}
  Matrix r_h;      ///< (2N-1)M square, nonzero only in the leading NM block
  Matrix schur_z;  ///< (N-1)M square Schur complement used for eta_bar

  Index size() const { return r_prime.rows(); }
  Index primal_size() const { return static_cast<Index>(num_agents) * dim; }
};

inline Matrix covariance_block(const AgentEnsemble& ensemble) {
  return block_diag(std::span<const Matrix>(ensemble.covariances()));
}

inline Matrix noise_block(const AgentEnsemble& ensemble) {
  std::vector<Matrix> blocks;
  for (int k = 0; k < ensemble.num_agents(); ++k) blocks.push_back(ensemble.noise_var(k) * ensemble.covariance(k));
  return block_diag(std::span<const Matrix>(blocks));
}

inline DynamicsMatrices build_dynamics(const AgentEnsemble& ensemble, const SpectralSplit& split, double eta,
                                       double mu) {
  const int n = ensemble.num_agents();
  const Index m = ensemble.dim();
  if (split.v2.rows() != n) throw InvalidArgument("build_dynamics: topology and ensemble sizes differ");
  if (!(eta >= 0.0)) throw InvalidArgument("build_dynamics: eta must be nonnegative");
  const Index nm = n * m;
  const Index rm = (n - 1) * m;
  const Matrix im = Matrix::Identity(m, m);

  DynamicsMatrices d;
  d.dim = m;
  d.num_agents = n;
  d.mu = mu;
  d.eta = eta;
  d.h_block = covariance_block(ensemble);
  d.r_z = noise_block(ensemble);

  Matrix vcal(nm, nm);
  vcal << kron(split.v2, im), kron(split.v0, im);
  const Matrix s2 = kron(split.s2(), im);

  Matrix k_block = vcal.transpose() * d.h_block * vcal;
  k_block.topLeftCorner(rm, rm) += eta * s2.transpose() * s2;

  d.r_prime = Matrix::Zero(nm + rm, nm + rm);
  d.r_prime.topLeftCorner(nm, nm) = k_block;
  d.r_prime.block(0, nm, rm, rm) = s2.transpose();
  d.r_prime.block(nm, 0, rm, rm) = -s2;
  d.b_prime = Matrix::Identity(nm + rm, nm + rm) - mu * d.r_prime;

  d.r_h = Matrix::Zero(nm + rm, nm + rm);
  d.r_h.topLeftCorner(nm, nm) = vcal.transpose() * d.r_z * vcal;

  const Matrix v2cal = vcal.leftCols(rm);
  const Matrix v0cal = vcal.rightCols(m);
  const Matrix h22 = v2cal.transpose() * d.h_block * v2cal;
  const Matrix h20 = v2cal.transpose() * d.h_block * v0cal;
  const Matrix h00 = v0cal.transpose() * d.h_block * v0cal;
  Eigen::LDLT<Matrix> h00_solver(h00);
  if (h00_solver.info() != Eigen::Success || !(h00_solver.vectorD().minCoeff() > 0.0)) {
    // Singular sum of covariances: the Schur complement is undefined.
    d.schur_z.resize(0, 0);
  } else {
    d.schur_z = h22 - h20 * h00_solver.solve(h20.transpose());
    d.schur_z = 0.5 * (d.schur_z + d.schur_z.transpose());
  }
  return d;
}

enum class HurwitzClass { stable, marginal, unstable };

inline std::string_view to_string(HurwitzClass c) {
  switch (c) {
    case HurwitzClass::stable: return "stable";
    case HurwitzClass::marginal: return "marginal";
    case HurwitzClass::unstable: return "unstable";
  }
  return "?";
}

/// Real parts within +-1e-12 of zero count as marginal so that spectra lying
/// on the imaginary axis do not flip with rounding.
inline constexpr double kHurwitzBand = 1e-12;

inline HurwitzClass classify_hurwitz(const Matrix& m) {
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues(m)) max_re = std::max(max_re, z.real());
  if (max_re < -kHurwitzBand) return HurwitzClass::stable;
  if (max_re > kHurwitzBand) return HurwitzClass::unstable;
  return HurwitzClass::marginal;
}

inline bool is_hurwitz(const Matrix& m) { return classify_hurwitz(m) == HurwitzClass::stable; }

/// Largest step size for which I - mu R' is Schur stable, or nothing when
/// -R' is not Hurwitz (no step size works).
inline std::optional<double> mu_bar(const Matrix& r_prime) {
  const auto ev = eigenvalues(r_prime);
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& z : ev) {
    if (!(z.real() > kHurwitzBand)) return std::nullopt;
    bound = std::min(bound, 2.0 * z.real() / std::norm(z));
  }
  if (ev.empty()) return std::nullopt;
  return bound;
}

/// Smallest regularization above which V^T H V + eta * blockdiag(S2^T S2, 0)
/// is positive definite.
inline double eta_bar(const DynamicsMatrices& d, const SpectralSplit& split) {
  if (d.schur_z.size() == 0) throw InvalidArgument("eta_bar: sum of covariances is singular");
  const double lmin = symmetric_eigenvalues(d.schur_z).minCoeff();
  const double scale = std::max(1.0, d.h_block.cwiseAbs().maxCoeff());
  if (lmin >= -1e-12 * scale) return 0.0;
  return -lmin / split.fiedler();
}

inline double eta_bar(const AgentEnsemble& ensemble, const SpectralSplit& split) {
  return eta_bar(build_dynamics(ensemble, split, 0.0, 0.0), split);
}

/// Eigenvalues of R' for a common covariance R_u: the eigenvalues of R_u,
/// plus both roots of t^2 - (s + eta l) t + l = 0 for every eigenvalue s of
/// R_u and every nonzero Laplacian eigenvalue l.
inline std::vector<Complex> closed_form_eigenvalues(const Matrix& r_u, const Vector& laplacian_eigs, double eta) {
  if (r_u.rows() != r_u.cols() || !is_symmetric(r_u, 1e-10)) {
    throw InvalidArgument("closed_form_eigenvalues: R_u must be symmetric");
  }
  const Vector sigma = symmetric_eigenvalues(r_u);
  if (sigma.size() == 0 || sigma.minCoeff() <= 0.0) {
    throw InvalidArgument("closed_form_eigenvalues: R_u must be positive definite");
  }
  std::vector<Complex> out(sigma.data(), sigma.data() + sigma.size());
  for (Index k = 0; k < laplacian_eigs.size(); ++k) {
    const double lk = laplacian_eigs(k);
    if (lk <= 1e-12) continue;
    for (Index j = 0; j < sigma.size(); ++j) {
      const double b = sigma(j) + eta * lk;
      const Complex root = std::sqrt(Complex(b * b - 4.0 * lk, 0.0));
      out.push_back(0.5 * (b + root));
      out.push_back(0.5 * (b - root));
    }
  }
  return out;
}

struct LargeEtaBounds {
  double general = 0.0;                  ///< 2 / (eta lambda_1(L))
  std::optional<double> fully_connected; ///< 2 / (eta N), complete graphs only
  double degree_necessary = 0.0;         ///< 2 (N-1) / (eta N delta), never below `general`
};

inline LargeEtaBounds step_bound_large_eta(const NetworkTopology& topology, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("step_bound_large_eta: eta must be positive");
  if (!topology.connected() || topology.num_nodes() < 2) {
    throw InvalidArgument("step_bound_large_eta: topology must be connected");
  }
  const double n = topology.num_nodes();
  // Complete graphs have lambda_1(L) = N exactly; use it rather than the
  // eigensolver's value, which can be off by a few ulps.
  const double lambda1 = topology.fully_connected() ? n : laplacian_spectrum(topology).maxCoeff();
  LargeEtaBounds b;
  b.general = 2.0 / (eta * lambda1);
  if (topology.fully_connected()) b.fully_connected = 2.0 / (eta * n);
  b.degree_necessary = 2.0 * (n - 1.0) / (eta * n * topology.max_degree());
  return b;
}

/// Sufficient mean-stability bound shared by diffusion and consensus:
/// min over agents of 2 / lambda_max(R_{u,k}), skipping zero covariances.
inline double diffusion_mu_bound(const AgentEnsemble& ensemble) {
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& r : ensemble.covariances()) {
    const double lmax = symmetric_eigenvalues(r).maxCoeff();
    if (lmax > 1e-12) bound = std::min(bound, 2.0 / lmax);
  }
  if (!std::isfinite(bound)) throw InvalidArgument("diffusion_mu_bound: all covariances are zero");
  return bound;
}

enum class MsdMethod { primal_dual, ah, al_large_eta, diffusion, consensus, noncoop };

inline std::string_view to_string(MsdMethod m) {
  switch (m) {
    case MsdMethod::primal_dual: return "primal_dual";
    case MsdMethod::ah: return "ah";
    case MsdMethod::al_large_eta: return "al_large_eta";
    case MsdMethod::diffusion: return "diffusion";
    case MsdMethod::consensus: return "consensus";
    case MsdMethod::noncoop: return "noncoop";
  }
  return "?";
}

namespace detail {

inline double noncoop_msd(const AgentEnsemble& e, double mu) {
  double s = 0.0;
  for (double v : e.noise_vars()) s += v;
  return mu * static_cast<double>(e.dim()) * s / (2.0 * e.num_agents());
}

inline double diffusion_msd(const AgentEnsemble& e, double mu) {
  Matrix weighted = Matrix::Zero(e.dim(), e.dim());
  for (int k = 0; k < e.num_agents(); ++k) weighted += e.noise_var(k) * e.covariance(k);
  Eigen::LDLT<Matrix> solver(e.covariance_sum());
  if (solver.info() != Eigen::Success || !(solver.vectorD().minCoeff() > 0.0)) {
    throw NumericalError("msd_theory: sum of covariances is singular");
  }
  return mu / (2.0 * e.num_agents()) * solver.solve(weighted).trace();
}

/// Pseudoinverse of L (x) I_M built from the spectral split.
inline Matrix lifted_laplacian_pinv(const SpectralSplit& split, Index m) {
  const Matrix core = split.v2 * split.laplacian_eigs.cwiseInverse().asDiagonal() * split.v2.transpose();
  return kron(core, Matrix::Identity(m, m));
}

}  // namespace detail

/// First-order (small mu) network MSD predictions in absolute units.
inline double msd_theory(const AgentEnsemble& ensemble, const NetworkTopology& topology, double mu, double eta,
                         MsdMethod method) {
  if (topology.num_nodes() != ensemble.num_agents()) {
    throw InvalidArgument("msd_theory: topology and ensemble sizes differ");
  }
  const int n = ensemble.num_agents();
  const Index m = ensemble.dim();
  switch (method) {
    case MsdMethod::noncoop:
    case MsdMethod::ah:
      return detail::noncoop_msd(ensemble, mu);
    case MsdMethod::diffusion:
    case MsdMethod::consensus:
      return detail::diffusion_msd(ensemble, mu);
    case MsdMethod::al_large_eta: {
      if (!(eta > 0.0)) throw InvalidArgument("msd_theory(al_large_eta): eta must be positive");
      const SpectralSplit split = spectral_split(topology);
      const Matrix pinv = detail::lifted_laplacian_pinv(split, m);
      return detail::diffusion_msd(ensemble, mu) + mu / (2.0 * n * eta) * (noise_block(ensemble) * pinv).trace();
    }
    case MsdMethod::primal_dual: {
      const Matrix system = covariance_block(ensemble) + eta * kron(laplacian(topology), Matrix::Identity(m, m));
      Eigen::LDLT<Matrix> solver(system);
      const double scale = std::max(1.0, system.cwiseAbs().maxCoeff());
      if (solver.info() != Eigen::Success || !(solver.vectorD().minCoeff() > 1e-12 * scale)) {
        std::string hint;
        if (topology.connected() && n > 1) {
          hint = " (eta_bar = " + std::to_string(eta_bar(ensemble, spectral_split(topology))) + ")";
        }
        throw NumericalError("msd_theory: H + eta L is singular; increase eta" + hint);
      }
      return mu / (2.0 * n) * (noise_block(ensemble) * solver.solve(Matrix::Identity(system.rows(), system.cols())))
                                  .trace();
    }
  }
  return 0.0;
}

/// Theory method matching a strategy configuration.
inline MsdMethod theory_method(const AlgorithmConfig& config) {
  switch (config.kind) {
    case AlgorithmKind::noncoop: return MsdMethod::noncoop;
    case AlgorithmKind::diffusion_atc: return MsdMethod::diffusion;
    case AlgorithmKind::consensus: return MsdMethod::consensus;
    case AlgorithmKind::primal_dual:
      return config.effective_eta() == 0.0 ? MsdMethod::ah : MsdMethod::primal_dual;
  }
  return MsdMethod::noncoop;
}

enum class FixedPointPath { automatic, lyapunov, explicit_solve };

/// Largest (2N-1)M for which the explicit block-Kronecker system is formed.
inline constexpr Index kExplicitFixedPointLimit = 64;

/// Steady-state network MSD of the mean-square recursion: Pi = B' Pi B'^T +
/// mu^2 R_h, MSD = Tr(Phi Pi) / N with Phi selecting the primal coordinates.
inline double msd_fixed_point(const DynamicsMatrices& d, FixedPointPath path = FixedPointPath::automatic) {
  const double rho = spectral_radius(d.b_prime);
  if (!(rho < 1.0)) {
    throw NumericalError("msd_fixed_point: rho(B') = " + std::to_string(rho) + " >= 1, no steady state");
  }
  const Index size = d.size();
  const Index nm = d.primal_size();
  const double n = d.num_agents;
  const double mu2 = d.mu * d.mu;

  if (path == FixedPointPath::explicit_solve) {
    if (size > kExplicitFixedPointLimit) {
      throw InvalidArgument("msd_fixed_point: explicit path limited to (2N-1)M <= 64");
    }
    const Matrix f = block_kron(d.b_prime.transpose(), d.b_prime.transpose(), d.dim);
    Matrix phi = Matrix::Zero(size, size);
    phi.topLeftCorner(nm, nm).setIdentity();
    const Vector rhs = bvec(phi, d.dim);
    const Vector sigma = (Matrix::Identity(f.rows(), f.cols()) - f).partialPivLu().solve(rhs);
    return mu2 / n * bvec(d.r_h, d.dim).dot(sigma);
  }

  // Smith doubling: after k sweeps Pi holds the first 2^k terms of the series.
  Matrix pi = mu2 * d.r_h;
  Matrix a = d.b_prime;
  for (int sweep = 0; sweep < 200; ++sweep) {
    pi += a * pi * a.transpose();
    // Once B'^(2^k) is negligible, later sweeps only add rounding noise.
    if (a.cwiseAbs().maxCoeff() < 1e-17) break;
    a = (a * a).eval();
    if (!a.allFinite() || !pi.allFinite()) throw NumericalError("msd_fixed_point: iteration overflowed");
  }
  return pi.topLeftCorner(nm, nm).trace() / n;
}

/// Mean-error transition matrix of any strategy at its configured step size.
/// For primal_dual this is B' in rotated coordinates; otherwise it acts on the
/// stacked primal errors.
inline Matrix mean_transition(const AlgorithmConfig& config, const AgentEnsemble& ensemble,
                              const NetworkTopology& topology) {
  const Index m = ensemble.dim();
  const Matrix h = covariance_block(ensemble);
  const Matrix id = Matrix::Identity(h.rows(), h.cols());
  switch (config.kind) {
    case AlgorithmKind::noncoop: return id - config.mu * h;
    case AlgorithmKind::diffusion_atc:
      return kron(config.combination->weights().transpose(), Matrix::Identity(m, m)) * (id - config.mu * h);
    case AlgorithmKind::consensus:
      return kron(config.combination->weights().transpose(), Matrix::Identity(m, m)) - config.mu * h;
    case AlgorithmKind::primal_dual:
      return build_dynamics(ensemble, spectral_split(topology), config.effective_eta(), config.mu).b_prime;
  }
  return id;
}

/// Stability summary for one configured strategy. Optional fields are absent
/// when the quantity does not apply (e.g. large-eta bound for eta = 0).
struct StabilityReport {
  std::string label;
  std::string family;
  double mu = 0.0;
  double eta = 0.0;
  std::optional<bool> hurwitz;
  std::optional<std::string> hurwitz_class;
  std::optional<double> mu_bar;
  std::optional<double> eta_bar;
  double rho_b_prime = 0.0;
  bool mean_stable = false;
  std::optional<double> topo_bound_large_eta;
  std::optional<double> diffusion_mu_bound;
};

inline StabilityReport stability_report(const AlgorithmConfig& config, const AgentEnsemble& ensemble,
                                        const NetworkTopology& topology) {
  StabilityReport r;
  r.label = config.label;
  r.family = config.family();
  r.mu = config.mu;
  r.eta = config.effective_eta();
  const bool networked = topology.connected() && topology.num_nodes() > 1;
  if (networked) r.eta_bar = eta_bar(ensemble, spectral_split(topology));
  try {
    r.diffusion_mu_bound = pdnet::diffusion_mu_bound(ensemble);
  } catch (const InvalidArgument&) {
  }

  if (config.kind == AlgorithmKind::primal_dual) {
    const DynamicsMatrices d = build_dynamics(ensemble, spectral_split(topology), r.eta, config.mu);
    const HurwitzClass c = classify_hurwitz(-d.r_prime);
    r.hurwitz = c == HurwitzClass::stable;
    r.hurwitz_class = std::string(to_string(c));
    r.mu_bar = pdnet::mu_bar(d.r_prime);
    r.rho_b_prime = spectral_radius(d.b_prime);
    if (r.eta > 0.0) r.topo_bound_large_eta = step_bound_large_eta(topology, r.eta).general;
  } else if (config.kind == AlgorithmKind::noncoop) {
    const Matrix h = covariance_block(ensemble);
    const HurwitzClass c = classify_hurwitz(-h);
    r.hurwitz = c == HurwitzClass::stable;
    r.hurwitz_class = std::string(to_string(c));
    r.mu_bar = pdnet::mu_bar(h);
    r.rho_b_prime = spectral_radius(mean_transition(config, ensemble, topology));
  } else {
    r.rho_b_prime = spectral_radius(mean_transition(config, ensemble, topology));
  }
  r.mean_stable = r.rho_b_prime < 1.0;
  return r;
}

}  // namespace pdnet
