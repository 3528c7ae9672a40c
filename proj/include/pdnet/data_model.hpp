#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdnet/error.hpp"
#include "pdnet/linalg.hpp"

namespace pdnet {

/// Law of the standardized draw g in u = g F. Both choices have zero mean and
/// identity covariance, so the regressor moments are exactly R_{u,k}.
enum class RegressorDistribution {
  gaussian,
  rademacher,  ///< g entries are +-1 with equal probability.
};

inline std::string_view to_string(RegressorDistribution d) {
  return d == RegressorDistribution::gaussian ? "gaussian" : "rademacher";
}

inline RegressorDistribution parse_distribution(std::string_view s) {
  if (s == "gaussian") return RegressorDistribution::gaussian;
  if (s == "rademacher") return RegressorDistribution::rademacher;
  throw InvalidArgument("unknown regressor distribution '" + std::string(s) + "'");
}

struct EnsembleOptions {
  /// Accept a singular sum of covariances. Only meant for negative testing.
  bool allow_singular_sum = false;
  RegressorDistribution distribution = RegressorDistribution::gaussian;
};

/// Per-agent second-order statistics of the linear model d = u w + v.
class AgentEnsemble {
 public:
  static constexpr double kSymmetryTol = 1e-10;

  Index dim() const { return truth_.size(); }
  int num_agents() const { return static_cast<int>(covariances_.size()); }
  const Vector& truth() const { return truth_; }
  const std::vector<Matrix>& covariances() const { return covariances_; }
  const Matrix& covariance(int k) const { return covariances_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& noise_vars() const { return noise_vars_; }
  double noise_var(int k) const { return noise_vars_.at(static_cast<std::size_t>(k)); }
  RegressorDistribution distribution() const { return distribution_; }

  /// Square-root factor F_k with F_k^T F_k = R_{u,k}; u = g F_k.
  const Matrix& factor(int k) const { return factors_.at(static_cast<std::size_t>(k)); }

  /// Cross-covariance r_{du,k} = R_{u,k} w (noise is zero-mean and independent).
  Vector cross_covariance(int k) const { return covariance(k) * truth_; }

  Matrix covariance_sum() const {
    Matrix s = Matrix::Zero(dim(), dim());
    for (const auto& r : covariances_) s += r;
    return s;
  }

  /// True when every agent shares the same covariance matrix exactly.
  bool common_covariance() const {
    for (const auto& r : covariances_) {
      if (r != covariances_.front()) return false;
    }
    return true;
  }

 private:
  friend AgentEnsemble make_ensemble(Vector, std::vector<Matrix>, std::vector<double>, EnsembleOptions);

  Vector truth_;
  std::vector<Matrix> covariances_;
  std::vector<double> noise_vars_;
  std::vector<Matrix> factors_;
  RegressorDistribution distribution_ = RegressorDistribution::gaussian;
};

/// Validates the moments and precomputes eigendecomposition-based factors,
/// which also work for singular (PSD) covariances.
inline AgentEnsemble make_ensemble(Vector truth, std::vector<Matrix> covariances, std::vector<double> noise_vars,
                                   EnsembleOptions options = {}) {
  const Index m = truth.size();
  if (m < 1) throw InvalidArgument("ensemble: dimension must be positive");
  if (covariances.empty()) throw InvalidArgument("ensemble: need at least one agent");
  if (covariances.size() != noise_vars.size()) {
    throw InvalidArgument("ensemble: covariance and noise lists differ in length");
  }
  if (!truth.allFinite()) throw InvalidArgument("ensemble: truth vector must be finite");

  AgentEnsemble ens;
  for (std::size_t k = 0; k < covariances.size(); ++k) {
    const Matrix& r = covariances[k];
    const std::string who = "ensemble: agent " + std::to_string(k + 1);
    if (r.rows() != m || r.cols() != m) throw InvalidArgument(who + " covariance has wrong size");
    if (!r.allFinite() || !is_symmetric(r, AgentEnsemble::kSymmetryTol)) {
      throw InvalidArgument(who + " covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (r + r.transpose()));
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -AgentEnsemble::kSymmetryTol * scale) {
      throw InvalidArgument(who + " covariance is not positive semidefinite");
    }
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    ens.factors_.push_back(root.asDiagonal() * eig.eigenvectors().transpose());
    if (!(noise_vars[k] >= 0.0) || !std::isfinite(noise_vars[k])) {
      throw InvalidArgument(who + " noise variance must be finite and nonnegative");
    }
  }
  ens.truth_ = std::move(truth);
  ens.covariances_ = std::move(covariances);
  ens.noise_vars_ = std::move(noise_vars);
  ens.distribution_ = options.distribution;

  if (!options.allow_singular_sum) {
    const Matrix sum = ens.covariance_sum();
    const double lmin = symmetric_eigenvalues(sum).minCoeff();
    if (lmin <= 1e-12 * std::max(1.0, sum.cwiseAbs().maxCoeff())) {
      throw InvalidArgument("ensemble: sum of covariances is singular (model not identifiable)");
    }
  }
  return ens;
}

/// One time instant of data across the network: row k of `regressors` is u_{k,i}.
struct SampleBatch {
  Matrix regressors;  ///< N x M
  Vector observations;
};

/// Per-trial random source. The engine seed is a SplitMix64 hash of the
/// (master seed, stream index) pair, so trials are reproducible no matter
/// which thread runs them.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream = 0)
      : engine_(derive_seed(master_seed, stream)) {}

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  }

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Fills `batch` in place (no allocation once sized). Draw order per agent:
/// M regressor coordinates, then the noise sample.
inline void sample_step_into(const AgentEnsemble& ensemble, RandomStream& rng, SampleBatch& batch) {
  const int n = ensemble.num_agents();
  const Index m = ensemble.dim();
  batch.regressors.resize(n, m);
  batch.observations.resize(n);
  Eigen::Matrix<double, 1, Eigen::Dynamic> g(m);
  const bool gaussian = ensemble.distribution() == RegressorDistribution::gaussian;
  for (int k = 0; k < n; ++k) {
    for (Index j = 0; j < m; ++j) g(j) = gaussian ? rng.normal() : rng.sign();
    batch.regressors.row(k).noalias() = g * ensemble.factor(k);
    const double v = std::sqrt(ensemble.noise_var(k)) * rng.normal();
    batch.observations(k) = batch.regressors.row(k).dot(ensemble.truth()) + v;
  }
}

inline SampleBatch sample_step(const AgentEnsemble& ensemble, RandomStream& rng) {
  SampleBatch batch;
  sample_step_into(ensemble, rng, batch);
  return batch;
}

inline Vector random_unit_vector(Index dim, RandomStream& rng) {
  Vector v(dim);
  do {
    for (Index j = 0; j < dim; ++j) v(j) = rng.normal();
  } while (v.norm() == 0.0);
  return v.normalized();
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign fix).
inline Matrix random_orthogonal(Index dim, RandomStream& rng) {
  Matrix g(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace pdnet
