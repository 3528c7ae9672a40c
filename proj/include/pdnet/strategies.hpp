#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "pdnet/data_model.hpp"
#include "pdnet/error.hpp"
#include "pdnet/graph.hpp"
#include "pdnet/linalg.hpp"

namespace pdnet {

enum class AlgorithmKind { noncoop, diffusion_atc, consensus, primal_dual };

inline std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::noncoop: return "noncoop";
    case AlgorithmKind::diffusion_atc: return "diffusion_atc";
    case AlgorithmKind::consensus: return "consensus";
    case AlgorithmKind::primal_dual: return "primal_dual";
  }
  return "?";
}

inline AlgorithmKind parse_algorithm_kind(std::string_view s) {
  if (s == "noncoop") return AlgorithmKind::noncoop;
  if (s == "diffusion_atc" || s == "diffusion") return AlgorithmKind::diffusion_atc;
  if (s == "consensus") return AlgorithmKind::consensus;
  if (s == "primal_dual") return AlgorithmKind::primal_dual;
  throw InvalidArgument("unknown algorithm kind '" + std::string(s) + "'");
}

/// eta = mu^(-1/theta). Step sizes mu >= 1 give eta <= 1, outside the large-eta
/// regime the linked analysis assumes; they are rejected unless overridden.
inline double resolve_linked_step(double mu, double theta, bool allow_override = false) {
  if (!(mu > 0.0)) throw InvalidArgument("linked step: mu must be positive");
  if (!(theta > 1.0)) throw InvalidArgument("linked step: theta must exceed 1");
  if (mu >= 1.0 && !allow_override) {
    throw InvalidArgument("linked step: mu must be below 1 (eta would not exceed 1)");
  }
  return std::pow(mu, -1.0 / theta);
}

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::noncoop;
  double mu = 0.0;
  double eta = 0.0;                   ///< primal_dual only; 0 selects Arrow-Hurwicz.
  std::optional<double> theta;        ///< When set, eta is derived from mu.
  std::optional<CombinationMatrix> combination;  ///< diffusion_atc / consensus only.
  std::string label;
  bool allow_linked_override = false;

  double effective_eta() const {
    if (kind != AlgorithmKind::primal_dual) return 0.0;
    return theta ? resolve_linked_step(mu, *theta, allow_linked_override) : eta;
  }

  /// Short tag for the strategy family: noncoop, diffusion, consensus, ah or al.
  std::string family() const {
    switch (kind) {
      case AlgorithmKind::noncoop: return "noncoop";
      case AlgorithmKind::diffusion_atc: return "diffusion";
      case AlgorithmKind::consensus: return "consensus";
      case AlgorithmKind::primal_dual: return effective_eta() == 0.0 ? "ah" : "al";
    }
    return "?";
  }

  void validate(int num_nodes) const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("algorithm '" + label + "': mu must be positive");
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
      throw InvalidArgument("algorithm '" + label + "': eta must be nonnegative");
    }
    if (theta) (void)resolve_linked_step(mu, *theta, allow_linked_override);
    const bool combines = kind == AlgorithmKind::diffusion_atc || kind == AlgorithmKind::consensus;
    if (combines && !combination) {
      throw InvalidArgument("algorithm '" + label + "': combination matrix required");
    }
    if (combines && combination->size() != num_nodes) {
      throw InvalidArgument("algorithm '" + label + "': combination matrix size does not match topology");
    }
  }
};

/// Iterates of one run: row k of `primal` is w_k, row e of `dual` is lambda_e.
struct AlgState {
  Matrix primal;  ///< N x M
  Matrix dual;    ///< E x M, empty unless primal_dual
};

inline AlgState init_state(const AlgorithmConfig& config, const NetworkTopology& topology, Index dim) {
  AlgState s;
  s.primal = Matrix::Zero(topology.num_nodes(), dim);
  if (config.kind == AlgorithmKind::primal_dual) {
    if (topology.num_nodes() < 2 || topology.num_edges() == 0) {
      throw InvalidArgument("primal_dual needs at least one edge (dual variables live on edges)");
    }
    s.dual = Matrix::Zero(topology.num_edges(), dim);
  } else {
    s.dual.resize(0, dim);
  }
  return s;
}

namespace detail {

/// out.primal = in.primal + mu * diag(d - U w) U, the local LMS correction
/// evaluated at the previous iterate.
inline void adapt(const Matrix& w, const SampleBatch& batch, double mu, Matrix& out) {
  out = w;
  for (Index k = 0; k < w.rows(); ++k) {
    const double err = batch.observations(k) - batch.regressors.row(k).dot(w.row(k));
    out.row(k) += (mu * err) * batch.regressors.row(k);
  }
}

}  // namespace detail

// The *_into variants write a fresh state into `out` (which must not alias
// `in`) and reuse its storage; the plain forms return a new state.

inline void noncoop_step_into(const AlgState& in, const SampleBatch& batch, double mu, AlgState& out) {
  detail::adapt(in.primal, batch, mu, out.primal);
  out.dual = in.dual;
}

/// Adapt-then-combine: psi = local LMS step, then w_k = sum_l a_{lk} psi_l.
inline void diffusion_step_into(const AlgState& in, const SampleBatch& batch, const CombinationMatrix& a, double mu,
                                AlgState& out) {
  detail::adapt(in.primal, batch, mu, out.dual);  // out.dual used as scratch for psi
  out.primal.noalias() = a.weights().transpose() * out.dual;
  out.dual = in.dual;
}

/// Consensus: the combination acts on w_{i-1}, and the gradient is also taken
/// at w_{k,i-1} rather than at the combined iterate.
inline void consensus_step_into(const AlgState& in, const SampleBatch& batch, const CombinationMatrix& a, double mu,
                                AlgState& out) {
  detail::adapt(in.primal, batch, mu, out.dual);
  out.primal.noalias() = a.weights().transpose() * in.primal;
  out.primal += out.dual - in.primal;
  out.dual = in.dual;
}

/// Distributed augmented Lagrangian (Arrow-Hurwicz when eta = 0). Every term
/// reads the previous iterates, so the round is synchronous.
inline void primal_dual_step_into(const AlgState& in, const SampleBatch& batch, const NetworkTopology& topology,
                                  double mu, double eta, AlgState& out) {
  detail::adapt(in.primal, batch, mu, out.primal);
  out.dual = in.dual;
  const auto& edges = topology.edges();
  for (Index e = 0; e < static_cast<Index>(edges.size()); ++e) {
    const int k = edges[static_cast<std::size_t>(e)].lower;
    const int l = edges[static_cast<std::size_t>(e)].upper;
    // c_{ek} = +1, c_{el} = -1.
    const auto diff = in.primal.row(k) - in.primal.row(l);
    out.primal.row(k) -= mu * (in.dual.row(e) + eta * diff);
    out.primal.row(l) += mu * (in.dual.row(e) + eta * diff);
    out.dual.row(e) += mu * diff;
  }
}

inline void step_into(const AlgorithmConfig& config, const NetworkTopology& topology, const AlgState& in,
                      const SampleBatch& batch, AlgState& out) {
  switch (config.kind) {
    case AlgorithmKind::noncoop: noncoop_step_into(in, batch, config.mu, out); return;
    case AlgorithmKind::diffusion_atc: diffusion_step_into(in, batch, *config.combination, config.mu, out); return;
    case AlgorithmKind::consensus: consensus_step_into(in, batch, *config.combination, config.mu, out); return;
    case AlgorithmKind::primal_dual:
      primal_dual_step_into(in, batch, topology, config.mu, config.effective_eta(), out);
      return;
  }
}

inline AlgState noncoop_step(const AlgState& in, const SampleBatch& batch, double mu) {
  AlgState out;
  noncoop_step_into(in, batch, mu, out);
  return out;
}

inline AlgState diffusion_step(const AlgState& in, const SampleBatch& batch, const CombinationMatrix& a, double mu) {
  AlgState out;
  diffusion_step_into(in, batch, a, mu, out);
  return out;
}

inline AlgState consensus_step(const AlgState& in, const SampleBatch& batch, const CombinationMatrix& a, double mu) {
  AlgState out;
  consensus_step_into(in, batch, a, mu, out);
  return out;
}

inline AlgState primal_dual_step(const AlgState& in, const SampleBatch& batch, const NetworkTopology& topology,
                                 double mu, double eta) {
  AlgState out;
  primal_dual_step_into(in, batch, topology, mu, eta, out);
  return out;
}

inline AlgState step(const AlgorithmConfig& config, const NetworkTopology& topology, const AlgState& in,
                     const SampleBatch& batch) {
  AlgState out;
  step_into(config, topology, in, batch, out);
  return out;
}

/// (1/N) sum_k ||w - w_k||^2.
inline double network_msd(const Matrix& primal, const Vector& truth) {
  return (primal.rowwise() - truth.transpose()).squaredNorm() / static_cast<double>(primal.rows());
}

inline Vector agent_squared_errors(const Matrix& primal, const Vector& truth) {
  return (primal.rowwise() - truth.transpose()).rowwise().squaredNorm();
}

}  // namespace pdnet
