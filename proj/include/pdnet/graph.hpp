#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdnet/error.hpp"
#include "pdnet/linalg.hpp"

namespace pdnet {

/// Undirected edge between two 0-based node indices, stored lower index first.
struct Edge {
  int lower = 0;
  int upper = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph over agents 0..N-1. Edges are kept in canonical
/// lexicographic order, which fixes the row order of the incidence matrix.
class NetworkTopology {
 public:
  int num_nodes() const { return num_nodes_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Closed neighborhood: node k itself plus every adjacent node, ascending.
  const std::vector<int>& neighborhood(int k) const { return neighborhoods_.at(static_cast<std::size_t>(k)); }

  /// Number of adjacent nodes (|N_k| - 1).
  int degree(int k) const { return static_cast<int>(neighborhood(k).size()) - 1; }
  int max_degree() const {
    int d = 0;
    for (int k = 0; k < num_nodes_; ++k) d = std::max(d, degree(k));
    return d;
  }
  bool connected() const { return connected_; }
  bool fully_connected() const { return num_edges() == num_nodes_ * (num_nodes_ - 1) / 2; }
  bool adjacent(int k, int l) const {
    const auto& nk = neighborhood(k);
    return k != l && std::binary_search(nk.begin(), nk.end(), l);
  }

 private:
  friend NetworkTopology build_topology(int num_nodes, std::vector<Edge> edges);

  int num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighborhoods_;
  bool connected_ = false;
};

/// Validates and canonicalizes a graph. Pairs may be given in either order;
/// self-loops, out-of-range endpoints and duplicates are rejected.
inline NetworkTopology build_topology(int num_nodes, std::vector<Edge> edges) {
  if (num_nodes < 1) throw InvalidArgument("build_topology: need at least one node");
  for (auto& e : edges) {
    if (e.lower == e.upper) {
      throw InvalidArgument("build_topology: self-loop on node " + std::to_string(e.lower + 1));
    }
    if (e.lower > e.upper) std::swap(e.lower, e.upper);
    if (e.lower < 0 || e.upper >= num_nodes) {
      throw InvalidArgument("build_topology: edge (" + std::to_string(e.lower + 1) + "," +
                            std::to_string(e.upper + 1) + ") out of range");
    }
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    throw InvalidArgument("build_topology: duplicate edge (" + std::to_string(dup->lower + 1) + "," +
                          std::to_string(dup->upper + 1) + ")");
  }

  NetworkTopology t;
  t.num_nodes_ = num_nodes;
  t.edges_ = std::move(edges);
  t.neighborhoods_.assign(static_cast<std::size_t>(num_nodes), {});
  for (int k = 0; k < num_nodes; ++k) t.neighborhoods_[static_cast<std::size_t>(k)].push_back(k);
  for (const auto& e : t.edges_) {
    t.neighborhoods_[static_cast<std::size_t>(e.lower)].push_back(e.upper);
    t.neighborhoods_[static_cast<std::size_t>(e.upper)].push_back(e.lower);
  }
  for (auto& nk : t.neighborhoods_) std::sort(nk.begin(), nk.end());

  // Breadth-first traversal from node 0.
  std::vector<bool> seen(static_cast<std::size_t>(num_nodes), false);
  std::vector<int> frontier{0};
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int k = frontier.back();
    frontier.pop_back();
    for (int l : t.neighborhoods_[static_cast<std::size_t>(k)]) {
      if (!seen[static_cast<std::size_t>(l)]) {
        seen[static_cast<std::size_t>(l)] = true;
        ++reached;
        frontier.push_back(l);
      }
    }
  }
  t.connected_ = reached == num_nodes;
  return t;
}

/// E x N signed incidence matrix: +1 at the lower endpoint, -1 at the upper.
inline Matrix incidence_matrix(const NetworkTopology& topology) {
  Matrix c = Matrix::Zero(topology.num_edges(), topology.num_nodes());
  for (int e = 0; e < topology.num_edges(); ++e) {
    const auto& edge = topology.edges()[static_cast<std::size_t>(e)];
    c(e, edge.lower) = 1.0;
    c(e, edge.upper) = -1.0;
  }
  return c;
}

inline Matrix laplacian(const NetworkTopology& topology) {
  const int n = topology.num_nodes();
  Matrix l = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) l(k, k) = topology.degree(k);
  for (const auto& e : topology.edges()) {
    l(e.lower, e.upper) = -1.0;
    l(e.upper, e.lower) = -1.0;
  }
  return l;
}

/// Laplacian eigenvalues in ascending order.
inline Vector laplacian_spectrum(const NetworkTopology& topology) {
  return symmetric_eigenvalues(laplacian(topology));
}

/// Algebraic connectivity (second-smallest Laplacian eigenvalue); 0 for N = 1.
inline double fiedler_value(const NetworkTopology& topology) {
  if (topology.num_nodes() < 2) return 0.0;
  return std::max(0.0, laplacian_spectrum(topology)(1));
}

/// SVD factors of the incidence matrix, C = U S V^T with V = [V2 | 1/sqrt(N)].
struct SpectralSplit {
  Matrix u_factor;        ///< E x E orthogonal.
  Vector singular_values; ///< N-1 positive singular values, descending (diagonal of S2).
  Matrix v2;              ///< N x (N-1), columns orthogonal to the all-ones vector.
  Vector v0;              ///< 1/sqrt(N) * ones(N).
  Vector laplacian_eigs;  ///< Nonzero Laplacian eigenvalues, diag(S2)^2, descending.

  Matrix s2() const { return singular_values.asDiagonal(); }
  Matrix v() const {
    Matrix out(v2.rows(), v2.cols() + 1);
    out << v2, v0;
    return out;
  }
  /// E x N padded singular-value matrix.
  Matrix s_padded() const {
    const Index n = v2.rows();
    Matrix out = Matrix::Zero(u_factor.rows(), n);
    out.topLeftCorner(n - 1, n - 1) = s2();
    return out;
  }
  double largest_laplacian_eig() const { return laplacian_eigs.size() ? laplacian_eigs(0) : 0.0; }
  double fiedler() const { return laplacian_eigs.size() ? laplacian_eigs(laplacian_eigs.size() - 1) : 0.0; }
};

/// Spectral split of a connected topology. Singular values are sorted
/// descending and each column of V2 has its first nonzero entry positive.
/// With repeated singular values the basis inside each eigenspace is
/// whatever the symmetric eigensolver returns; every downstream spectrum is
/// invariant to that choice.
inline SpectralSplit spectral_split(const NetworkTopology& topology) {
  const int n = topology.num_nodes();
  const int e = topology.num_edges();
  if (!topology.connected() || n < 2) {
    throw InvalidArgument("spectral_split: topology must be connected with at least two nodes");
  }
  const Matrix c = incidence_matrix(topology);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c.transpose() * c);
  if (solver.info() != Eigen::Success) throw NumericalError("spectral_split: eigensolver failed");

  SpectralSplit split;
  split.v0 = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));

  // Ascending order: index 0 is the null space, the rest reversed gives descending.
  split.v2.resize(n, n - 1);
  split.laplacian_eigs.resize(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    const int src = n - 1 - j;
    split.laplacian_eigs(j) = solver.eigenvalues()(src);
    split.v2.col(j) = solver.eigenvectors().col(src);
  }
  if (split.laplacian_eigs(n - 2) <= 1e-10) {
    throw InvalidArgument("spectral_split: zero Fiedler value (disconnected topology)");
  }
  // Re-orthonormalize against the exact null vector so V2^T 1 vanishes to rounding.
  for (int j = 0; j < n - 1; ++j) {
    Vector col = split.v2.col(j);
    col -= split.v0 * split.v0.dot(col);
    for (int i = 0; i < j; ++i) col -= split.v2.col(i) * split.v2.col(i).dot(col);
    col.normalize();
    for (int r = 0; r < n; ++r) {
      if (std::abs(col(r)) > 1e-12) {
        if (col(r) < 0) col = -col;
        break;
      }
    }
    split.v2.col(j) = col;
  }
  split.singular_values = split.laplacian_eigs.cwiseSqrt();

  // U = [C V2 S2^{-1} | orthonormal completion].
  const Matrix u1 = c * split.v2 * split.singular_values.cwiseInverse().asDiagonal();
  split.u_factor.resize(e, e);
  split.u_factor.leftCols(n - 1) = u1;
  if (e > n - 1) {
    Eigen::HouseholderQR<Matrix> qr(u1);
    const Matrix q = qr.householderQ() * Matrix::Identity(e, e);
    split.u_factor.rightCols(e - (n - 1)) = q.rightCols(e - (n - 1));
  }
  return split;
}

/// Nonnegative N x N weights a(l,k) with columns summing to one (left
/// stochastic) and a(l,k) = 0 for l outside the neighborhood of k.
class CombinationMatrix {
 public:
  static constexpr double kStochasticTol = 1e-12;

  static CombinationMatrix from_weights(const NetworkTopology& topology, Matrix weights) {
    const int n = topology.num_nodes();
    if (weights.rows() != n || weights.cols() != n) {
      throw InvalidArgument("combination matrix must be N x N");
    }
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        if (weights(l, k) < 0) throw InvalidArgument("combination weights must be nonnegative");
        if (weights(l, k) != 0 && l != k && !topology.adjacent(l, k)) {
          throw InvalidArgument("combination weight on a non-edge (" + std::to_string(l + 1) + "," +
                                std::to_string(k + 1) + ")");
        }
      }
      if (std::abs(weights.col(k).sum() - 1.0) > kStochasticTol) {
        throw InvalidArgument("combination matrix must be left-stochastic (columns sum to one)");
      }
    }
    CombinationMatrix a;
    a.weights_ = std::move(weights);
    return a;
  }

  const Matrix& weights() const { return weights_; }
  int size() const { return static_cast<int>(weights_.rows()); }
  bool doubly_stochastic() const {
    return (weights_.rowwise().sum().array() - 1.0).abs().maxCoeff() <= kStochasticTol;
  }

 private:
  Matrix weights_;
};

/// Metropolis rule: a(l,k) = 1 / max(|N_k|, |N_l|) for neighbors, remainder on
/// the diagonal. Symmetric and doubly stochastic.
inline CombinationMatrix metropolis_weights(const NetworkTopology& topology) {
  if (!topology.connected()) throw InvalidArgument("metropolis_weights: topology must be connected");
  const int n = topology.num_nodes();
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : topology.edges()) {
    const double w = 1.0 / std::max(topology.degree(e.lower) + 1, topology.degree(e.upper) + 1);
    a(e.lower, e.upper) = w;
    a(e.upper, e.lower) = w;
  }
  for (int k = 0; k < n; ++k) a(k, k) = 1.0 - a.col(k).sum();
  return CombinationMatrix::from_weights(topology, std::move(a));
}

inline NetworkTopology complete_topology(int n) {
  std::vector<Edge> edges;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) edges.push_back({k, l});
  return build_topology(n, std::move(edges));
}

inline NetworkTopology path_topology(int n) {
  std::vector<Edge> edges;
  for (int k = 0; k + 1 < n; ++k) edges.push_back({k, k + 1});
  return build_topology(n, std::move(edges));
}

inline NetworkTopology star_topology(int n) {
  std::vector<Edge> edges;
  for (int k = 1; k < n; ++k) edges.push_back({0, k});
  return build_topology(n, std::move(edges));
}

/// Random connected graph: a random recursive tree (node k attaches to a
/// uniformly chosen earlier node) plus every remaining pair with probability
/// `extra_edge_prob`.
template <class Rng>
NetworkTopology random_connected_topology(int n, double extra_edge_prob, Rng& rng) {
  if (n < 1) throw InvalidArgument("random_connected_topology: need at least one node");
  std::set<Edge> edges;
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> parent(0, k - 1);
    edges.insert({parent(rng), k});
  }
  std::bernoulli_distribution extra(extra_edge_prob);
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      if (!edges.contains({k, l}) && extra(rng)) edges.insert({k, l});
    }
  }
  return build_topology(n, {edges.begin(), edges.end()});
}

/// Reads the text format: a header line "N E" followed by E lines "k l" with
/// 1-based node indices. Blank lines and '#' comments are ignored.
inline NetworkTopology parse_topology(std::istream& in) {
  std::vector<long long> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        tokens.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InvalidArgument("topology: not an integer: '" + tok + "'");
      }
    }
  }
  if (tokens.size() < 2) throw InvalidArgument("topology: missing 'N E' header");
  const long long n = tokens[0];
  const long long e = tokens[1];
  if (n < 1 || e < 0) throw InvalidArgument("topology: invalid header");
  if (static_cast<long long>(tokens.size()) != 2 + 2 * e) {
    throw InvalidArgument("topology: expected " + std::to_string(e) + " edge lines");
  }
  std::vector<Edge> edges;
  for (long long i = 0; i < e; ++i) {
    const long long k = tokens[static_cast<std::size_t>(2 + 2 * i)];
    const long long l = tokens[static_cast<std::size_t>(3 + 2 * i)];
    if (k < 1 || l < 1 || k > n || l > n) {
      throw InvalidArgument("topology: edge (" + std::to_string(k) + "," + std::to_string(l) + ") out of range");
    }
    edges.push_back({static_cast<int>(k - 1), static_cast<int>(l - 1)});
  }
  return build_topology(static_cast<int>(n), std::move(edges));
}

inline NetworkTopology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("topology: cannot open '" + path + "'");
  return parse_topology(in);
}

inline std::string format_topology(const NetworkTopology& topology) {
  std::ostringstream out;
  out << topology.num_nodes() << ' ' << topology.num_edges() << '\n';
  for (const auto& e : topology.edges()) out << e.lower + 1 << ' ' << e.upper + 1 << '\n';
  return out.str();
}

}  // namespace pdnet
