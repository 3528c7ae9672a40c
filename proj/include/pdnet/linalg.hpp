#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "pdnet/error.hpp"

namespace pdnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Matrix block_diag(std::span<const Matrix> blocks) {
  Index rows = 0;
  Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0;
  Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

/// Eigenvalues of a general real square matrix.
inline std::vector<Complex> eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("eigenvalues: matrix must be square");
  }
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Ascending eigenvalues of a symmetric matrix.
inline Vector symmetric_eigenvalues(const Matrix& m) {
  if (m.rows() == 0) return Vector{};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric_eigenvalues: eigensolver did not converge");
  }
  return solver.eigenvalues();
}

inline double spectral_radius(const Matrix& m) {
  double rho = 0.0;
  for (const auto& z : eigenvalues(m)) rho = std::max(rho, std::abs(z));
  return rho;
}

inline bool is_symmetric(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

/// Block vectorization: every `block` x `block` sub-matrix is vectorized
/// column-major, and the pieces are stacked block-column by block-column.
inline Vector bvec(const Matrix& x, Index block) {
  if (block <= 0 || x.rows() != x.cols() || x.rows() % block != 0) {
    throw InvalidArgument("bvec: matrix must be square with dimension divisible by block size");
  }
  const Index n = x.rows() / block;
  const Index bb = block * block;
  Vector out(x.size());
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Matrix piece = x.block(i * block, j * block, block, block);
      out.segment((j * n + i) * bb, bb) = Eigen::Map<const Vector>(piece.data(), bb);
    }
  }
  return out;
}

/// Inverse of bvec.
inline Matrix unbvec(const Vector& v, Index block) {
  const Index bb = block * block;
  if (block <= 0 || v.size() % bb != 0) {
    throw InvalidArgument("unbvec: vector length must be a multiple of block^2");
  }
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size() / bb))));
  if (n * n * bb != v.size()) {
    throw InvalidArgument("unbvec: vector length is not a square number of blocks");
  }
  Matrix out(n * block, n * block);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      out.block(i * block, j * block, block, block) =
          Eigen::Map<const Matrix>(v.data() + (j * n + i) * bb, block, block);
    }
  }
  return out;
}

/// Tracy-Singh block Kronecker product with square `block` partitions. Pairs
/// with bvec through bvec(A C B) = block_kron(B^T, A) bvec(C).
inline Matrix block_kron(const Matrix& a, const Matrix& b, Index block) {
  if (block <= 0 || a.rows() != a.cols() || b.rows() != b.cols() || a.rows() % block != 0 ||
      b.rows() % block != 0) {
    throw InvalidArgument("block_kron: operands must be square with dimension divisible by block size");
  }
  const Index p = a.rows() / block;
  const Index q = b.rows() / block;
  const Index bb = block * block;
  Matrix out(p * q * bb, p * q * bb);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      const Matrix aij = a.block(i * block, j * block, block, block);
      for (Index k = 0; k < q; ++k) {
        for (Index l = 0; l < q; ++l) {
          out.block((i * q + k) * bb, (j * q + l) * bb, bb, bb) =
              kron(aij, b.block(k * block, l * block, block, block));
        }
      }
    }
  }
  return out;
}

/// Greedy minimal-distance matching between two multisets of complex
/// numbers. Returns the largest distance among matched pairs, or +inf when
/// the sizes differ.
inline double match_spectra(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  struct Pair {
    double dist;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) pairs.push_back({std::abs(a[i] - b[j]), i, j});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.dist < y.dist; });
  std::vector<bool> used_a(a.size(), false);
  std::vector<bool> used_b(b.size(), false);
  double worst = 0.0;
  std::size_t matched = 0;
  for (const auto& p : pairs) {
    if (used_a[p.i] || used_b[p.j]) continue;
    used_a[p.i] = used_b[p.j] = true;
    worst = std::max(worst, p.dist);
    if (++matched == a.size()) break;
  }
  return worst;
}

inline double to_db(double value) { return 10.0 * std::log10(value); }

}  // namespace pdnet
