#pragma once

#include <random>
#include <vector>

#include "pdnet/pdnet.hpp"

namespace pdnet::test {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

inline Matrix random_spd(Index m, std::mt19937_64& rng, double floor = 0.2) {
  const Matrix a = random_matrix(m, m, rng);
  return a * a.transpose() / static_cast<double>(m) + floor * Matrix::Identity(m, m);
}

inline NetworkTopology random_graph(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> p(0.0, 0.8);
  return random_connected_topology(n, p(rng), rng);
}

inline std::vector<Complex> as_complex(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace pdnet::test
