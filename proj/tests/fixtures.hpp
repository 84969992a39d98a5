#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "regx/graph.hpp"
#include "regx/random.hpp"

namespace regx::test {

inline RowVector random_row(Rng& rng, int n, double scale = 1.0) {
  RowVector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

inline Matrix random_matrix(Rng& rng, int r, int c, double scale = 1.0) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) m.row(i) = random_row(rng, c, scale);
  return m;
}

/// Ring on n nodes plus random chords, random features.
inline Graph ring_graph(Rng& rng, int id, int n, int d, double chord_prob, double label = 0.0) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1) || uniform01(rng) < chord_prob) {
        edges.push_back({i, j});
      }
    }
  }
  return Graph::from_edges(id, random_matrix(rng, n, d), edges, label);
}

inline Graph er_graph(Rng& rng, int id, int n, double p, int d = 3) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform01(rng) < p) edges.push_back({i, j});
    }
  }
  return Graph::from_edges(id, Matrix::Ones(n, d), edges, 0.0);
}

inline Graph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return Graph::from_edges(0, Matrix::Ones(n, 1), edges, 0.0);
}

inline Graph cycle_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    edges.push_back({std::min(i, j), std::max(i, j)});
  }
  return Graph::from_edges(0, Matrix::Ones(n, 1), edges, 0.0);
}

/// 0 - 1 - 2
inline Graph path3() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  return Graph::from_edges(0, Matrix::Ones(3, 2), edges, 1.0);
}

inline EdgeMask random_mask(Rng& rng, const Graph& g) {
  std::vector<double> w(static_cast<std::size_t>(g.num_edges()));
  for (double& v : w) v = uniform01(rng);
  return g.mask_from_edge_weights(w);
}

/// Node i of g becomes node perm[i].
inline Graph permuted(const Graph& g, const std::vector<int>& perm) {
  const int n = g.num_nodes();
  Matrix x(n, g.feature_dim());
  for (int i = 0; i < n; ++i) x.row(perm[static_cast<std::size_t>(i)]) = g.features().row(i);
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const int a = perm[static_cast<std::size_t>(e.u)], b = perm[static_cast<std::size_t>(e.v)];
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end());
  return Graph::from_edges(g.id(), std::move(x), edges, g.label());
}

inline std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform01(rng) * (i + 1));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

/// Central difference of f at x (x is restored).
template <typename F>
double central_diff(F&& f, double& x, double h) {
  const double x0 = x;
  x = x0 + h;
  const double up = f();
  x = x0 - h;
  const double down = f();
  x = x0;
  return (up - down) / (2.0 * h);
}

inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace regx::test
