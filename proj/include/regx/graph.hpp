#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace regx {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Undirected edge with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Symmetric [0,1]-valued n x n matrix. Construction validates range and
/// symmetry; support against a particular graph is checked by
/// Graph::check_conforms.
class EdgeMask {
 public:
  EdgeMask() = default;
  explicit EdgeMask(Matrix m);

  static EdgeMask zeros(int n);

  int size() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

  friend bool operator==(const EdgeMask& a, const EdgeMask& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

/// Immutable undirected graph with node features and a regression label.
class Graph {
 public:
  Graph() = default;

  /// Validates: square binary symmetric adjacency with zero diagonal, feature
  /// rows == n, gt mask support inside the adjacency support.
  Graph(int id, Matrix features, Matrix adjacency, double label,
        std::optional<EdgeMask> gt_mask = std::nullopt,
        std::vector<double> node_weights = {});

  static Graph from_edges(int id, Matrix features, std::span<const Edge> edges,
                          double label,
                          std::optional<EdgeMask> gt_mask = std::nullopt,
                          std::vector<double> node_weights = {});

  int id() const { return id_; }
  int num_nodes() const { return static_cast<int>(a_.rows()); }
  int feature_dim() const { return static_cast<int>(x_.cols()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  double label() const { return label_; }

  const Matrix& features() const { return x_; }
  const Matrix& adjacency() const { return a_; }
  const std::optional<EdgeMask>& gt_mask() const { return gt_; }
  const std::vector<double>& node_weights() const { return node_weights_; }

  /// Existing edges in upper-triangular row-major order.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Mask entries read off at edges(), in the same order.
  std::vector<double> edge_weights(const EdgeMask& m) const;

  /// Builds a mask from per-edge weights aligned with edges().
  EdgeMask mask_from_edge_weights(std::span<const double> w) const;

  EdgeMask ones_mask() const;

  /// Throws ConformanceError if m is not an n x n mask supported on edges.
  void check_conforms(const EdgeMask& m) const;

  /// Same graph with a different id (used when datasets are re-indexed).
  Graph with_id(int id) const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  int id_ = 0;
  Matrix x_;
  Matrix a_;
  double label_ = 0.0;
  std::optional<EdgeMask> gt_;
  std::vector<double> node_weights_;
  std::vector<Edge> edges_;
};

/// Per-edge importance attached to a graph id.
struct EdgeScore {
  int i = 0;
  int j = 0;
  double weight = 0.0;
  friend bool operator==(const EdgeScore&, const EdgeScore&) = default;
};

class Explanation {
 public:
  Explanation() = default;
  Explanation(const Graph& g, EdgeMask mask);

  int graph_id() const { return graph_id_; }
  const EdgeMask& mask() const { return mask_; }
  const std::vector<EdgeScore>& scores() const { return scores_; }

  std::vector<double> weights() const;

 private:
  int graph_id_ = 0;
  EdgeMask mask_;
  std::vector<EdgeScore> scores_;
};

struct Splits {
  std::vector<int> train;
  std::vector<int> explainer_train;
  std::vector<int> explainer_test;
  friend bool operator==(const Splits&, const Splits&) = default;
};

/// 8:1:1 contiguous split of [0, n).
Splits default_splits(int n);

/// Throws ValidationError on duplicate or out-of-range indices.
void check_splits(const Splits& s, int n);

struct GraphDataset {
  std::string name;
  std::uint64_t seed = 0;
  std::string generator_version;
  std::vector<Graph> graphs;
  Splits splits;

  std::vector<const Graph*> subset(std::span<const int> idx) const;
  friend bool operator==(const GraphDataset&, const GraphDataset&) = default;
};

/// a ⊙ m.
Matrix apply_mask(const Graph& g, const EdgeMask& m);

/// 1 - m on every existing edge, 0 elsewhere.
EdgeMask residual_mask(const Graph& g, const EdgeMask& m_star);

/// The k highest-weighted edges; ties go to the lexicographically smaller
/// (i, j). Returned in (i, j) order.
std::vector<Edge> threshold_topk(const Explanation& expl, int k);

/// Hard mask keeping the top-k edges of an explanation.
EdgeMask topk_mask(const Graph& g, const Explanation& expl, int k);

}  // namespace regx
