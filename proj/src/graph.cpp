#include "regx/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "regx/errors.hpp"

namespace regx {

EdgeMask::EdgeMask(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw ConformanceError("edge mask must be square");
  }
  const auto n = m_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = m_(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("edge mask entry (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") outside [0,1]");
      }
      if (v != m_(j, i)) {
        throw ValidationError("edge mask is not symmetric");
      }
    }
  }
}

EdgeMask EdgeMask::zeros(int n) { return EdgeMask(Matrix::Zero(n, n)); }

Graph::Graph(int id, Matrix features, Matrix adjacency, double label,
             std::optional<EdgeMask> gt_mask, std::vector<double> node_weights)
    : id_(id),
      x_(std::move(features)),
      a_(std::move(adjacency)),
      label_(label),
      gt_(std::move(gt_mask)),
      node_weights_(std::move(node_weights)) {
  const auto n = a_.rows();
  if (n <= 0 || a_.cols() != n) {
    throw ValidationError("adjacency must be a non-empty square matrix");
  }
  if (x_.rows() != n) {
    throw ConformanceError("feature rows (" + std::to_string(x_.rows()) +
                           ") differ from node count (" + std::to_string(n) +
                           ")");
  }
  if (!node_weights_.empty() &&
      static_cast<Eigen::Index>(node_weights_.size()) != n) {
    throw ConformanceError("node weight count differs from node count");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a_(i, i) != 0.0) {
      throw ValidationError("adjacency has a self loop at node " +
                            std::to_string(i));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = a_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("adjacency entries must be 0 or 1");
      }
      if (v != a_(j, i)) {
        throw ValidationError("adjacency is not symmetric");
      }
      if (v == 1.0) {
        edges_.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  if (gt_) {
    check_conforms(*gt_);
  }
}

Graph Graph::from_edges(int id, Matrix features, std::span<const Edge> edges,
                        double label, std::optional<EdgeMask> gt_mask,
                        std::vector<double> node_weights) {
  const auto n = features.rows();
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || e.u == e.v) {
      throw ValidationError("edge (" + std::to_string(e.u) + ", " +
                            std::to_string(e.v) + ") is invalid for " +
                            std::to_string(n) + " nodes");
    }
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return Graph(id, std::move(features), std::move(a), label,
               std::move(gt_mask), std::move(node_weights));
}

std::vector<double> Graph::edge_weights(const EdgeMask& m) const {
  check_conforms(m);
  std::vector<double> w;
  w.reserve(edges_.size());
  for (const auto& e : edges_) {
    w.push_back(m(e.u, e.v));
  }
  return w;
}

EdgeMask Graph::mask_from_edge_weights(std::span<const double> w) const {
  if (w.size() != edges_.size()) {
    throw ConformanceError("expected " + std::to_string(edges_.size()) +
                           " edge weights, got " + std::to_string(w.size()));
  }
  Matrix m = Matrix::Zero(num_nodes(), num_nodes());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    m(edges_[k].u, edges_[k].v) = w[k];
    m(edges_[k].v, edges_[k].u) = w[k];
  }
  return EdgeMask(std::move(m));
}

EdgeMask Graph::ones_mask() const { return EdgeMask(a_); }

void Graph::check_conforms(const EdgeMask& m) const {
  const auto n = a_.rows();
  if (m.size() != n) {
    throw ConformanceError("mask size " + std::to_string(m.size()) +
                           " does not match graph size " + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (m(i, j) > 0.0 && a_(i, j) == 0.0) {
        throw ConformanceError("mask has weight on non-edge (" +
                               std::to_string(i) + ", " + std::to_string(j) +
                               ")");
      }
    }
  }
}

Graph Graph::with_id(int id) const {
  Graph g = *this;
  g.id_ = id;
  return g;
}

bool operator==(const Graph& a, const Graph& b) {
  return a.id_ == b.id_ && a.label_ == b.label_ && a.x_.rows() == b.x_.rows() &&
         a.x_.cols() == b.x_.cols() && a.x_ == b.x_ &&
         a.a_.rows() == b.a_.rows() && a.a_ == b.a_ && a.gt_ == b.gt_ &&
         a.node_weights_ == b.node_weights_;
}

Explanation::Explanation(const Graph& g, EdgeMask mask)
    : graph_id_(g.id()), mask_(std::move(mask)) {
  g.check_conforms(mask_);
  scores_.reserve(g.edges().size());
  for (const auto& e : g.edges()) {
    scores_.push_back({e.u, e.v, mask_(e.u, e.v)});
  }
}

std::vector<double> Explanation::weights() const {
  std::vector<double> w;
  w.reserve(scores_.size());
  for (const auto& s : scores_) {
    w.push_back(s.weight);
  }
  return w;
}

Splits default_splits(int n) {
  Splits s;
  const int n_train = n * 8 / 10;
  const int n_expl = n / 10;
  for (int i = 0; i < n; ++i) {
    if (i < n_train) {
      s.train.push_back(i);
    } else if (i < n_train + n_expl) {
      s.explainer_train.push_back(i);
    } else {
      s.explainer_test.push_back(i);
    }
  }
  return s;
}

void check_splits(const Splits& s, int n) {
  std::set<int> seen;
  for (const auto* part : {&s.train, &s.explainer_train, &s.explainer_test}) {
    for (int i : *part) {
      if (i < 0 || i >= n) {
        throw ValidationError("split index " + std::to_string(i) +
                              " out of range for " + std::to_string(n) +
                              " graphs");
      }
      if (!seen.insert(i).second) {
        throw ValidationError("split index " + std::to_string(i) +
                              " appears twice");
      }
    }
  }
}

std::vector<const Graph*> GraphDataset::subset(std::span<const int> idx) const {
  std::vector<const Graph*> out;
  out.reserve(idx.size());
  for (int i : idx) {
    out.push_back(&graphs.at(static_cast<std::size_t>(i)));
  }
  return out;
}

Matrix apply_mask(const Graph& g, const EdgeMask& m) {
  g.check_conforms(m);
  return g.adjacency().cwiseProduct(m.matrix());
}

EdgeMask residual_mask(const Graph& g, const EdgeMask& m_star) {
  g.check_conforms(m_star);
  Matrix r = Matrix::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& e : g.edges()) {
    const double v = 1.0 - m_star(e.u, e.v);
    r(e.u, e.v) = v;
    r(e.v, e.u) = v;
  }
  return EdgeMask(std::move(r));
}

std::vector<Edge> threshold_topk(const Explanation& expl, int k) {
  const auto& s = expl.scores();
  if (k <= 0 || static_cast<std::size_t>(k) > s.size()) {
    throw RangeError("top-k of " + std::to_string(k) + " requested from " +
                     std::to_string(s.size()) + " edges");
  }
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // scores are already in (i, j) order, so a stable sort keeps the
  // lexicographic tie-break.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s[a].weight > s[b].weight;
  });
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    out.push_back({s[order[static_cast<std::size_t>(r)]].i,
                   s[order[static_cast<std::size_t>(r)]].j});
  }
  std::sort(out.begin(), out.end());
  return out;
}

EdgeMask topk_mask(const Graph& g, const Explanation& expl, int k) {
  Matrix m = Matrix::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& e : threshold_topk(expl, k)) {
    m(e.u, e.v) = 1.0;
    m(e.v, e.u) = 1.0;
  }
  return EdgeMask(std::move(m));
}

}  // namespace regx
