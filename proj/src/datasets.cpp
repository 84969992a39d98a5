#include "regx/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "regx/dataset_io.hpp"
#include "regx/errors.hpp"
#include "regx/text_io.hpp"

namespace regx::datasets {

namespace {

// Stream tags keep the per-graph RNG streams of different generators apart.
enum StreamTag : std::uint64_t {
  kVolumeStream = 1,
  kCountingStream = 2,
  kTriangleStream = 3,
};

struct MotifGraphParts {
  std::vector<Edge> edges;
  std::vector<Edge> gt_edges;
  MotifLayout layout;
};

// Base BA graph on [0, base), then `count` houses appended one after another,
// each tied to a uniformly chosen base node by a single edge from a uniformly
// chosen motif node.
MotifGraphParts build_motif_graph(int base, int count, int m, Rng& rng) {
  MotifGraphParts parts;
  parts.edges = barabasi_albert_edges(base, m, rng);
  parts.layout.base_nodes = base;
  for (int k = 0; k < count; ++k) {
    const int first = base + 5 * k;
    const auto house = house_edges(first);
    parts.edges.insert(parts.edges.end(), house.begin(), house.end());
    parts.gt_edges.insert(parts.gt_edges.end(), house.begin(), house.end());
    std::vector<int> nodes(5);
    for (int i = 0; i < 5; ++i) nodes[static_cast<std::size_t>(i)] = first + i;
    parts.layout.motifs.push_back(std::move(nodes));
    const int motif_node = first + uniform_int(rng, 0, 4);
    const int base_node = uniform_int(rng, 0, base - 1);
    const Edge attach{std::min(motif_node, base_node),
                      std::max(motif_node, base_node)};
    parts.edges.push_back(attach);
    parts.layout.attachments.push_back(attach);
  }
  return parts;
}

EdgeMask mask_of(int n, const std::vector<Edge>& edges) {
  Matrix m = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    m(e.u, e.v) = 1.0;
    m(e.v, e.u) = 1.0;
  }
  return EdgeMask(std::move(m));
}

GraphDataset make_dataset(const std::string& name, const GenConfig& cfg,
                          std::vector<Graph> graphs) {
  GraphDataset ds;
  ds.name = name;
  ds.seed = cfg.seed;
  ds.generator_version = kGeneratorVersion;
  ds.graphs = std::move(graphs);
  ds.splits = default_splits(static_cast<int>(ds.graphs.size()));
  return ds;
}

}  // namespace

void GenConfig::validate() const {
  if (n_graphs <= 0) throw ValidationError("n_graphs must be positive");
  if (base_size <= 0) throw ValidationError("base_size must be positive");
  if (motif_size != 5) {
    throw ValidationError("motif_size must be 5 (house motif)");
  }
  if (feature_dim <= 0) throw ValidationError("feature_dim must be positive");
  if (ba_edges_per_node <= 0 || ba_edges_per_node >= base_size) {
    throw ValidationError("BA attachment count must lie in [1, base_size)");
  }
  if (motif_count_range.lo <= 0 || motif_count_range.hi < motif_count_range.lo) {
    throw ValidationError("motif_count_range must be a positive range");
  }
  if (base_size_range.lo <= ba_edges_per_node ||
      base_size_range.hi < base_size_range.lo) {
    throw ValidationError("base_size_range must be a range above the BA "
                          "attachment count");
  }
  if (pad_to <= 0) throw ValidationError("pad_to must be positive");
  const int motif_nodes = motif_size * motif_count_range.hi;
  if (pad_to < base_size + motif_nodes ||
      pad_to < base_size_range.lo + motif_nodes) {
    throw ValidationError("pad_to (" + std::to_string(pad_to) +
                          ") is smaller than base plus " +
                          std::to_string(motif_nodes) + " motif nodes");
  }
  if (er_nodes <= 0) throw ValidationError("er_nodes must be positive");
  if (!(er_prob > 0.0 && er_prob < 1.0)) {
    throw ValidationError("er_prob must lie in (0, 1)");
  }
}

std::vector<Edge> barabasi_albert_edges(int n, int m, Rng& rng) {
  std::vector<Edge> edges;
  if (n <= 1) return edges;
  const int star = std::min(n, m + 1);
  // every edge endpoint, so a uniform pick is a degree-proportional pick
  std::vector<int> endpoints;
  for (int v = 1; v < star; ++v) {
    edges.push_back({0, v});
    endpoints.push_back(0);
    endpoints.push_back(v);
  }
  for (int v = star; v < n; ++v) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      const auto pick = uniform_int(rng, 0, static_cast<int>(endpoints.size()) - 1);
      targets.insert(endpoints[static_cast<std::size_t>(pick)]);
    }
    for (int t : targets) {
      edges.push_back({t, v});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return edges;
}

std::vector<Edge> house_edges(int first) {
  const int a = first, b = first + 1, c = first + 2, d = first + 3,
            roof = first + 4;
  return {{a, b}, {b, c}, {c, d}, {a, d}, {a, roof}, {b, roof}};
}

GraphDataset gen_ba_motif_volume(const GenConfig& cfg,
                                 std::vector<MotifLayout>* layouts) {
  cfg.validate();
  const int count = cfg.n_graphs;
  std::vector<Graph> graphs(static_cast<std::size_t>(count));
  std::vector<MotifLayout> lay(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 8)
  for (int gi = 0; gi < count; ++gi) {
    Rng rng(derive_seed(cfg.seed, {kVolumeStream, static_cast<std::uint64_t>(gi)}));
    auto parts = build_motif_graph(cfg.base_size, 1, cfg.ba_edges_per_node, rng);
    const int n = cfg.base_size + 5;
    Matrix x(n, cfg.feature_dim);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < cfg.feature_dim; ++j) x(i, j) = 100.0 * uniform01(rng);
    }
    double label = 0.0;
    for (int v : parts.layout.motifs.front()) label += x.row(v).sum();
    auto gt = mask_of(n, parts.gt_edges);
    graphs[static_cast<std::size_t>(gi)] =
        Graph::from_edges(gi, std::move(x), parts.edges, label, std::move(gt));
    lay[static_cast<std::size_t>(gi)] = std::move(parts.layout);
  }
  if (layouts) *layouts = std::move(lay);
  return make_dataset(kBaMotifVolume, cfg, std::move(graphs));
}

GraphDataset gen_ba_motif_counting(const GenConfig& cfg,
                                   std::vector<MotifLayout>* layouts) {
  cfg.validate();
  const int count = cfg.n_graphs;
  std::vector<Graph> graphs(static_cast<std::size_t>(count));
  std::vector<MotifLayout> lay(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 8)
  for (int gi = 0; gi < count; ++gi) {
    Rng rng(derive_seed(cfg.seed, {kCountingStream, static_cast<std::uint64_t>(gi)}));
    const int k = uniform_int(rng, cfg.motif_count_range.lo, cfg.motif_count_range.hi);
    const int base_hi =
        std::min(cfg.base_size_range.hi, cfg.pad_to - cfg.motif_size * k);
    const int base = uniform_int(rng, cfg.base_size_range.lo, base_hi);
    auto parts = build_motif_graph(base, k, cfg.ba_edges_per_node, rng);
    Matrix x = Matrix::Ones(cfg.pad_to, cfg.feature_dim);
    auto gt = mask_of(cfg.pad_to, parts.gt_edges);
    graphs[static_cast<std::size_t>(gi)] = Graph::from_edges(
        gi, std::move(x), parts.edges, static_cast<double>(k), std::move(gt));
    lay[static_cast<std::size_t>(gi)] = std::move(parts.layout);
  }
  if (layouts) *layouts = std::move(lay);
  return make_dataset(kBaMotifCounting, cfg, std::move(graphs));
}

GraphDataset gen_triangles(const GenConfig& cfg) {
  cfg.validate();
  const int count = cfg.n_graphs;
  const int n = cfg.er_nodes;
  std::vector<Graph> graphs(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 8)
  for (int gi = 0; gi < count; ++gi) {
    Rng rng(derive_seed(cfg.seed, {kTriangleStream, static_cast<std::uint64_t>(gi)}));
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (uniform01(rng) < cfg.er_prob) edges.push_back({i, j});
      }
    }
    Graph plain = Graph::from_edges(gi, Matrix::Ones(n, cfg.feature_dim), edges, 0.0);
    const auto label = static_cast<double>(count_triangles(plain));
    graphs[static_cast<std::size_t>(gi)] =
        Graph::from_edges(gi, plain.features(), edges, label,
                          triangle_edge_mask(plain));
  }
  return make_dataset(kTriangles, cfg, std::move(graphs));
}

GraphDataset generate(const std::string& name, const GenConfig& cfg) {
  if (name == kBaMotifVolume) return gen_ba_motif_volume(cfg);
  if (name == kBaMotifCounting) return gen_ba_motif_counting(cfg);
  if (name == kTriangles) return gen_triangles(cfg);
  throw ValidationError("unknown generated dataset '" + name + "'");
}

long long count_triangles(const Graph& g) {
  const auto& a = g.adjacency();
  const int n = g.num_nodes();
  long long count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a(i, j) == 0.0) continue;
      for (int k = j + 1; k < n; ++k) {
        if (a(j, k) != 0.0 && a(i, k) != 0.0) ++count;
      }
    }
  }
  return count;
}

long long count_triangles_trace(const Graph& g) {
  const Matrix& a = g.adjacency();
  const Matrix a2 = a * a;
  // trace(A^3) = sum_ij (A^2)_ij A_ji; entries are small integers, exact in
  // double for any graph this library handles.
  const double tr = a2.cwiseProduct(a.transpose()).sum();
  return std::llround(tr) / 6;
}

EdgeMask triangle_edge_mask(const Graph& g) {
  const auto& a = g.adjacency();
  const int n = g.num_nodes();
  Matrix m = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    for (int k = 0; k < n; ++k) {
      if (a(e.u, k) != 0.0 && a(e.v, k) != 0.0) {
        m(e.u, e.v) = 1.0;
        m(e.v, e.u) = 1.0;
        break;
      }
    }
  }
  return EdgeMask(std::move(m));
}

GraphDataset load_crippen(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("Crippen file not found: " + path.string());
  }
  GraphDataset ds = read_dataset(path, /*recompute_invalid_splits=*/true);
  for (const auto& g : ds.graphs) {
    const std::string where = "graph " + std::to_string(g.id());
    const auto& w = g.node_weights();
    if (static_cast<int>(w.size()) != g.num_nodes()) {
      throw DataIntegrityError(where + ": missing per-node Crippen weights");
    }
    for (double v : w) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataIntegrityError(where + ": node weight outside [0,1]");
      }
    }
    const auto& x = g.features();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      int ones = 0;
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (x(i, j) == 1.0) {
          ++ones;
        } else if (x(i, j) != 0.0) {
          ones = -1;
          break;
        }
      }
      if (ones != 1) {
        throw DataIntegrityError(where + ": node " + std::to_string(i) +
                                 " features are not one-hot");
      }
    }
    if (!g.gt_mask()) {
      throw DataIntegrityError(where + ": missing ground-truth edge weights");
    }
    for (const auto& e : g.edges()) {
      const double expected = 0.5 * (w[static_cast<std::size_t>(e.u)] +
                                     w[static_cast<std::size_t>(e.v)]);
      const double got = (*g.gt_mask())(e.u, e.v);
      if (std::abs(got - expected) > 1e-9) {
        throw DataIntegrityError(where + ": edge (" + std::to_string(e.u) +
                                 ", " + std::to_string(e.v) + ") weight " +
                                 io::format_real(got) +
                                 " is not the mean of its endpoint weights");
      }
    }
  }
  if (ds.name.empty()) ds.name = kCrippen;
  return ds;
}

LabelStats label_stats(const GraphDataset& ds) {
  LabelStats s;
  if (ds.graphs.empty()) return s;
  s.min = s.max = ds.graphs.front().label();
  double sum = 0.0;
  for (const auto& g : ds.graphs) {
    s.min = std::min(s.min, g.label());
    s.max = std::max(s.max, g.label());
    sum += g.label();
  }
  s.mean = sum / static_cast<double>(ds.graphs.size());
  return s;
}

std::string manifest_json(const GraphDataset& ds) {
  const auto s = label_stats(ds);
  return "{\"name\":" + io::quote(ds.name) + ",\"seed\":" + std::to_string(ds.seed) +
         ",\"n_graphs\":" + std::to_string(ds.graphs.size()) +
         ",\"label_min\":" + io::format_real(s.min) +
         ",\"label_mean\":" + io::format_real(s.mean) +
         ",\"label_max\":" + io::format_real(s.max) + "}";
}

}  // namespace regx::datasets
