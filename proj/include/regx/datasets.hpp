#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "regx/graph.hpp"
#include "regx/random.hpp"

namespace regx::datasets {

inline constexpr const char* kGeneratorVersion = "regx-gen-1";
inline constexpr const char* kBaMotifVolume = "ba_motif_volume";
inline constexpr const char* kBaMotifCounting = "ba_motif_counting";
inline constexpr const char* kTriangles = "triangles";
inline constexpr const char* kCrippen = "crippen";

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct GenConfig {
  int n_graphs = 1000;
  std::uint64_t seed = 0;
  int base_size = 20;
  int motif_size = 5;
  int feature_dim = 10;
  int ba_edges_per_node = 1;
  int pad_to = 70;
  IntRange motif_count_range{1, 10};
  IntRange base_size_range{10, 40};  // BA-Motif-Counting only
  int er_nodes = 30;
  double er_prob = 0.2;

  /// Throws ValidationError.
  void validate() const;
};

/// Node bookkeeping for one motif graph: base nodes are [0, base_nodes),
/// each motif lists its five node indices.
struct MotifLayout {
  int base_nodes = 0;
  std::vector<std::vector<int>> motifs;
  std::vector<Edge> attachments;
};

GraphDataset gen_ba_motif_volume(const GenConfig& cfg,
                                 std::vector<MotifLayout>* layouts = nullptr);
GraphDataset gen_ba_motif_counting(const GenConfig& cfg,
                                   std::vector<MotifLayout>* layouts = nullptr);
GraphDataset gen_triangles(const GenConfig& cfg);

/// Dispatch by dataset name; throws ValidationError on an unknown name.
GraphDataset generate(const std::string& name, const GenConfig& cfg);

/// Exact count by enumerating every node triple.
long long count_triangles(const Graph& g);

/// trace(A^3) / 6.
long long count_triangles_trace(const Graph& g);

/// Binary mask of the edges that close at least one triangle.
EdgeMask triangle_edge_mask(const Graph& g);

/// Barabasi-Albert graph on n nodes: a star on m + 1 nodes, then each new
/// node attaches to m distinct existing nodes chosen proportionally to degree.
std::vector<Edge> barabasi_albert_edges(int n, int m, Rng& rng);

/// The house: a 4-cycle (0,1,2,3) with a roof node 4 joined to 0 and 1,
/// offset by `first`.
std::vector<Edge> house_edges(int first);

/// Loads a preprocessed Crippen file (dataset format plus per-node Crippen
/// weights normalized into [0,1]). Checks one-hot features and that every
/// ground-truth edge weight is the mean of its endpoint weights within 1e-9.
/// Header splits are kept when valid for the loaded graph count, otherwise
/// the default 8:1:1 split is assigned.
GraphDataset load_crippen(const std::filesystem::path& path);

struct LabelStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

LabelStats label_stats(const GraphDataset& ds);

/// {"name","seed","n_graphs","label_min","label_mean","label_max"}
std::string manifest_json(const GraphDataset& ds);

}  // namespace regx::datasets
