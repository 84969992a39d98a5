#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "regx/autodiff.hpp"
#include "regx/gnn.hpp"
#include "regx/graph.hpp"
#include "regx/random.hpp"

namespace regx::mixup {

/// Number of cross connections: max(1, round(eta_fraction * edges_a)).
int eta_for(int edges_a, double eta_fraction);

/// Where a merged edge came from: an edge of the target, an edge of the
/// partner, or a sampled cross connection.
struct EdgeSource {
  enum Kind { target, partner, connection };
  Kind kind = target;
  int index = 0;  // edge index in the source graph, or connection index
};

/// Topology of a block merge, independent of mask values. Target nodes keep
/// their indices; partner node j becomes target_nodes + j.
struct MixupPlan {
  int target_nodes = 0;
  int partner_nodes = 0;
  std::vector<Edge> edges;           // merged, upper-triangular row-major
  std::vector<EdgeSource> sources;   // aligned with edges
  std::vector<Edge> connections;     // sampled cross pairs, merged indices
};

/// Samples eta cross pairs (u in target, v in partner) uniformly without
/// replacement. Throws ConformanceError on a feature-dimension mismatch and
/// RangeError when eta exceeds target_nodes * partner_nodes.
MixupPlan plan_mixup(const Graph& ga, const Graph& gb, double eta_fraction,
                     std::uint64_t seed);

struct MixupResult {
  Graph merged;  // block adjacency [[A_a, A_conn], [A_conn^T, A_b]], label of ga
  EdgeMask mask; // [[M_a*, M_conn], [M_conn^T, I_b - M_b*]]
  std::vector<int> index_map_a;
  std::vector<int> index_map_b;
  std::vector<Edge> conn_edges;
};

/// The mixed graph itself is (merged.features(), apply_mask(merged, mask)).
MixupResult mixup_graphs(const Graph& ga, const EdgeMask& ma_star, const Graph& gb,
                         const EdgeMask& mb_star, double eta_fraction,
                         std::uint64_t seed, double conn_weight = 1.0);

/// Merged per-edge weights on the tape: target weights as-is, 1 - partner
/// weights, conn_weight on connections. wa and wb are E x 1.
ad::Var merged_weights(const MixupPlan& plan, ad::Var wa, ad::Var wb,
                       double conn_weight = 1.0);

Matrix merged_features(const Graph& ga, const Graph& gb);

// -- neighbor sampling ------------------------------------------------------

struct NeighborPair {
  int positive = -1;  // dataset indices
  int negative = -1;
};

/// Higher h.h' is positive; equal similarity puts the smaller graph id first.
NeighborPair order_by_similarity(const RowVector& h, int index_b, int id_b,
                                 const RowVector& h_b, int index_c, int id_c,
                                 const RowVector& h_c);

/// Two distinct entries of pool, both different from `exclude` (a dataset
/// index, or -1). Throws SamplingError if fewer than two candidates remain.
std::pair<int, int> sample_two(std::span<const int> pool, int exclude, Rng& rng);

/// Draws two graphs from the explainer-train split (excluding the target) and
/// orders them by similarity of their unmasked embeddings to the target's.
NeighborPair sample_neighbors(const Graph& target, const GraphDataset& ds,
                              const GcnModel& model, std::uint64_t seed);

}  // namespace regx::mixup
