#include "regx/mixup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "regx/errors.hpp"

namespace regx::mixup {

int eta_for(int edges_a, double eta_fraction) {
  if (!(eta_fraction >= 0.0)) throw ValidationError("eta_fraction must be >= 0");
  const auto eta = static_cast<int>(std::lround(eta_fraction * edges_a));
  return std::max(1, eta);
}

MixupPlan plan_mixup(const Graph& ga, const Graph& gb, double eta_fraction,
                     std::uint64_t seed) {
  if (ga.feature_dim() != gb.feature_dim()) {
    throw ConformanceError("mixup: feature dimensions differ (" +
                           std::to_string(ga.feature_dim()) + " vs " +
                           std::to_string(gb.feature_dim()) + ")");
  }
  const int na = ga.num_nodes();
  const int nb = gb.num_nodes();
  const int eta = eta_for(ga.num_edges(), eta_fraction);
  const long long pairs = static_cast<long long>(na) * nb;
  if (eta > pairs) {
    throw RangeError("mixup: " + std::to_string(eta) + " connections requested but only " +
                     std::to_string(pairs) + " cross pairs exist");
  }

  // Floyd's subset sampling over the flattened na x nb pair index.
  Rng rng(seed);
  std::unordered_set<long long> chosen;
  for (long long j = pairs - eta; j < pairs; ++j) {
    const long long t = static_cast<long long>(uniform01(rng) * static_cast<double>(j + 1));
    if (!chosen.insert(std::min(t, j)).second) chosen.insert(j);
  }
  std::vector<long long> flat(chosen.begin(), chosen.end());
  std::sort(flat.begin(), flat.end());

  MixupPlan plan;
  plan.target_nodes = na;
  plan.partner_nodes = nb;
  for (long long f : flat) {
    plan.connections.push_back({static_cast<int>(f / nb), na + static_cast<int>(f % nb)});
  }

  // Target edges (rows < na) interleave with connections by row; partner
  // edges all come after. Merge the two row-ordered streams.
  std::size_t ia = 0, ic = 0;
  const auto& ea = ga.edges();
  while (ia < ea.size() || ic < plan.connections.size()) {
    const bool take_a =
        ic == plan.connections.size() ||
        (ia < ea.size() && ea[ia] < plan.connections[ic]);
    if (take_a) {
      plan.edges.push_back(ea[ia]);
      plan.sources.push_back({EdgeSource::target, static_cast<int>(ia)});
      ++ia;
    } else {
      plan.edges.push_back(plan.connections[ic]);
      plan.sources.push_back({EdgeSource::connection, static_cast<int>(ic)});
      ++ic;
    }
  }
  for (std::size_t ib = 0; ib < gb.edges().size(); ++ib) {
    const auto& e = gb.edges()[ib];
    plan.edges.push_back({na + e.u, na + e.v});
    plan.sources.push_back({EdgeSource::partner, static_cast<int>(ib)});
  }
  return plan;
}

Matrix merged_features(const Graph& ga, const Graph& gb) {
  Matrix x(ga.num_nodes() + gb.num_nodes(), ga.feature_dim());
  x.topRows(ga.num_nodes()) = ga.features();
  x.bottomRows(gb.num_nodes()) = gb.features();
  return x;
}

MixupResult mixup_graphs(const Graph& ga, const EdgeMask& ma_star, const Graph& gb,
                         const EdgeMask& mb_star, double eta_fraction,
                         std::uint64_t seed, double conn_weight) {
  ga.check_conforms(ma_star);
  gb.check_conforms(mb_star);
  const auto plan = plan_mixup(ga, gb, eta_fraction, seed);
  const int na = plan.target_nodes;
  const int n = na + plan.partner_nodes;

  Matrix m = Matrix::Zero(n, n);
  m.topLeftCorner(na, na) = ma_star.matrix();
  const Matrix residual = residual_mask(gb, mb_star).matrix();
  m.bottomRightCorner(plan.partner_nodes, plan.partner_nodes) = residual;
  for (const auto& c : plan.connections) {
    m(c.u, c.v) = conn_weight;
    m(c.v, c.u) = conn_weight;
  }

  MixupResult r;
  r.merged = Graph::from_edges(ga.id(), merged_features(ga, gb), plan.edges, ga.label());
  r.mask = EdgeMask(std::move(m));
  r.index_map_a.resize(static_cast<std::size_t>(na));
  std::iota(r.index_map_a.begin(), r.index_map_a.end(), 0);
  r.index_map_b.resize(static_cast<std::size_t>(plan.partner_nodes));
  std::iota(r.index_map_b.begin(), r.index_map_b.end(), na);
  r.conn_edges = plan.connections;
  return r;
}

ad::Var merged_weights(const MixupPlan& plan, ad::Var wa, ad::Var wb,
                       double conn_weight) {
  ad::Tape& t = *wa.tape();
  const auto n_a = static_cast<int>(wa.rows());
  const auto n_b = static_cast<int>(wb.rows());
  const auto n_c = static_cast<int>(plan.connections.size());
  const ad::Var parts[] = {wa, ad::affine(wb, -1.0, 1.0),
                           t.constant(Matrix::Constant(std::max(n_c, 0), 1, conn_weight))};
  const auto stacked = ad::concat_rows(parts);
  std::vector<int> idx;
  idx.reserve(plan.sources.size());
  for (const auto& s : plan.sources) {
    switch (s.kind) {
      case EdgeSource::target: idx.push_back(s.index); break;
      case EdgeSource::partner: idx.push_back(n_a + s.index); break;
      case EdgeSource::connection: idx.push_back(n_a + n_b + s.index); break;
    }
  }
  return ad::gather_rows(stacked, std::move(idx));
}

NeighborPair order_by_similarity(const RowVector& h, int index_b, int id_b,
                                 const RowVector& h_b, int index_c, int id_c,
                                 const RowVector& h_c) {
  const double sb = h.dot(h_b);
  const double sc = h.dot(h_c);
  if (sb > sc || (sb == sc && id_b < id_c)) return {index_b, index_c};
  return {index_c, index_b};
}

std::pair<int, int> sample_two(std::span<const int> pool, int exclude, Rng& rng) {
  std::vector<int> candidates;
  candidates.reserve(pool.size());
  for (int i : pool) {
    if (i != exclude) candidates.push_back(i);
  }
  if (candidates.size() < 2) {
    throw SamplingError("neighbor sampling needs at least two candidate graphs, have " +
                        std::to_string(candidates.size()));
  }
  const int n = static_cast<int>(candidates.size());
  const int a = uniform_int(rng, 0, n - 1);
  int b = uniform_int(rng, 0, n - 2);
  if (b >= a) ++b;
  return {candidates[static_cast<std::size_t>(a)], candidates[static_cast<std::size_t>(b)]};
}

NeighborPair sample_neighbors(const Graph& target, const GraphDataset& ds,
                              const GcnModel& model, std::uint64_t seed) {
  if (ds.splits.explainer_train.size() < 3) {
    throw SamplingError("explainer-train split has fewer than three graphs");
  }
  int exclude = -1;
  for (int i : ds.splits.explainer_train) {
    if (ds.graphs[static_cast<std::size_t>(i)].id() == target.id()) exclude = i;
  }
  Rng rng(seed);
  const auto [b, c] = sample_two(ds.splits.explainer_train, exclude, rng);
  const Graph& gb = ds.graphs[static_cast<std::size_t>(b)];
  const Graph& gc = ds.graphs[static_cast<std::size_t>(c)];
  const RowVector h = gcn_forward(model, target).embedding;
  return order_by_similarity(h, b, gb.id(), gcn_forward(model, gb).embedding, c, gc.id(),
                             gcn_forward(model, gc).embedding);
}

}  // namespace regx::mixup
