#include <doctest.h>

#include <filesystem>
#include <set>

#include "fixtures.hpp"
#include "regx/dataset_io.hpp"
#include "regx/datasets.hpp"
#include "regx/errors.hpp"
#include "regx/kernels.hpp"
#include "regx/text_io.hpp"

using namespace regx;
using namespace regx::datasets;

namespace {

// Triangles through common neighbours: every triangle is seen once per edge.
long long triangles_by_edges(const Graph& g) {
  const auto& a = g.adjacency();
  long long closed = 0;
  for (const auto& e : g.edges()) {
    for (int k = 0; k < g.num_nodes(); ++k) closed += (a(e.u, k) != 0.0 && a(e.v, k) != 0.0);
  }
  return closed / 3;
}

std::set<Edge> support(const EdgeMask& m) {
  std::set<Edge> s;
  for (int i = 0; i < m.size(); ++i) {
    for (int j = i + 1; j < m.size(); ++j) {
      if (m(i, j) != 0.0) s.insert({i, j});
    }
  }
  return s;
}

GenConfig small(int n) {
  GenConfig c;
  c.n_graphs = n;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("triangle counts on fixtures") {
  CHECK(count_triangles(test::complete_graph(3)) == 1);
  CHECK(count_triangles(test::cycle_graph(4)) == 0);
  CHECK(count_triangles(test::complete_graph(4)) == 4);
  CHECK(count_triangles_trace(test::complete_graph(4)) == 4);
  const Graph empty(0, Matrix::Ones(5, 1), Matrix::Zero(5, 5), 0.0);
  CHECK(count_triangles(empty) == 0);
  CHECK(support(triangle_edge_mask(empty)).empty());

  // A triangle with a pendant edge: the pendant is not covered.
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 2}, {2, 3}};
  const Graph g = Graph::from_edges(0, Matrix::Ones(4, 1), edges, 0.0);
  const auto m = triangle_edge_mask(g);
  CHECK(support(m) == std::set<Edge>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("generated Triangles: label matches both oracles") {
  const auto ds = gen_triangles(small(100));
  REQUIRE(ds.graphs.size() == 100);
  for (const auto& g : ds.graphs) {
    const auto label = static_cast<long long>(g.label());
    CHECK(static_cast<double>(label) == g.label());
    CHECK(count_triangles(g) == label);
    CHECK(count_triangles_trace(g) == label);
    CHECK(triangles_by_edges(g) == label);
    CHECK(g.num_nodes() == 30);
    CHECK(g.features().isOnes(0.0));
    // gt edges are exactly the edges with a common neighbour.
    const auto& a = g.adjacency();
    for (const auto& e : g.edges()) {
      bool covered = false;
      for (int k = 0; k < g.num_nodes(); ++k) covered |= a(e.u, k) != 0.0 && a(e.v, k) != 0.0;
      CHECK((*g.gt_mask())(e.u, e.v) == (covered ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("house motif and BA base") {
  const auto h = house_edges(10);
  CHECK(std::set<Edge>(h.begin(), h.end()) ==
        std::set<Edge>{{10, 11}, {11, 12}, {12, 13}, {10, 13}, {10, 14}, {11, 14}});
  Rng rng(2);
  for (int m : {1, 2, 3}) {
    const int n = 25;
    const auto edges = barabasi_albert_edges(n, m, rng);
    CHECK(static_cast<int>(edges.size()) == m * (n - m));
    CHECK(std::set<Edge>(edges.begin(), edges.end()).size() == edges.size());
    const Graph g = Graph::from_edges(0, Matrix::Ones(n, 1), edges, 0.0);
    CHECK(g.adjacency().rowwise().sum().minCoeff() >= 1.0);
  }
}

TEST_CASE("BA-Motif-Volume: label is the motif feature mass") {
  std::vector<MotifLayout> layouts;
  const auto cfg = small(60);
  const auto ds = gen_ba_motif_volume(cfg, &layouts);
  REQUIRE(layouts.size() == ds.graphs.size());
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    const auto& g = ds.graphs[i];
    const auto& lay = layouts[i];
    REQUIRE(lay.motifs.size() == 1);
    double mass = 0.0;
    for (int v : lay.motifs[0]) mass += g.features().row(v).sum();
    CHECK(g.label() == doctest::Approx(mass).epsilon(1e-12));
    CHECK(g.label() >= 0.0);
    CHECK(g.label() <= 500.0 * cfg.feature_dim);
    CHECK(g.num_nodes() == cfg.base_size + 5);
    const auto gt = support(*g.gt_mask());
    const auto house = house_edges(lay.motifs[0][0]);
    CHECK(gt == std::set<Edge>(house.begin(), house.end()));
    for (const auto& a : lay.attachments) CHECK(gt.count(a) == 0);
  }
}

TEST_CASE("BA-Motif-Counting: label is the number of houses") {
  std::vector<MotifLayout> layouts;
  const auto cfg = small(80);
  const auto ds = gen_ba_motif_counting(cfg, &layouts);
  std::set<int> seen_counts;
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    const auto& g = ds.graphs[i];
    const auto& lay = layouts[i];
    CHECK(g.num_nodes() == cfg.pad_to);
    CHECK(g.label() == static_cast<double>(lay.motifs.size()));
    CHECK(static_cast<int>(support(*g.gt_mask()).size()) == 6 * static_cast<int>(lay.motifs.size()));
    CHECK(lay.base_nodes >= cfg.base_size_range.lo);
    CHECK(lay.base_nodes <= cfg.base_size_range.hi);
    const int used = lay.base_nodes + 5 * static_cast<int>(lay.motifs.size());
    CHECK(used <= cfg.pad_to);
    // Padding nodes are isolated.
    for (int v = used; v < g.num_nodes(); ++v) CHECK(g.adjacency().row(v).sum() == 0.0);
    seen_counts.insert(static_cast<int>(g.label()));
  }
  CHECK(*seen_counts.begin() >= cfg.motif_count_range.lo);
  CHECK(*seen_counts.rbegin() <= cfg.motif_count_range.hi);
  CHECK(seen_counts.size() > 5);
}

TEST_CASE("generator config validation") {
  GenConfig c;
  c.pad_to = 40;  // 10 + 5 * 10 does not fit
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = GenConfig{};
  c.er_prob = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = GenConfig{};
  c.n_graphs = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_THROWS_AS(generate("nope", GenConfig{}), ValidationError);
}

TEST_CASE("generation is deterministic and independent of the worker count") {
  for (const char* name : {kBaMotifVolume, kBaMotifCounting, kTriangles}) {
    const auto cfg = small(40);
    kernels::set_worker_count(1);
    const auto a = serialize_dataset(generate(name, cfg));
    kernels::set_worker_count(4);
    const auto b = serialize_dataset(generate(name, cfg));
    kernels::set_worker_count(0);
    CHECK(a == b);
    auto other = cfg;
    other.seed = 18;
    CHECK(serialize_dataset(generate(name, other)) != a);
  }
}

TEST_CASE("manifest and label statistics") {
  const auto ds = gen_ba_motif_counting(small(30));
  const auto j = io::Json::parse(manifest_json(ds));
  CHECK(j["name"] == kBaMotifCounting);
  CHECK(j["seed"] == 17);
  CHECK(j["n_graphs"] == 30);
  const auto s = label_stats(ds);
  CHECK(j["label_min"].get<double>() == s.min);
  CHECK(j["label_mean"].get<double>() == s.mean);
  CHECK(s.min <= s.mean);
  CHECK(s.mean <= s.max);
}

TEST_CASE("Crippen loader checks the endpoint-mean rule") {
  const auto dir = std::filesystem::temp_directory_path() / "regx_test_crippen";
  std::filesystem::create_directories(dir);
  auto write = [&](double edge_weight, const char* file) {
    Matrix x = Matrix::Zero(3, 2);
    x(0, 0) = x(1, 1) = x(2, 0) = 1.0;
    const std::vector<Edge> edges{{0, 1}, {1, 2}};
    Graph plain = Graph::from_edges(0, x, edges, 1.5);
    const std::vector<double> w{edge_weight, 0.5 * (0.4 + 1.0)};
    GraphDataset ds;
    ds.name = kCrippen;
    ds.generator_version = "fixture";
    ds.graphs.emplace_back(0, x, plain.adjacency(), 1.5, plain.mask_from_edge_weights(w),
                           std::vector<double>{0.2, 0.4, 1.0});
    ds.splits = {{0}, {}, {}};
    write_dataset(ds, dir / file);
    return dir / file;
  };
  const auto ok = load_crippen(write(0.3, "ok.jsonl"));
  CHECK((*ok.graphs[0].gt_mask())(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(load_crippen(write(0.35, "bad.jsonl")), DataIntegrityError);
  CHECK_THROWS_AS(load_crippen(dir / "missing.jsonl"), IoError);
  std::filesystem::remove_all(dir);
}
