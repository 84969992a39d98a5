#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "regx/datasets.hpp"
#include "regx/errors.hpp"
#include "regx/mixup.hpp"

using namespace regx;
using namespace regx::mixup;

TEST_CASE("eta follows the connection fraction") {
  CHECK(eta_for(100, 0.03) == 3);
  CHECK(eta_for(10, 0.03) == 1);
  CHECK(eta_for(0, 0.03) == 1);
  CHECK(eta_for(50, 0.03) == 2);  // round(1.5) away from zero
  CHECK(eta_for(250, 0.03) == 8);
}

TEST_CASE("3-node target, 2-node partner") {
  const Graph ga = test::path3();
  const std::vector<Edge> eb{{0, 1}};
  const Graph gb = Graph::from_edges(1, Matrix::Ones(2, 2), eb, 2.0);
  const std::vector<double> wa{0.25, 0.75};
  const auto ma = ga.mask_from_edge_weights(wa);
  const auto r = mixup_graphs(ga, ma, gb, gb.ones_mask(), 0.03, 9);
  CHECK(r.merged.num_nodes() == 5);
  CHECK(r.merged.label() == ga.label());
  CHECK(r.mask.matrix().topLeftCorner(3, 3) == ma.matrix());
  CHECK(r.mask(3, 4) == 0.0);  // full partner explanation leaves nothing
  CHECK(r.conn_edges.size() == 1);
  CHECK(r.index_map_a == std::vector<int>{0, 1, 2});
  CHECK(r.index_map_b == std::vector<int>{3, 4});
}

TEST_CASE("mixup errors") {
  const Graph ga = test::path3();
  const Graph gb(1, Matrix::Ones(2, 5), Matrix::Zero(2, 2), 0.0);
  CHECK_THROWS_AS(mixup_graphs(ga, ga.ones_mask(), gb, EdgeMask::zeros(2), 0.03, 1),
                  ConformanceError);
  const Graph gc(1, Matrix::Ones(1, 2), Matrix::Zero(1, 1), 0.0);
  // 3 x 1 cross pairs cannot host 4 connections.
  CHECK_THROWS_AS(plan_mixup(ga, gc, 2.0, 1), RangeError);
}

TEST_CASE("randomized block exactness, eta, symmetry and support") {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    const int na = 3 + static_cast<int>(uniform01(rng) * 20);
    const int nb = 3 + static_cast<int>(uniform01(rng) * 20);
    const Graph ga = test::er_graph(rng, 2 * t, na, 0.1 + 0.5 * uniform01(rng), 2);
    const Graph gb = test::er_graph(rng, 2 * t + 1, nb, 0.1 + 0.5 * uniform01(rng), 2);
    const auto ma = test::random_mask(rng, ga);
    const auto mb = test::random_mask(rng, gb);
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(t);
    const auto r = mixup_graphs(ga, ma, gb, mb, 0.03, seed);

    const int eta = std::max(1, static_cast<int>(std::lround(0.03 * ga.num_edges())));
    REQUIRE(static_cast<int>(r.conn_edges.size()) == eta);
    CHECK(r.merged.num_nodes() == na + nb);

    const Matrix& m = r.mask.matrix();
    CHECK(m.topLeftCorner(na, na) == ma.matrix());
    for (const auto& e : gb.edges()) {
      CHECK(std::abs(m(na + e.u, na + e.v) - (1.0 - mb(e.u, e.v))) <= 1e-12);
    }
    CHECK(m == m.transpose());
    CHECK(r.merged.adjacency() == r.merged.adjacency().transpose());

    std::set<Edge> want;
    for (const auto& e : ga.edges()) want.insert(e);
    for (const auto& e : gb.edges()) want.insert({na + e.u, na + e.v});
    std::set<Edge> conn;
    for (const auto& e : r.conn_edges) {
      CHECK(e.u < na);
      CHECK(e.v >= na);
      conn.insert(e);
      want.insert(e);
      CHECK(m(e.u, e.v) == 1.0);
    }
    CHECK(conn.size() == r.conn_edges.size());
    const auto& got = r.merged.edges();
    CHECK(std::set<Edge>(got.begin(), got.end()) == want);

    const auto again = mixup_graphs(ga, ma, gb, mb, 0.03, seed);
    CHECK(again.conn_edges == r.conn_edges);
  }
}

TEST_CASE("plan and tape weights reproduce the materialized mask") {
  Rng rng(3);
  const Graph ga = test::ring_graph(rng, 0, 8, 2, 0.3);
  const Graph gb = test::ring_graph(rng, 1, 6, 2, 0.3);
  const auto ma = test::random_mask(rng, ga), mb = test::random_mask(rng, gb);
  const auto plan = plan_mixup(ga, gb, 0.2, 5);
  const auto r = mixup_graphs(ga, ma, gb, mb, 0.2, 5, 0.8);
  CHECK(plan.edges == r.merged.edges());
  ad::Tape tape;
  auto col = [&](const std::vector<double>& w) {
    Matrix c(static_cast<Eigen::Index>(w.size()), 1);
    for (std::size_t i = 0; i < w.size(); ++i) c(static_cast<Eigen::Index>(i), 0) = w[i];
    return tape.constant(c);
  };
  const auto merged = merged_weights(plan, col(ga.edge_weights(ma)), col(gb.edge_weights(mb)), 0.8);
  const auto want = r.merged.edge_weights(r.mask);
  REQUIRE(merged.rows() == static_cast<Eigen::Index>(want.size()));
  for (std::size_t k = 0; k < want.size(); ++k) {
    CHECK(merged.value()(static_cast<Eigen::Index>(k), 0) == doctest::Approx(want[k]).epsilon(1e-15));
  }
  CHECK(merged_features(ga, gb).rows() == 14);
}

TEST_CASE("neighbour ordering") {
  const RowVector h = (RowVector(2) << 1.0, 0.0).finished();
  const RowVector big = (RowVector(2) << 5.0, 0.0).finished();
  const RowVector small = (RowVector(2) << 2.0, 0.0).finished();
  auto p = order_by_similarity(h, 10, 110, small, 20, 120, big);
  CHECK(p.positive == 20);
  CHECK(p.negative == 10);
  p = order_by_similarity(h, 10, 130, big, 20, 120, big);
  CHECK(p.positive == 20);  // equal similarity: smaller graph id first
  const RowVector ortho = (RowVector(2) << 0.0, 3.0).finished();
  const RowVector para = (RowVector(2) << 0.5, 0.0).finished();
  p = order_by_similarity(h, 1, 1, ortho, 2, 2, para);
  CHECK(p.positive == 2);
}

TEST_CASE("sampling two partners") {
  Rng rng(1);
  const std::vector<int> pool{4, 5, 6};
  for (int t = 0; t < 50; ++t) {
    const auto [a, b] = sample_two(pool, 5, rng);
    CHECK(a != b);
    CHECK(a != 5);
    CHECK(b != 5);
  }
  const std::vector<int> tiny{4, 5};
  CHECK_THROWS_AS(sample_two(tiny, 5, rng), SamplingError);
}
