#include <doctest.h>

#include <filesystem>
#include <string>

#include "fixtures.hpp"
#include "regx/dataset_io.hpp"
#include "regx/errors.hpp"
#include "regx/text_io.hpp"

using namespace regx;

TEST_CASE("apply_mask on the 3-node path") {
  const Graph g = test::path3();
  SUBCASE("identity and annihilating masks") {
    CHECK(apply_mask(g, g.ones_mask()) == g.adjacency());
    CHECK(apply_mask(g, EdgeMask::zeros(3)).isZero(0.0));
  }
  SUBCASE("soft mask is the element-wise product") {
    const std::vector<double> w{0.5, 1.0};
    const Matrix m = apply_mask(g, g.mask_from_edge_weights(w));
    Matrix want = Matrix::Zero(3, 3);
    want(0, 1) = want(1, 0) = 0.5;
    want(1, 2) = want(2, 1) = 1.0;
    CHECK(m == want);
  }
}

TEST_CASE("residual_mask") {
  const Graph g = test::path3();
  CHECK(residual_mask(g, g.ones_mask()).matrix().isZero(0.0));
  CHECK(residual_mask(g, EdgeMask::zeros(3)).matrix() == g.adjacency());
  const std::vector<double> w{0.3, 0.9};
  const auto r = residual_mask(g, g.mask_from_edge_weights(w));
  CHECK(r(0, 1) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(r(1, 2) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r(2, 1) == r(1, 2));
}

TEST_CASE("residual of residual restores the mask on edges") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Graph g = test::er_graph(rng, t, 12, 0.3);
    const auto m = test::random_mask(rng, g);
    const auto rr = residual_mask(g, residual_mask(g, m));
    CHECK((rr.matrix() - m.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("mask and graph validation") {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = bad(1, 0) = 1.5;
  CHECK_THROWS_AS(EdgeMask{bad}, ValidationError);
  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(EdgeMask{asym}, ValidationError);
  CHECK_THROWS_AS(EdgeMask{Matrix::Zero(2, 3)}, ConformanceError);

  Matrix loop = Matrix::Zero(2, 2);
  loop(0, 0) = 1.0;
  CHECK_THROWS_AS(Graph(0, Matrix::Ones(2, 1), loop, 0.0), ValidationError);
  Matrix directed = Matrix::Zero(2, 2);
  directed(0, 1) = 1.0;
  CHECK_THROWS_AS(Graph(0, Matrix::Ones(2, 1), directed, 0.0), ValidationError);
  CHECK_THROWS_AS(Graph(0, Matrix::Ones(3, 1), Matrix::Zero(2, 2), 0.0), ConformanceError);

  const Graph g = test::path3();
  Matrix off = Matrix::Zero(3, 3);
  off(0, 2) = off(2, 0) = 0.5;
  CHECK_THROWS_AS(g.check_conforms(EdgeMask{off}), ConformanceError);
  CHECK_THROWS_AS(apply_mask(g, EdgeMask::zeros(4)), ConformanceError);
}

TEST_CASE("edges are upper-triangular row-major") {
  Rng rng(3);
  const Graph g = test::er_graph(rng, 0, 15, 0.4);
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    CHECK(g.edges()[k].u < g.edges()[k].v);
    if (k > 0) CHECK(g.edges()[k - 1] < g.edges()[k]);
  }
}

TEST_CASE("explanation scores enumerate the support with mask weights") {
  Rng rng(5);
  const Graph g = test::er_graph(rng, 7, 10, 0.4);
  const auto m = test::random_mask(rng, g);
  const Explanation e(g, m);
  CHECK(e.graph_id() == 7);
  REQUIRE(e.scores().size() == g.edges().size());
  for (std::size_t k = 0; k < e.scores().size(); ++k) {
    CHECK(e.scores()[k].i == g.edges()[k].u);
    CHECK(e.scores()[k].j == g.edges()[k].v);
    CHECK(e.scores()[k].weight == m(g.edges()[k].u, g.edges()[k].v));
  }
}

TEST_CASE("threshold_topk breaks ties by edge order") {
  const Graph g = test::complete_graph(4);  // 6 edges
  const std::vector<double> w{0.5, 0.9, 0.5, 0.5, 0.1, 0.9};
  const Explanation e(g, g.mask_from_edge_weights(w));
  const auto top = threshold_topk(e, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0] == Edge{0, 1});  // first of the 0.5 ties
  CHECK(top[1] == Edge{0, 2});
  CHECK(top[2] == Edge{2, 3});
  CHECK_THROWS_AS(threshold_topk(e, 7), RangeError);
  const auto hard = topk_mask(g, e, 2);
  CHECK(hard(0, 2) == 1.0);
  CHECK(hard(2, 3) == 1.0);
  CHECK(hard(0, 1) == 0.0);
}

TEST_CASE("default splits are contiguous 8:1:1") {
  const auto s = default_splits(100);
  CHECK(s.train.size() == 80);
  CHECK(s.explainer_train.size() == 10);
  CHECK(s.explainer_test.size() == 10);
  CHECK(s.train.front() == 0);
  CHECK(s.explainer_test.back() == 99);
  check_splits(s, 100);
  Splits dup = s;
  dup.explainer_test.push_back(0);
  CHECK_THROWS_AS(check_splits(dup, 100), ValidationError);
  CHECK_THROWS_AS(check_splits(s, 50), ValidationError);
}

TEST_CASE("dataset serialization round trip") {
  Rng rng(9);
  GraphDataset ds;
  ds.name = "fixture";
  ds.seed = 42;
  ds.generator_version = "test";
  for (int i = 0; i < 10; ++i) {
    Graph g = test::ring_graph(rng, i, 6 + i % 3, 4, 0.3, 0.1 * i + 1.0 / 3.0);
    std::vector<double> w(static_cast<std::size_t>(g.num_edges()));
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = k % 2 ? 1.0 : 0.0;
    ds.graphs.emplace_back(g.id(), g.features(), g.adjacency(), g.label(),
                           g.mask_from_edge_weights(w));
  }
  ds.splits = default_splits(10);
  const auto text = serialize_dataset(ds);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl == std::string::npos ? text.size() : nl + 1;
  }
  const auto back = parse_dataset(lines);
  CHECK(back == ds);
  CHECK(serialize_dataset(back) == text);

  SUBCASE("parse errors name the line") {
    auto broken = lines;
    broken[3] = "{\"id\": 2, \"n\": oops}";
    try {
      parse_dataset(broken, "mem");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("mem:4") != std::string::npos);
    }
  }
  SUBCASE("explanations round trip through files") {
    const auto dir = std::filesystem::temp_directory_path() / "regx_test_graph";
    std::filesystem::create_directories(dir);
    std::vector<Explanation> expls;
    for (int i : ds.splits.explainer_test) {
      const auto& g = ds.graphs[static_cast<std::size_t>(i)];
      expls.emplace_back(g, test::random_mask(rng, g));
    }
    write_explanations(expls, dir / "e.jsonl");
    const auto got = read_explanations(dir / "e.jsonl", ds);
    REQUIRE(got.size() == expls.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].graph_id() == expls[k].graph_id());
      CHECK(got[k].weights() == expls[k].weights());
    }
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("format_real round-trips doubles") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = (uniform01(rng) - 0.5) * std::pow(10.0, static_cast<int>(uniform01(rng) * 40) - 20);
    CHECK(std::stod(io::format_real(v)) == v);
  }
  CHECK_THROWS_AS(io::format_real(std::nan("")), ValidationError);
}
