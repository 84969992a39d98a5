#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "regx/datasets.hpp"
#include "regx/errors.hpp"
#include "regx/eval.hpp"
#include "regx/text_io.hpp"

using namespace regx;
using namespace regx::eval;

TEST_CASE("AUC examples") {
  // sklearn.metrics.roc_auc_score gives 0.75 here, with the tie at 0.5.
  const std::vector<double> s{0.9, 0.8, 0.5, 0.5, 0.1}, y{1, 0, 1, 0, 0};
  CHECK(edge_auc(s, y) == doctest::Approx(0.75).epsilon(1e-15));
  const std::vector<double> sep{0.1, 0.2, 0.8, 0.9}, lab{0, 0, 1, 1};
  CHECK(edge_auc(sep, lab) == 1.0);
  const std::vector<double> inv{0, 0, 1, 1}, inv_lab{1, 1, 0, 0};
  CHECK(edge_auc(inv, inv_lab) == 0.0);
  const std::vector<double> flat{0.3, 0.3, 0.3};
  const std::vector<double> mixed{1, 0, 1};
  CHECK(edge_auc(flat, mixed) == 0.5);
  const std::vector<double> one_class{1, 1, 1};
  CHECK_THROWS_AS(edge_auc(flat, one_class), UndefinedAucError);
}

TEST_CASE("AUC properties") {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const int n = 5 + static_cast<int>(uniform01(rng) * 30);
    std::vector<double> s(n), y(n), mono(n), neg(n), flipped(n);
    for (int i = 0; i < n; ++i) {
      s[i] = std::round(uniform01(rng) * 10) / 10;  // plenty of ties
      y[i] = i < 2 ? i : (uniform01(rng) < 0.4 ? 1.0 : 0.0);
      mono[i] = std::exp(3.0 * s[i]) - 7.0;
      neg[i] = -s[i];
      flipped[i] = 1.0 - y[i];
    }
    const double a = edge_auc(s, y);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(edge_auc(mono, y) == doctest::Approx(a).epsilon(1e-12));
    CHECK(edge_auc(neg, y) + a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(edge_auc(s, flipped) + a == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("RMSE and Pearson") {
  const std::vector<double> a{1, 2, 3, 4}, b{4, 6, 3, 4};
  // squared errors 9, 16, 0, 0
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(25.0 / 4.0)).epsilon(1e-15));
  CHECK(rmse(a, b) == rmse(b, a));
  CHECK(rmse(a, a) == 0.0);

  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> lin{3, 5, 7, 9, 11}, rev{5, 4, 3, 2, 1}, y{2, 1, 4, 3, 5};
  CHECK(pearson(x, lin).r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, rev).r == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> x3{1, 2, 3}, y3{1, 3, 2};
  CHECK(pearson(x3, y3).r == doctest::Approx(0.5).epsilon(1e-15));
  // scipy.stats.pearsonr
  const auto p = pearson(x, y);
  CHECK(p.r == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(p.p == doctest::Approx(0.10408803866182799).epsilon(1e-9));
  const std::vector<double> u{0.3, 1.1, 2.0, 2.2, 4.0, 5.5, 6.1};
  const std::vector<double> v{1.0, 0.2, 2.5, 1.9, 3.3, 6.0, 4.4};
  const auto q = pearson(u, v);
  CHECK(q.r == doctest::Approx(0.9156602480307796).epsilon(1e-12));
  CHECK(q.p == doctest::Approx(0.0037898733030762564).epsilon(1e-9));

  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = -2.0 * v[i] + 5.0;
  CHECK(pearson(u, w).r == doctest::Approx(-q.r).epsilon(1e-12));
  CHECK(pearson(u, w).p == doctest::Approx(q.p).epsilon(1e-9));
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(xs) == 5.0);
  CHECK(stddev(xs) == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-15));
  const std::vector<double> one{3.0};
  CHECK(stddev(one) == 0.0);
}

TEST_CASE("embedding similarity") {
  const RowVector e0 = (RowVector(2) << 1.0, 0.0).finished();
  const RowVector e1 = (RowVector(2) << 0.0, 4.0).finished();
  const RowVector z = RowVector::Zero(2);
  CHECK(cosine(e0, e1) == 0.0);
  CHECK(cosine(e0, 3.0 * e0) == doctest::Approx(1.0));
  CHECK(cosine(e0, -e0) == doctest::Approx(-1.0));
  CHECK(cosine(z, z) == 1.0);
  CHECK(cosine(z, e0) == 0.0);
  CHECK(unit_euclidean(e0, e1) == doctest::Approx(std::numbers::sqrt2));
  CHECK(unit_euclidean(e0, 5.0 * e0) == doctest::Approx(0.0));
  CHECK(unit_euclidean(e0, -e0) == doctest::Approx(2.0));
}

TEST_CASE("continuous ground truth splits at the median") {
  const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}};
  const Graph plain = Graph::from_edges(0, Matrix::Ones(4, 1), edges, 0.0);
  const std::vector<double> w{0.9, 0.2, 0.5};
  const Graph g(0, plain.features(), plain.adjacency(), 0.0, plain.mask_from_edge_weights(w));
  CHECK(binary_ground_truth(g) == std::vector<double>{1, 0, 1});
  const std::vector<double> bin{1, 0, 1};
  const Graph h(0, plain.features(), plain.adjacency(), 0.0, plain.mask_from_edge_weights(bin));
  CHECK(binary_ground_truth(h) == bin);
  CHECK(binary_ground_truth(plain).empty());
}

TEST_CASE("shift report on trivial explanations") {
  datasets::GenConfig gc;
  gc.n_graphs = 20;
  gc.seed = 1;
  const auto ds = datasets::generate(datasets::kBaMotifCounting, gc);
  const auto model = GcnModel::initialized(ds.graphs[0].feature_dim(), 6, Readout::mean, 2);
  std::vector<Explanation> full;
  for (const auto& g : ds.graphs) full.emplace_back(g, g.ones_mask());
  const auto r = shift_report(model, ds, full, false);
  CHECK(r.rmse_gs == 0.0);
  CHECK(r.rmse_gy == doctest::Approx(r.rmse_sy).epsilon(1e-15));

  const auto d = shift_data(model, ds, full, false);
  CHECK(d.graph_ids.size() == ds.graphs.size());
  CHECK(d.f_g == d.f_star);

  const std::vector<int> last{static_cast<int>(ds.graphs.size()) - 1};
  CHECK_NOTHROW(shift_report(model, ds, full, false, last));
  const std::vector<Explanation> partial(full.begin(), full.end() - 1);
  CHECK_THROWS_AS(shift_report(model, ds, partial, false, last), CoverageError);
  const std::vector<int> outside{static_cast<int>(ds.graphs.size())};
  CHECK_THROWS_AS(shift_report(model, ds, full, false, outside), CoverageError);
  std::vector<Explanation> stray{full.front()};
  const Graph other(9999, ds.graphs[0].features(), ds.graphs[0].adjacency(), 0.0);
  stray.emplace_back(other, other.ones_mask());
  CHECK_THROWS_AS(shift_report(model, ds, stray, false), CoverageError);
}

TEST_CASE("pooled AUC of the ground truth itself is perfect") {
  datasets::GenConfig gc;
  gc.n_graphs = 15;
  gc.seed = 4;
  const auto ds = datasets::generate(datasets::kBaMotifCounting, gc);
  std::vector<Explanation> exact, inverse;
  for (const auto& g : ds.graphs) {
    exact.emplace_back(g, *g.gt_mask());
    inverse.emplace_back(g, residual_mask(g, *g.gt_mask()));
  }
  CHECK(pooled_auc(ds, exact) == 1.0);
  CHECK(pooled_auc(ds, inverse) == 0.0);
}

TEST_CASE("records serialize one object per line") {
  const std::vector<Record> rs{{"auc_mean", "ba", "regexplainer", 3, 0.1},
                               {"rmse_gs", "ba", "grad", 0, 2.0}};
  const auto text = serialize_records(rs);
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 2);
  const auto j = io::Json::parse(lines[0]);
  CHECK(j["metric"] == "auc_mean");
  CHECK(j["seed"] == 3);
  CHECK(j["value"].get<double>() == 0.1);
  CHECK(lines[0].find("\"metric\"") < lines[0].find("\"value\""));

  EvalReport r;
  r.rmse_gs = 1.5;
  std::vector<Record> out;
  append_records(out, r, "ba", "grad", 7);
  REQUIRE(out.size() == 1);
  CHECK(out[0].metric == "rmse_gs");
  CHECK(fixed(0.123456, 3) == "0.123");
}
