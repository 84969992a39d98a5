#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "regx/datasets.hpp"
#include "regx/errors.hpp"
#include "regx/explainers.hpp"
#include "regx/gnn.hpp"

using namespace regx;
using namespace regx::explain;

namespace {

struct Fixture {
  GraphDataset ds;
  GcnModel model;
};

// Small counting dataset with a briefly trained model, shared across cases.
const Fixture& fixture() {
  static const Fixture f = [] {
    datasets::GenConfig gc;
    gc.n_graphs = 40;
    gc.seed = 3;
    Fixture out;
    out.ds = datasets::generate(datasets::kBaMotifCounting, gc);
    TrainConfig tc;
    tc.epochs = 5;
    tc.hidden_dim = 8;
    tc.seed = 2;
    out.model = train_gnn(out.ds, tc).model;
    return out;
  }();
  return f;
}

ExplainerConfig short_config(Kind k) {
  auto c = default_config(k);
  c.epochs = 3;
  c.hidden_dim = 8;
  c.seed = 9;
  return c;
}

void check_mask_invariants(const Graph& g, const Explanation& e) {
  const Matrix& m = e.mask().matrix();
  CHECK(m.rows() == g.num_nodes());
  CHECK(m == m.transpose());
  CHECK(m.minCoeff() >= 0.0);
  CHECK(m.maxCoeff() <= 1.0);
  for (int i = 0; i < g.num_nodes(); ++i) {
    for (int j = 0; j < g.num_nodes(); ++j) {
      if (g.adjacency()(i, j) == 0.0) CHECK(m(i, j) == 0.0);
    }
  }
  CHECK(e.weights().size() == static_cast<std::size_t>(g.num_edges()));
}

}  // namespace

TEST_CASE("kinds, ablations and defaults") {
  for (auto k : {Kind::grad, Kind::gnnexplainer, Kind::pgexplainer, Kind::mixupexplainer,
                 Kind::regexplainer}) {
    CHECK(kind_from_string(to_string(k)) == k);
    const auto c = default_config(k);
    CHECK(c.kind == k);
    CHECK_NOTHROW(c.validate());
  }
  CHECK(default_config(Kind::grad).epochs == 0);
  CHECK(default_config(Kind::gnnexplainer).learning_rate == 0.01);
  CHECK(default_config(Kind::regexplainer).learning_rate == 0.003);
  CHECK_THROWS_AS(kind_from_string("saliency"), ValidationError);

  CHECK(to_string(Ablation{}) == "none");
  const Ablation all{true, true, true};
  CHECK(to_string(all) == "no_mix+no_nce+no_mse");
  CHECK(ablation_from_string("no_mix+no_nce+no_mse") == all);
  CHECK(ablation_from_string("no_nce") == Ablation{false, true, false});
  CHECK(ablation_from_string("none") == Ablation{});
  CHECK_THROWS_AS(ablation_from_string("no_size"), ValidationError);
}

TEST_CASE("config validation") {
  auto c = default_config(Kind::regexplainer);
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = default_config(Kind::gnnexplainer);
  c.epochs = 0;
  CHECK_NOTHROW(c.validate());
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = default_config(Kind::mixupexplainer);
  c.eta_fraction = -0.1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("temperature anneals linearly from start to end") {
  const MaskActivation a;
  CHECK(a.temperature(0, 100) == 5.0);
  CHECK(a.temperature(99, 100) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.temperature(33, 67) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(a.temperature(0, 1) == 5.0);
  double prev = a.temperature(0, 10);
  for (int e = 1; e < 10; ++e) {
    CHECK(a.temperature(e, 10) < prev);
    prev = a.temperature(e, 10);
  }
}

TEST_CASE("GNNExplainer without steps keeps every edge at one half") {
  const auto& f = fixture();
  auto c = default_config(Kind::gnnexplainer);
  c.epochs = 0;
  const auto& g = f.ds.graphs[0];
  for (double l : gnnexplainer_logits(f.model, g, c)) CHECK(l == 0.0);
  for (double w : gnnexplainer_explain(f.model, g, c).weights()) CHECK(w == 0.5);
}

TEST_CASE("zero networks give flat explanations") {
  const auto& f = fixture();
  const auto& g = f.ds.graphs[1];
  const GcnModel zero(g.feature_dim(), 8, Readout::mean);
  for (double w : grad_explain(zero, g).weights()) CHECK(w == 0.0);
  const PgNetwork flat(3 * f.model.hidden_dim(), 8);
  for (double w : pg_edge_weights(flat, f.model, g)) CHECK(w == 0.5);
}

TEST_CASE("edge gradient matches central differences") {
  const auto& f = fixture();
  const auto& g = f.ds.graphs[2];
  const auto grad = mse_edge_gradient(f.model, g);
  REQUIRE(grad.size() == static_cast<std::size_t>(g.num_edges()));
  std::vector<double> w(grad.size(), 1.0);
  auto loss = [&] {
    const double p = gcn_forward_weights(f.model, g, w).prediction;
    return (p - g.label()) * (p - g.label());
  };
  double worst = 0.0;
  for (std::size_t e = 0; e < w.size(); ++e) {
    worst = std::max(worst, test::rel_err(grad[e], test::central_diff(loss, w[e], 1e-5), 1e-4));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("every explainer yields a valid mask") {
  const auto& f = fixture();
  const auto& targets = f.ds.splits.explainer_test;
  for (auto k : {Kind::grad, Kind::gnnexplainer, Kind::pgexplainer, Kind::mixupexplainer,
                 Kind::regexplainer}) {
    auto c = short_config(k);
    if (k == Kind::gnnexplainer) c.epochs = 5;
    if (k == Kind::grad) c.epochs = 0;
    const auto run = run_explainer(f.model, f.ds, c, targets);
    CHECK(run.trained.has_value() == (k != Kind::grad && k != Kind::gnnexplainer));
    REQUIRE(run.explanations.size() == targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& g = f.ds.graphs[static_cast<std::size_t>(targets[i])];
      CHECK(run.explanations[i].graph_id() == g.id());
      check_mask_invariants(g, run.explanations[i]);
    }
  }
}

TEST_CASE("fully ablated RegExplainer reduces to PGExplainer with the size term only") {
  const auto& f = fixture();
  auto reg = short_config(Kind::regexplainer);
  reg.ablation = Ablation{true, true, true};
  auto pg = short_config(Kind::pgexplainer);
  pg.loss_weights.beta = 0.0;
  pg.learning_rate = reg.learning_rate;
  const auto a = train_pg_family(f.model, f.ds, reg);
  const auto b = train_pg_family(f.model, f.ds, pg);
  CHECK(a.net == b.net);
  CHECK(a.epoch_loss == b.epoch_loss);

  // alpha = beta = 0 switches the same terms off.
  auto zero = short_config(Kind::regexplainer);
  zero.loss_weights.alpha = 0.0;
  zero.loss_weights.beta = 0.0;
  CHECK(train_pg_family(f.model, f.ds, zero).net == a.net);
}

TEST_CASE("one epoch moves every edge-network parameter") {
  const auto& f = fixture();
  for (auto k : {Kind::pgexplainer, Kind::mixupexplainer, Kind::regexplainer}) {
    auto c = short_config(k);
    c.epochs = 1;
    const auto init = PgNetwork::initialized(3 * f.model.hidden_dim(), c.hidden_dim, c.seed);
    const auto r = train_pg_family(f.model, f.ds, c);
    REQUIRE(r.epoch_loss.size() == 1);
    CHECK(std::isfinite(r.epoch_loss[0]));
    for (int p = 0; p < PgNetwork::kNumParams; ++p) {
      CAPTURE(PgNetwork::param_name(p));
      CHECK(r.net.params()[p] != init.params()[p]);
    }
  }
}

TEST_CASE("the InfoNCE term changes the trained network") {
  const auto& f = fixture();
  auto with = short_config(Kind::regexplainer);
  auto without = with;
  without.ablation.no_nce = true;
  CHECK_FALSE(train_pg_family(f.model, f.ds, with).net ==
              train_pg_family(f.model, f.ds, without).net);
  auto flipped = with;
  flipped.sign_mode = flipped.sign_mode == losses::SignMode::as_printed
                          ? losses::SignMode::as_derived
                          : losses::SignMode::as_printed;
  CHECK_FALSE(train_pg_family(f.model, f.ds, with).net ==
              train_pg_family(f.model, f.ds, flipped).net);
}

TEST_CASE("PG-family training: serial equals parallel, reruns agree, seeds differ") {
  const auto& f = fixture();
  for (auto k : {Kind::pgexplainer, Kind::mixupexplainer, Kind::regexplainer}) {
    const auto c = short_config(k);
    const auto s = train_pg_family(f.model, f.ds, c, kernels::Exec::serial);
    const auto p = train_pg_family(f.model, f.ds, c, kernels::Exec::parallel);
    CHECK(s.net == p.net);
    CHECK(s.epoch_loss == p.epoch_loss);
    kernels::set_worker_count(3);
    const auto p3 = train_pg_family(f.model, f.ds, c, kernels::Exec::parallel);
    kernels::set_worker_count(0);
    CHECK(p3.net == s.net);
    auto other = c;
    other.seed = 10;
    CHECK_FALSE(train_pg_family(f.model, f.ds, other).net == s.net);
  }
}

TEST_CASE("PG checkpoints round-trip") {
  const auto& f = fixture();
  const auto c = short_config(Kind::regexplainer);
  const auto r = train_pg_family(f.model, f.ds, c);
  const auto path = std::filesystem::temp_directory_path() / "regx_test_pg.json";
  write_pg_checkpoint(r.net, c, path);
  const auto back = read_pg_checkpoint(path);
  CHECK(back == r.net);
  CHECK(back.input_scale == r.net.input_scale);
  for (const auto& g : f.ds.graphs) {
    CHECK(pg_edge_weights(back, f.model, g) == pg_edge_weights(r.net, f.model, g));
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_pg_checkpoint(path), IoError);
}

TEST_CASE("PG-family pools that are too small") {
  auto ds = fixture().ds;
  ds.splits.explainer_train = {ds.splits.explainer_train.front()};
  CHECK_THROWS_AS(train_pg_family(fixture().model, ds, short_config(Kind::mixupexplainer)),
                  SamplingError);
  CHECK_THROWS_AS(train_pg_family(fixture().model, ds, short_config(Kind::regexplainer)),
                  SamplingError);
  ds.splits.explainer_train.clear();
  CHECK_THROWS_AS(train_pg_family(fixture().model, ds, short_config(Kind::pgexplainer)),
                  ValidationError);
}
