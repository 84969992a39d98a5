#include "regx/repro.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "regx/datasets.hpp"
#include "regx/errors.hpp"
#include "regx/explainers.hpp"
#include "regx/gnn.hpp"
#include "regx/losses.hpp"
#include "regx/mixup.hpp"
#include "regx/random.hpp"

namespace regx::repro {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kFdTolerance = 1e-4;
// Below this magnitude a gradient entry is compared in absolute terms.
constexpr double kFdFloor = 1e-4;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string num(double v) { return fmt("%.4g", v); }

void note(const Progress& p, const std::string& msg) {
  if (p) p(msg);
}

struct GradCheck {
  double worst = 0.0;
  void add(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), kFdFloor});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
};

template <typename F>
double central(F&& f, double& x) {
  const double x0 = x;
  x = x0 + kFdStep;
  const double up = f();
  x = x0 - kFdStep;
  const double down = f();
  x = x0;
  return (up - down) / (2.0 * kFdStep);
}

RowVector random_row(Rng& rng, int n, double scale) {
  RowVector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

// Ring on n nodes plus random chords.
Graph fixture_graph(Rng& rng, int id, int n, int d, double chord_prob) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1) || uniform01(rng) < chord_prob) {
        edges.push_back({i, j});
      }
    }
  }
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) x.row(i) = random_row(rng, d, 1.0);
  return Graph::from_edges(id, std::move(x), edges, 0.0);
}

Graph random_graph(Rng& rng, int id, int n, double p) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform01(rng) < p) edges.push_back({i, j});
    }
  }
  return Graph::from_edges(id, Matrix::Ones(n, 3), edges, 0.0);
}

EdgeMask random_mask(Rng& rng, const Graph& g) {
  std::vector<double> w(static_cast<std::size_t>(g.num_edges()));
  for (double& v : w) v = uniform01(rng);
  return g.mask_from_edge_weights(w);
}

std::vector<std::uint64_t> seed_list(const DeskScale& cfg) {
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < cfg.seeds; ++s) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(s));
  return seeds;
}

void append_seed_runs(std::vector<eval::Record>& out, const eval::SeedRuns& runs,
                      const std::string& dataset, std::span<const std::uint64_t> seeds) {
  for (std::size_t i = 0; i < runs.auc.size(); ++i) {
    out.push_back({"auc", dataset, runs.label, seeds[i], runs.auc[i]});
  }
}

std::string sweep_label(double alpha) {
  std::ostringstream os;
  os << "regexplainer[alpha=" << alpha << "]";
  return os.str();
}

}  // namespace

void DeskScale::validate() const {
  if (n_graphs < 30) throw ValidationError("desk scale needs at least 30 graphs");
  if (gnn_epochs < 1 || explainer_epochs < 1) throw ValidationError("epochs must be >= 1");
  if (seeds < 1) throw ValidationError("at least one explainer seed is required");
  if (alpha_grid.empty()) throw ValidationError("alpha grid is empty");
}

// -- criterion 1 ------------------------------------------------------------

CriterionResult check_exact_values() {
  CriterionResult r{1, "exact values", true, ""};
  std::vector<std::string> failures;
  auto expect = [&](const char* what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) {
      failures.push_back(std::string(what) + " = " + fmt("%.17g", got));
    }
  };
  const double ln2 = std::numbers::ln2;
  const RowVector z = RowVector::Zero(2);
  RowVector e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  expect("nce(zeros)", losses::info_nce_loss(z, z, z, z, z), ln2, 1e-9);
  expect("nce(aligned)", losses::info_nce_loss(e0, e1, e0, e0, e1), ln2, 1e-9);
  RowVector two(2), three(2);
  two << 2, 0;
  three << 0, 3;
  expect("nce(log 1+e)", losses::info_nce_loss(two, e1, e0, e0, three),
         std::log1p(std::numbers::e), 1e-9);

  const std::vector<double> none(4, 0.0), ten(10, 1.0), hundred(100, 1.0);
  expect("size(zero)", losses::size_loss(none, z, 0.1), ln2, 1e-9);
  expect("size(sum 10)", losses::size_loss(ten, z, 0.1), 1.0 + ln2, 1e-9);
  expect("size(gamma 3e-4)", losses::size_loss(hundred, z, 0.0003), 0.03 + ln2, 1e-9);

  const std::vector<double> scores{0.9, 0.8, 0.7, 0.1}, labels{1, 0, 1, 0};
  const double auc = eval::edge_auc(scores, labels);
  if (auc != 0.75) failures.push_back("auc = " + fmt("%.17g", auc));

  const std::vector<double> xs{1, 2, 3}, ys{1, 3, 2};
  expect("pearson", eval::pearson(xs, ys).r, 0.5, 1e-12);

  r.passed = failures.empty();
  if (r.passed) {
    r.detail = "InfoNCE, size, AUC and Pearson examples match";
  } else {
    for (const auto& f : failures) r.detail += (r.detail.empty() ? "" : "; ") + f;
  }
  return r;
}

// -- criterion 2 ------------------------------------------------------------

CriterionResult check_triangle_oracles(std::uint64_t seed) {
  datasets::GenConfig gc;
  gc.n_graphs = 100;
  gc.seed = seed;
  const auto ds = datasets::gen_triangles(gc);
  int mismatches = 0;
  for (const auto& g : ds.graphs) {
    const auto label = static_cast<long long>(g.label());
    if (static_cast<double>(label) != g.label() || label != datasets::count_triangles(g) ||
        label != datasets::count_triangles_trace(g)) {
      ++mismatches;
    }
  }
  return {2, "triangle oracles", mismatches == 0,
          std::to_string(ds.graphs.size() - static_cast<std::size_t>(mismatches)) + "/" +
              std::to_string(ds.graphs.size()) +
              " graphs agree with enumeration and trace(A^3)/6"};
}

// -- criterion 3 ------------------------------------------------------------

CriterionResult check_gradients(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {3}));
  GradCheck mse_c, size_c, nce_c, param_c, mask_c;

  for (int trial = 0; trial < 5; ++trial) {
    // MSE
    double ya = 4.0 * uniform01(rng) - 2.0, yb = 4.0 * uniform01(rng) - 2.0;
    const auto [ga, gb] = losses::mse_grad(ya, yb);
    mse_c.add(ga, central([&] { return losses::mse_loss(ya, yb); }, ya));
    mse_c.add(gb, central([&] { return losses::mse_loss(ya, yb); }, yb));

    // size, over edge weights and h*
    const Graph g = fixture_graph(rng, trial, 10, 4, 0.3);
    std::vector<double> w(static_cast<std::size_t>(g.num_edges()));
    for (double& v : w) v = uniform01(rng);
    RowVector hs = random_row(rng, 6, 0.5);
    const double gamma = 0.05;
    auto size_fn = [&] { return losses::size_loss(w, hs, gamma); };
    const auto sg = losses::size_grad(hs, gamma);
    for (double& v : w) size_c.add(sg.per_edge, central(size_fn, v));
    for (int k = 0; k < hs.size(); ++k) size_c.add(sg.h_star(k), central(size_fn, hs(k)));

    // InfoNCE, every input component
    std::array<RowVector, 5> v;
    for (auto& x : v) x = random_row(rng, 6, 1.0);
    auto nce_fn = [&] { return losses::info_nce_loss(v[0], v[1], v[2], v[3], v[4]); };
    const auto ng = losses::info_nce_grad(v[0], v[1], v[2], v[3], v[4]);
    const std::array<const RowVector*, 5> grads{&ng.h_mix_pos, &ng.h_mix_neg, &ng.h,
                                                &ng.h_pos, &ng.h_neg};
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (int k = 0; k < v[a].size(); ++k) nce_c.add((*grads[a])(k), central(nce_fn, v[a](k)));
    }

    // GCN prediction w.r.t. parameters and edge weights
    GcnModel model = GcnModel::initialized(4, 5, trial % 2 ? Readout::sum : Readout::mean,
                                           derive_seed(seed, {31, static_cast<std::uint64_t>(trial)}));
    for (int c = 0; c < 5; ++c) {
      model.params()[GcnModel::kHead2W](c, 0) = 2.0 * uniform01(rng) - 1.0;
    }
    model.embed_shift = random_row(rng, 5, 0.2);
    model.embed_scale = RowVector::Constant(5, 1.5);
    model.input_scale = RowVector::Constant(4, 0.8);
    model.output_shift = 0.3;
    model.output_scale = 1.7;

    ad::Tape tape;
    const auto params = bind_params(tape, model, true);
    Matrix wm(g.num_edges(), 1);
    for (int k = 0; k < g.num_edges(); ++k) wm(k, 0) = w[static_cast<std::size_t>(k)];
    const auto wv = tape.variable(wm);
    const auto out = gcn_forward(tape, model, params, g.num_nodes(), g.edges(), wv,
                                 tape.constant(g.features()));
    tape.backward(out.prediction);
    auto pred = [&] { return gcn_forward_weights(model, g, w).prediction; };
    for (std::size_t p = 0; p < params.size(); ++p) {
      const Matrix analytic = params[p].grad();
      Matrix& m = model.params()[p];
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          param_c.add(analytic(i, j), central(pred, m(i, j)));
        }
      }
    }
    const Matrix wg = wv.grad();
    for (int k = 0; k < g.num_edges(); ++k) {
      mask_c.add(wg(k, 0), central(pred, w[static_cast<std::size_t>(k)]));
    }
  }

  const double worst = std::max({mse_c.worst, size_c.worst, nce_c.worst, param_c.worst,
                                 mask_c.worst});
  return {3, "gradient suite", worst < kFdTolerance,
          "max relative error: mse " + num(mse_c.worst) + ", size " + num(size_c.worst) +
              ", nce " + num(nce_c.worst) + ", gcn params " + num(param_c.worst) +
              ", gcn mask " + num(mask_c.worst)};
}

// -- criterion 4 ------------------------------------------------------------

CriterionResult check_mixup_invariants(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {4}));
  constexpr int kCases = 200;
  int failed = 0;
  std::string first_failure;
  for (int c = 0; c < kCases; ++c) {
    const Graph ga = random_graph(rng, 2 * c, uniform_int(rng, 3, 16), 0.1 + 0.5 * uniform01(rng));
    const Graph gb = random_graph(rng, 2 * c + 1, uniform_int(rng, 3, 16), 0.1 + 0.5 * uniform01(rng));
    const EdgeMask ma = random_mask(rng, ga);
    const EdgeMask mb = random_mask(rng, gb);
    const auto mix_seed = derive_seed(seed, {40, static_cast<std::uint64_t>(c)});
    const auto mx = mixup::mixup_graphs(ga, ma, gb, mb, 0.03, mix_seed);

    const int na = ga.num_nodes(), nb = gb.num_nodes();
    const Matrix& m = mx.mask.matrix();
    const Matrix& a = mx.merged.adjacency();
    std::string why;
    if (m.topLeftCorner(na, na) != ma.matrix()) why = "target block";
    for (const auto& e : gb.edges()) {
      const double want = 1.0 - mb(e.u, e.v);
      if (m(na + e.u, na + e.v) != want || m(na + e.v, na + e.u) != want) why = "partner block";
    }
    const int eta = std::max(1, static_cast<int>(std::lround(0.03 * ga.num_edges())));
    if (static_cast<int>(mx.conn_edges.size()) != eta) why = "connection count";
    if (m != m.transpose() || a != a.transpose()) why = "symmetry";

    Matrix expect = Matrix::Zero(na + nb, na + nb);
    expect.topLeftCorner(na, na) = ga.adjacency();
    expect.bottomRightCorner(nb, nb) = gb.adjacency();
    for (const auto& e : mx.conn_edges) {
      if (e.u >= na || e.v < na) why = "connection endpoints";
      expect(e.u, e.v) = expect(e.v, e.u) = 1.0;
    }
    if (a != expect) why = "phantom edges";
    const auto again = mixup::mixup_graphs(ga, ma, gb, mb, 0.03, mix_seed);
    if (again.conn_edges != mx.conn_edges) why = "determinism";

    if (!why.empty()) {
      if (failed++ == 0) first_failure = "case " + std::to_string(c) + ": " + why;
    }
  }
  return {4, "mixup invariants", failed == 0,
          failed == 0 ? std::to_string(kCases) + " randomized cases exact"
                      : std::to_string(failed) + " failing cases, first " + first_failure};
}

// -- criteria 5 to 10 -------------------------------------------------------

PipelineReport run_pipeline(const DeskScale& cfg, const Progress& progress) {
  cfg.validate();
  PipelineReport rep;
  const auto seeds = seed_list(cfg);

  struct Trained {
    GraphDataset ds;
    GcnModel model;
  };
  auto train = [&](const char* name) {
    datasets::GenConfig gc;
    gc.n_graphs = cfg.n_graphs;
    gc.seed = cfg.seed;
    Trained t{datasets::generate(name, gc), {}};
    note(progress, std::string("training GCN on ") + name);
    TrainConfig tc;
    tc.epochs = cfg.gnn_epochs;
    tc.seed = cfg.seed;
    t.model = train_gnn(t.ds, tc).model;

    DatasetRun run;
    run.dataset = name;
    std::vector<double> y, f;
    for (int i : t.ds.splits.explainer_test) {
      const Graph& g = t.ds.graphs[static_cast<std::size_t>(i)];
      y.push_back(g.label());
      f.push_back(gcn_forward(t.model, g).prediction);
    }
    run.gnn_test_rmse = eval::rmse(f, y);
    run.label_std = eval::stddev(y);
    rep.records.push_back({"gnn_test_rmse", name, "none", cfg.seed, run.gnn_test_rmse});
    rep.runs.push_back(run);
    return t;
  };
  auto explain_cfg = [&](explain::Kind kind) {
    auto c = explain::default_config(kind);
    if (kind != explain::Kind::gnnexplainer && kind != explain::Kind::grad) {
      c.epochs = cfg.explainer_epochs;
    }
    c.seed = cfg.seed;
    return c;
  };

  // Shift (PGExplainer) and repair (RegExplainer) on counting and triangles.
  auto shift_and_repair = [&](Trained& t, DatasetRun& run) {
    const auto& targets = t.ds.splits.explainer_test;
    note(progress, "shift and repair study on " + t.ds.name);
    const auto pg = explain::run_explainer(t.model, t.ds, explain_cfg(explain::Kind::pgexplainer),
                                           targets);
    run.pg = eval::shift_report(t.model, t.ds, pg.explanations, eval::uses_hard_mask(t.ds.name));
    eval::append_records(rep.records, run.pg, t.ds.name, "pgexplainer", cfg.seed);
    const auto reg = explain::run_explainer(t.model, t.ds,
                                            explain_cfg(explain::Kind::regexplainer), targets);
    eval::RepairOptions ro;
    ro.seed = cfg.seed;
    run.reg = eval::repair_report(t.model, t.ds, reg.explanations, ro);
    eval::append_records(rep.records, run.reg, t.ds.name, "regexplainer", cfg.seed);
  };

  auto counting = train(datasets::kBaMotifCounting);
  shift_and_repair(counting, rep.runs.back());
  {
    auto triangles = train(datasets::kTriangles);
    shift_and_repair(triangles, rep.runs.back());
  }

  // Method ordering, ablations and the alpha sweep on counting.
  const auto& cds = counting.ds;
  const auto& targets = cds.splits.explainer_test;
  const std::string cname = cds.name;
  for (auto kind : {explain::Kind::regexplainer, explain::Kind::pgexplainer,
                    explain::Kind::gnnexplainer}) {
    note(progress, "method AUC over seeds: " + explain::to_string(kind));
    rep.methods.push_back(eval::auc_over_seeds(counting.model, cds, explain_cfg(kind), seeds,
                                               targets, explain::to_string(kind)));
    append_seed_runs(rep.records, rep.methods.back(), cname, seeds);
  }
  eval::SeedRuns full = rep.methods.front();
  full.label = "full";
  rep.ablation.push_back(full);
  for (const char* variant : {"no_mix", "no_nce", "no_mse"}) {
    note(progress, std::string("ablation ") + variant);
    auto c = explain_cfg(explain::Kind::regexplainer);
    c.ablation = explain::ablation_from_string(variant);
    rep.ablation.push_back(eval::auc_over_seeds(counting.model, cds, c, seeds, targets,
                                                std::string("regexplainer[") + variant + "]"));
    append_seed_runs(rep.records, rep.ablation.back(), cname, seeds);
  }
  const auto base = explain_cfg(explain::Kind::regexplainer);
  for (double alpha : cfg.alpha_grid) {
    rep.sweep_alpha.push_back(alpha);
    if (alpha == base.loss_weights.alpha && base.loss_weights.beta == 1.0) {
      auto same = rep.methods.front();
      same.label = sweep_label(alpha);
      rep.sweep.push_back(same);
      continue;
    }
    note(progress, "sweep " + sweep_label(alpha));
    auto c = base;
    c.loss_weights.alpha = alpha;
    c.loss_weights.beta = 1.0;
    rep.sweep.push_back(eval::auc_over_seeds(counting.model, cds, c, seeds, targets,
                                             sweep_label(alpha)));
    append_seed_runs(rep.records, rep.sweep.back(), cname, seeds);
  }

  // Correlation study on volume.
  {
    auto volume = train(datasets::kBaMotifVolume);
    note(progress, "correlation study on " + volume.ds.name);
    const auto pg = explain::run_explainer(volume.model, volume.ds,
                                           explain_cfg(explain::Kind::pgexplainer),
                                           volume.ds.splits.explainer_test);
    const auto sd = eval::shift_data(volume.model, volume.ds, pg.explanations,
                                     eval::uses_hard_mask(volume.ds.name));
    auto& run = rep.runs.back();
    eval::fill_shift(run.pg, sd);
    rep.volume_correlation = eval::correlation_study(sd);
    run.pg.pearson.push_back({"star_vs_y", rep.volume_correlation.star_vs_y});
    run.pg.pearson.push_back({"shift_vs_y", rep.volume_correlation.shift_vs_y});
    eval::append_records(rep.records, run.pg, volume.ds.name, "pgexplainer", cfg.seed);
  }

  // Verdicts.
  auto shift_ok = [](const eval::EvalReport& r) {
    return r.rmse_sy > r.rmse_gy && r.rmse_gs > 0.5 * r.rmse_sy;
  };
  auto repair_ok = [](const eval::EvalReport& r) {
    return r.cos_gm > r.cos_ge && r.euc_gm < r.euc_ge && r.rmse_pm < r.rmse_pe;
  };
  {
    CriterionResult c5{5, "distribution shift direction", true, ""};
    CriterionResult c6{6, "repair direction", true, ""};
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& run = rep.runs[i];
      c5.passed = c5.passed && shift_ok(run.pg);
      c6.passed = c6.passed && repair_ok(run.reg);
      c5.detail += (i ? "; " : "") + run.dataset + ": gy " + num(run.pg.rmse_gy) + " sy " +
                   num(run.pg.rmse_sy) + " gs " + num(run.pg.rmse_gs);
      c6.detail += (i ? "; " : "") + run.dataset + ": cos " + num(run.reg.cos_ge) + "->" +
                   num(run.reg.cos_gm) + " euc " + num(run.reg.euc_ge) + "->" +
                   num(run.reg.euc_gm) + " rmse " + num(run.reg.rmse_pe) + "->" +
                   num(run.reg.rmse_pm);
    }
    rep.criteria.push_back(c5);
    rep.criteria.push_back(c6);
  }
  {
    const double reg = rep.methods[0].mean, pg = rep.methods[1].mean, gnn = rep.methods[2].mean;
    rep.criteria.push_back({7, "method ordering", reg > pg && reg > gnn && reg >= 0.80,
                            "AUC regexplainer " + num(reg) + ", pgexplainer " + num(pg) +
                                ", gnnexplainer " + num(gnn)});
  }
  {
    bool ok = true;
    std::string detail = "full " + num(rep.ablation[0].mean);
    for (std::size_t i = 1; i < rep.ablation.size(); ++i) {
      ok = ok && rep.ablation[0].mean >= rep.ablation[i].mean - 0.02;
      detail += ", " + rep.ablation[i].label + " " + num(rep.ablation[i].mean);
    }
    rep.criteria.push_back({8, "ablation ordering", ok, detail});
  }
  {
    double lo = 1.0, hi = 0.0;
    std::string detail;
    for (std::size_t i = 0; i < rep.sweep.size(); ++i) {
      lo = std::min(lo, rep.sweep[i].mean);
      hi = std::max(hi, rep.sweep[i].mean);
      detail += (i ? ", " : "") + std::string("alpha ") + num(rep.sweep_alpha[i]) + " " +
                num(rep.sweep[i].mean);
    }
    rep.criteria.push_back({9, "alpha robustness", hi - lo <= 0.15,
                            detail + "; spread " + num(hi - lo)});
  }
  {
    const auto& p = rep.volume_correlation.star_vs_y;
    rep.criteria.push_back({10, "correlation sign", p.r > 0.0 && p.p < 0.05,
                            "r " + num(p.r) + ", p " + num(p.p)});
  }
  return rep;
}

CriterionResult check_determinism(const PipelineReport& a, const PipelineReport& b) {
  const auto sa = eval::serialize_records(a.records);
  const auto sb = eval::serialize_records(b.records);
  return {11, "determinism", sa == sb,
          std::to_string(a.records.size()) + " records, " +
              (sa == sb ? "byte-identical" : "serializations differ")};
}

std::string format_result(const CriterionResult& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " +
         r.title + ": " + r.detail;
}

}  // namespace regx::repro
