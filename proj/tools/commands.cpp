#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "plots.hpp"
#include "regx/dataset_io.hpp"
#include "regx/errors.hpp"
#include "regx/eval.hpp"
#include "regx/mixup.hpp"
#include "regx/random.hpp"
#include "regx/repro.hpp"

namespace regx::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kStamp = "stamp.json";

void write_json(const fs::path& path, const io::Json& j) {
  io::write_file(path, j.dump(2) + "\n");
}

bool is_pg_family(explain::Kind k) {
  return k == explain::Kind::pgexplainer || k == explain::Kind::mixupexplainer ||
         k == explain::Kind::regexplainer;
}

std::string explainer_label(const explain::ExplainerConfig& e) {
  auto s = explain::to_string(e.kind);
  if (!(e.ablation == explain::Ablation{})) s += "-" + explain::to_string(e.ablation);
  return s;
}

plots::Series series(std::string name, std::vector<double> x, std::vector<double> y) {
  return {std::move(name), std::move(x), std::move(y), {}};
}

void loss_plot(const std::vector<double>& loss, const fs::path& dir, const std::string& title) {
  std::vector<double> epoch(loss.size());
  std::iota(epoch.begin(), epoch.end(), 1.0);
  plots::Figure fig{title, "epoch", "loss", plots::Style::lines, false,
                    {series("loss", epoch, loss)}, {}};
  plots::write_figure(fig, dir, "loss");
}

eval::SeedRuns summarize(std::string label, std::vector<double> auc) {
  eval::SeedRuns r{std::move(label), std::move(auc), eval::kUnset, eval::kUnset};
  std::vector<double> finite;
  for (double v : r.auc) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  if (!finite.empty()) {
    r.mean = eval::mean(finite);
    r.std = eval::stddev(finite);
  }
  return r;
}

std::string pm(const eval::SeedRuns& r) {
  if (!std::isfinite(r.mean)) return "n/a";
  return eval::fixed(r.mean) + " +- " + eval::fixed(r.std);
}

void append_seed_records(std::vector<eval::Record>& out, const eval::SeedRuns& r,
                         const std::string& dataset, std::span<const std::uint64_t> seeds) {
  for (std::size_t i = 0; i < r.auc.size() && i < seeds.size(); ++i) {
    if (std::isfinite(r.auc[i])) out.push_back({"auc", dataset, r.label, seeds[i], r.auc[i]});
  }
}

std::string seed_runs_table(const std::vector<eval::SeedRuns>& runs, const std::string& key) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : runs) {
    rows.push_back({r.label, eval::fixed(r.mean), eval::fixed(r.std),
                    std::to_string(r.auc.size())});
  }
  return eval::format_table({key, "AUC mean", "AUC std", "seeds"}, rows);
}

plots::Figure auc_bars(const std::string& title, const std::vector<eval::SeedRuns>& runs) {
  plots::Figure fig{title, "variant", "AUC", plots::Style::bars, false, {}, {}};
  plots::Series s{"auc", {}, {}, {}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    s.x.push_back(static_cast<double>(i));
    s.y.push_back(runs[i].mean);
    s.err.push_back(runs[i].std);
    fig.categories.push_back(runs[i].label);
  }
  fig.series.push_back(std::move(s));
  return fig;
}

// Fig. 2 style: graphs sorted by label, three prediction series.
plots::Figure shift_figure(const eval::ShiftData& d, const std::string& title) {
  std::vector<std::size_t> order(d.y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d.y[a] < d.y[b]; });
  std::vector<double> x, y, fg, fs;
  for (std::size_t r = 0; r < order.size(); ++r) {
    x.push_back(static_cast<double>(r));
    y.push_back(d.y[order[r]]);
    fg.push_back(d.f_g[order[r]]);
    fs.push_back(d.f_star[order[r]]);
  }
  return {title, "graph index (sorted by Y)", "value", plots::Style::points, false,
          {series("Y", x, y), series("f_G", x, fg), series("f_Gstar", x, fs)}, {}};
}

plots::Figure correlation_figure(const eval::CorrelationStudy& c, const std::string& title) {
  return {title, "Y", "absolute gap", plots::Style::points, false,
          {series("star_err", c.y, c.star_err), series("shift_err", c.y, c.shift_err)}, {}};
}

std::string shift_table(const eval::EvalReport& r, const std::string& dataset,
                        const std::string& explainer) {
  return eval::format_table(
      {"dataset", "explainer", "RMSE f(G)-Y", "RMSE f(G*)-Y", "RMSE f(G)-f(G*)"},
      {{dataset, explainer, eval::fixed(r.rmse_gy), eval::fixed(r.rmse_sy),
        eval::fixed(r.rmse_gs)}});
}

std::string repair_table(const eval::EvalReport& r, const std::string& dataset,
                         const std::string& explainer) {
  return eval::format_table(
      {"dataset", "explainer", "cos G/G*", "cos G/Gmix", "euc G/G*", "euc G/Gmix",
       "RMSE G*", "RMSE Gmix"},
      {{dataset, explainer, eval::fixed(r.cos_ge), eval::fixed(r.cos_gm), eval::fixed(r.euc_ge),
        eval::fixed(r.euc_gm), eval::fixed(r.rmse_pe), eval::fixed(r.rmse_pm)}});
}

std::string correlation_table(const eval::CorrelationStudy& c) {
  auto row = [](const char* name, const eval::Pearson& p) {
    return std::vector<std::string>{name, eval::fixed(p.r), eval::fixed(p.p, 6)};
  };
  return eval::format_table({"pair", "pearson r", "p-value"},
                            {row("|f(G*)-Y| vs Y", c.star_vs_y),
                             row("|f(G)-f(G*)| vs Y", c.shift_vs_y)});
}

int run_command(const RunConfig& cfg, const CommandOptions& opt,
                const std::function<void(Workspace&)>& body) {
  cfg.validate();
  Workspace ws(cfg, opt);
  body(ws);
  return 0;
}

}  // namespace

Workspace::Workspace(RunConfig cfg, CommandOptions opt) : cfg_(std::move(cfg)), opt_(opt) {
  cfg_.validate();
}

fs::path Workspace::dataset_dir() const { return cfg_.out / cfg_.dataset.name; }

fs::path Workspace::seed_dir(std::uint64_t seed) const {
  return dataset_dir() / explainer_label(cfg_.explainer) / ("seed-" + std::to_string(seed));
}

void Workspace::say(const std::string& line) const {
  if (opt_.out) *opt_.out << line << (line.ends_with('\n') ? "" : "\n") << std::flush;
}

void Workspace::note(const std::string& line) const {
  if (opt_.log) *opt_.log << "[regx] " << line << "\n" << std::flush;
}

explain::ExplainerConfig Workspace::explainer_for(std::uint64_t seed) const {
  auto e = cfg_.explainer;
  e.seed = seed;
  return e;
}

bool Workspace::stage_ready(const fs::path& dir, const io::Json& stamp,
                            const std::vector<fs::path>& artifacts) const {
  const auto stamp_path = dir / kStamp;
  if (opt_.force || !fs::exists(stamp_path)) return false;
  const auto existing = io::Json::parse(io::read_file(stamp_path));
  if (existing != stamp) {
    throw ValidationError(dir.string() +
                          " was produced with a different configuration; pass --force to "
                          "overwrite it or choose another --out");
  }
  return std::all_of(artifacts.begin(), artifacts.end(),
                     [&](const fs::path& a) { return fs::exists(dir / a); });
}

const GraphDataset& Workspace::dataset() {
  if (ds_) return *ds_;
  const auto dir = dataset_dir();
  const auto full = to_json(cfg_);
  const io::Json stamp = {{"dataset", full["dataset"]}};
  fs::create_directories(dir);
  write_json(dir / "config.json", full);
  const auto data_path = dir / "dataset.jsonl";

  if (stage_ready(dir, stamp, {"dataset.jsonl", "manifest.json"})) {
    note("reusing " + data_path.string());
    ds_ = read_dataset(data_path);
    return *ds_;
  }
  fs::remove(dir / kStamp);
  GraphDataset ds;
  if (cfg_.dataset.path) {
    note("loading " + cfg_.dataset.path->string());
    ds = cfg_.dataset.name == datasets::kCrippen ? datasets::load_crippen(*cfg_.dataset.path)
                                                 : read_dataset(*cfg_.dataset.path, true);
  } else {
    note("generating " + cfg_.dataset.name + " (" + std::to_string(cfg_.dataset.gen.n_graphs) +
         " graphs)");
    ds = datasets::generate(cfg_.dataset.name, cfg_.dataset.gen);
  }
  write_dataset(ds, data_path);
  io::write_file(dir / "manifest.json", datasets::manifest_json(ds) + "\n");
  if (!(read_dataset(data_path) == ds)) {
    throw DataIntegrityError(data_path.string() + " does not read back to the generated dataset");
  }
  write_json(dir / kStamp, stamp);
  ds_ = std::move(ds);
  return *ds_;
}

const GcnModel& Workspace::model() {
  if (model_) return *model_;
  const auto& ds = dataset();
  const auto dir = dataset_dir() / "gnn";
  const auto full = to_json(cfg_);
  const io::Json stamp = {{"dataset", full["dataset"]}, {"gnn", full["gnn"]}};
  const auto ckpt = dir / "checkpoint.json";
  fs::create_directories(dir);

  if (stage_ready(dir, stamp, {"checkpoint.json", "loss.dat", "metrics.json"})) {
    note("reusing " + ckpt.string());
    model_ = read_checkpoint(ckpt);
    return *model_;
  }
  fs::remove(dir / kStamp);
  note("training GCN for " + std::to_string(cfg_.gnn.epochs) + " epochs");
  auto trained = train_gnn(ds, cfg_.gnn);
  write_checkpoint(trained.model, cfg_.gnn, ckpt);
  if (!(read_checkpoint(ckpt) == trained.model)) {
    throw DataIntegrityError(ckpt.string() + " does not read back to the trained model");
  }
  {
    std::string body = "# epoch\tmse\n";
    for (std::size_t i = 0; i < trained.epoch_loss.size(); ++i) {
      body += std::to_string(i + 1) + "\t" + io::format_real(trained.epoch_loss[i]) + "\n";
    }
    io::write_file(dir / "loss.dat", body);
    loss_plot(trained.epoch_loss, dir / "plots", "GCN training loss");
  }
  io::Json metrics = io::Json::object();
  for (const auto& [split, idx] :
       {std::pair{"train", &ds.splits.train}, std::pair{"test", &ds.splits.explainer_test}}) {
    std::vector<double> y, f;
    for (int i : *idx) {
      const Graph& g = ds.graphs[static_cast<std::size_t>(i)];
      y.push_back(g.label());
      f.push_back(gcn_forward(trained.model, g).prediction);
    }
    metrics[std::string(split) + "_rmse"] = eval::rmse(f, y);
    metrics[std::string(split) + "_label_std"] = eval::stddev(y);
  }
  write_json(dir / "metrics.json", metrics);
  say("gnn: train RMSE " + eval::fixed(metrics["train_rmse"].get<double>()) + ", test RMSE " +
      eval::fixed(metrics["test_rmse"].get<double>()) + " (label std " +
      eval::fixed(metrics["test_label_std"].get<double>()) + ")");
  write_json(dir / kStamp, stamp);
  model_ = std::move(trained.model);
  return *model_;
}

std::vector<Explanation> Workspace::explanations(std::uint64_t seed) {
  const auto& ds = dataset();
  const auto& model = this->model();
  const auto dir = seed_dir(seed);
  const auto ec = explainer_for(seed);
  auto full = to_json(cfg_);
  full["explainer"]["seed"] = seed;
  const io::Json stamp = {
      {"dataset", full["dataset"]}, {"gnn", full["gnn"]}, {"explainer", full["explainer"]}};
  const bool pg = is_pg_family(ec.kind);
  const auto expl_path = dir / "explanations.jsonl";
  std::vector<fs::path> artifacts{"explanations.jsonl"};
  if (pg) artifacts.emplace_back("checkpoint.json");
  fs::create_directories(dir);

  std::vector<Explanation> expls;
  std::optional<explain::PgNetwork> net;
  if (stage_ready(dir, stamp, artifacts)) {
    note("reusing " + expl_path.string());
    expls = read_explanations(expl_path, ds);
    if (pg && opt_.dump_mixup > 0) net = explain::read_pg_checkpoint(dir / "checkpoint.json");
  } else {
    fs::remove(dir / kStamp);
    write_json(dir / "config.json", full);
    note("running " + explainer_label(ec) + " seed " + std::to_string(seed));
    auto run = explain::run_explainer(model, ds, ec, ds.splits.explainer_test);
    if (run.trained) {
      write_pg_checkpoint(run.trained->net, ec, dir / "checkpoint.json");
      if (!(explain::read_pg_checkpoint(dir / "checkpoint.json") == run.trained->net)) {
        throw DataIntegrityError("explainer checkpoint does not read back");
      }
      std::string body = "# epoch\tloss\n";
      for (std::size_t i = 0; i < run.trained->epoch_loss.size(); ++i) {
        body += std::to_string(i + 1) + "\t" + io::format_real(run.trained->epoch_loss[i]) + "\n";
      }
      io::write_file(dir / "loss.dat", body);
      loss_plot(run.trained->epoch_loss, dir / "plots", explainer_label(ec) + " training loss");
      net = run.trained->net;
    }
    write_explanations(run.explanations, expl_path);
    const auto back = read_explanations(expl_path, ds);
    bool same = back.size() == run.explanations.size();
    for (std::size_t i = 0; same && i < back.size(); ++i) {
      same = back[i].graph_id() == run.explanations[i].graph_id() &&
             back[i].weights() == run.explanations[i].weights();
    }
    if (!same) throw DataIntegrityError(expl_path.string() + " does not read back");
    write_json(dir / kStamp, stamp);
    expls = std::move(run.explanations);
  }
  if (opt_.dump_mixup > 0) dump_mixup(expls, net ? &*net : nullptr, seed);
  return expls;
}

// Debug output: the first few explained graphs merged with their positive
// partner, mask stored as the ground-truth field of the dataset format.
void Workspace::dump_mixup(const std::vector<Explanation>& expls, const explain::PgNetwork* net,
                           std::uint64_t seed) {
  const auto& ds = dataset();
  const auto& model = this->model();
  const auto ec = explainer_for(seed);
  auto explain_partner = [&](const Graph& g) -> Explanation {
    if (net) return explain::pg_explain(*net, model, g);
    if (ec.kind == explain::Kind::grad) return explain::grad_explain(model, g);
    return explain::gnnexplainer_explain(model, g, ec);
  };
  GraphDataset out;
  out.name = ds.name + "-mixup";
  out.seed = seed;
  out.generator_version = ds.generator_version;
  const int n = std::min<int>(opt_.dump_mixup, static_cast<int>(expls.size()));
  for (int k = 0; k < n; ++k) {
    const auto& e = expls[static_cast<std::size_t>(k)];
    const auto it = std::find_if(ds.graphs.begin(), ds.graphs.end(),
                                 [&](const Graph& g) { return g.id() == e.graph_id(); });
    if (it == ds.graphs.end()) throw CoverageError("explanation for unknown graph");
    const Graph& ga = *it;
    const auto pair = mixup::sample_neighbors(ga, ds, model, derive_seed(seed, {0x6d6978u, static_cast<std::uint64_t>(k)}));
    const Graph& gb = ds.graphs[static_cast<std::size_t>(pair.positive)];
    const auto mixed = mixup::mixup_graphs(ga, e.mask(), gb, explain_partner(gb).mask(),
                                           ec.eta_fraction, derive_seed(seed, {0x636f6eu, static_cast<std::uint64_t>(k)}),
                                           ec.conn_weight);
    const Graph& m = mixed.merged;
    out.graphs.emplace_back(k, m.features(), m.adjacency(), m.label(), mixed.mask);
  }
  out.splits = default_splits(static_cast<int>(out.graphs.size()));
  const auto path = seed_dir(seed) / "mixup.jsonl";
  write_dataset(out, path);
  note("wrote " + std::to_string(n) + " mixed graphs to " + path.string());
}

void Workspace::evaluate() {
  const auto& ds = dataset();
  const auto& model = this->model();
  const auto label = explainer_label(cfg_.explainer);
  const bool hard = eval::uses_hard_mask(ds.name);
  std::vector<double> aucs;
  std::vector<eval::Record> all_records;

  for (auto seed : cfg_.eval.seeds) {
    const auto expls = explanations(seed);
    const auto dir = seed_dir(seed) / "reports";
    auto full = to_json(cfg_);
    full["explainer"]["seed"] = seed;
    const io::Json stamp = {{"dataset", full["dataset"]},
                            {"gnn", full["gnn"]},
                            {"explainer", full["explainer"]}};
    fs::create_directories(dir);
    if (stage_ready(dir, stamp, {"auc.json", "records.jsonl", "shift.txt", "repair.txt",
                                 "correlation.txt"})) {
      note("reusing " + dir.string());
      const auto a = io::Json::parse(io::read_file(dir / "auc.json"));
      aucs.push_back(a["auc"].is_null() ? eval::kUnset : a["auc"].get<double>());
      for (const auto& j : io::read_json_lines(dir / "records.jsonl")) {
        all_records.push_back({j["metric"], j["dataset"], j["explainer"], j["seed"], j["value"]});
      }
      continue;
    }
    fs::remove(dir / kStamp);

    double auc = eval::kUnset;
    try {
      auc = eval::pooled_auc(ds, expls);
    } catch (const UndefinedAucError& e) {
      note(std::string("AUC undefined: ") + e.what());
    }
    aucs.push_back(auc);

    const auto sd = eval::shift_data(model, ds, expls, hard, ds.splits.explainer_test);
    eval::EvalReport report;
    eval::fill_shift(report, sd);
    eval::RepairOptions ro{cfg_.explainer.eta_fraction, cfg_.explainer.conn_weight, seed};
    const auto repair = eval::repair_report(model, ds, expls, ro);
    report.cos_ge = repair.cos_ge;
    report.cos_gm = repair.cos_gm;
    report.euc_ge = repair.euc_ge;
    report.euc_gm = repair.euc_gm;
    report.rmse_pe = repair.rmse_pe;
    report.rmse_pm = repair.rmse_pm;
    const auto corr = eval::correlation_study(sd);
    report.pearson.push_back({"star_vs_y", corr.star_vs_y});
    report.pearson.push_back({"shift_vs_y", corr.shift_vs_y});
    report.auc_mean = auc;

    std::vector<eval::Record> records;
    eval::append_records(records, report, ds.name, label, seed);
    io::write_file(dir / "records.jsonl", eval::serialize_records(records));
    io::write_file(dir / "shift.txt", shift_table(report, ds.name, label));
    io::write_file(dir / "repair.txt", repair_table(report, ds.name, label));
    io::write_file(dir / "correlation.txt", correlation_table(corr));
    write_json(dir / "auc.json",
               {{"auc", std::isfinite(auc) ? io::Json(auc) : io::Json(nullptr)}});
    const auto plot_dir = seed_dir(seed) / "plots";
    plots::write_figure(shift_figure(sd, ds.name + ": predictions sorted by Y"), plot_dir,
                        "shift_scatter");
    plots::write_figure(correlation_figure(corr, ds.name + ": gaps against Y"), plot_dir,
                        "correlation");
    write_json(dir / kStamp, stamp);
    all_records.insert(all_records.end(), records.begin(), records.end());
    say("seed " + std::to_string(seed) + ": AUC " +
        (std::isfinite(auc) ? eval::fixed(auc) : std::string("n/a")) + ", RMSE f(G)-Y " +
        eval::fixed(report.rmse_gy) + ", f(G*)-Y " + eval::fixed(report.rmse_sy));
  }

  const auto runs = summarize(label, aucs);
  const auto dir = dataset_dir() / label;
  const auto table = eval::format_table({"dataset", "explainer", "AUC", "seeds"},
                                        {{ds.name, label, pm(runs), std::to_string(aucs.size())}});
  io::write_file(dir / "auc.txt", table);
  io::write_file(dir / "records.jsonl", eval::serialize_records(all_records));
  say(table);
}

void Workspace::ablate() {
  const auto& ds = dataset();
  const auto& model = this->model();
  const auto dir = dataset_dir() / "ablation";
  const auto full = to_json(cfg_);
  const io::Json stamp = {{"dataset", full["dataset"]},
                          {"gnn", full["gnn"]},
                          {"explainer", full["explainer"]},
                          {"seeds", full["eval"]["seeds"]}};
  fs::create_directories(dir);
  if (stage_ready(dir, stamp, {"table.txt", "records.jsonl", "plots/ablation.svg"})) {
    note("reusing " + dir.string());
    say(io::read_file(dir / "table.txt"));
    return;
  }
  fs::remove(dir / kStamp);
  auto ec = cfg_.explainer;
  ec.kind = explain::Kind::regexplainer;
  note("ablation suite over " + std::to_string(cfg_.eval.seeds.size()) + " seeds");
  const auto runs = eval::ablation_suite(model, ds, ec, cfg_.eval.seeds, ds.splits.explainer_test);
  std::vector<eval::Record> records;
  for (const auto& r : runs) append_seed_records(records, r, ds.name, cfg_.eval.seeds);
  const auto table = seed_runs_table(runs, "variant");
  io::write_file(dir / "table.txt", table);
  io::write_file(dir / "records.jsonl", eval::serialize_records(records));
  plots::write_figure(auc_bars(ds.name + ": ablation", runs), dir / "plots", "ablation");
  write_json(dir / kStamp, stamp);
  say(table);
}

void Workspace::sweep() {
  const auto& ds = dataset();
  const auto& model = this->model();
  const auto& param = cfg_.eval.sweep_parameter;
  const auto dir = dataset_dir() / ("sweep-" + param);
  const auto full = to_json(cfg_);
  const io::Json stamp = {{"dataset", full["dataset"]},
                          {"gnn", full["gnn"]},
                          {"explainer", full["explainer"]},
                          {"eval", full["eval"]}};
  fs::create_directories(dir);
  if (stage_ready(dir, stamp, {"table.txt", "records.jsonl", "plots/sweep.svg"})) {
    note("reusing " + dir.string());
    say(io::read_file(dir / "table.txt"));
    return;
  }
  fs::remove(dir / kStamp);
  auto ec = cfg_.explainer;
  ec.kind = explain::Kind::regexplainer;
  note("sweeping " + param + " over " + std::to_string(cfg_.eval.sweep_grid.size()) + " values");
  const auto runs = eval::hyperparam_sweep(model, ds, ec, param, cfg_.eval.sweep_grid,
                                           cfg_.eval.seeds, ds.splits.explainer_test);
  std::vector<eval::Record> records;
  for (const auto& r : runs) append_seed_records(records, r, ds.name, cfg_.eval.seeds);
  const auto table = seed_runs_table(runs, param);
  io::write_file(dir / "table.txt", table);
  io::write_file(dir / "records.jsonl", eval::serialize_records(records));

  const bool log_x = std::all_of(cfg_.eval.sweep_grid.begin(), cfg_.eval.sweep_grid.end(),
                                 [](double v) { return v > 0.0; });
  plots::Series s{"auc", cfg_.eval.sweep_grid, {}, {}};
  for (const auto& r : runs) s.y.push_back(r.mean);
  plots::Figure fig{ds.name + ": AUC against " + param, param, "AUC", plots::Style::lines,
                    log_x, {std::move(s)}, {}};
  plots::write_figure(fig, dir / "plots", "sweep");
  write_json(dir / kStamp, stamp);
  say(table);
}

int cmd_generate(const RunConfig& cfg, const CommandOptions& opt) {
  return run_command(cfg, opt, [&](Workspace& ws) {
    const auto& ds = ws.dataset();
    const auto s = datasets::label_stats(ds);
    if (opt.out) {
      *opt.out << datasets::manifest_json(ds) << "\n"
               << "labels: min " << eval::fixed(s.min) << ", mean " << eval::fixed(s.mean)
               << ", max " << eval::fixed(s.max) << "\n";
    }
  });
}

int cmd_train_gnn(const RunConfig& cfg, const CommandOptions& opt) {
  return run_command(cfg, opt, [](Workspace& ws) { ws.model(); });
}

int cmd_explain(const RunConfig& cfg, const CommandOptions& opt) {
  return run_command(cfg, opt, [&](Workspace& ws) {
    for (auto seed : cfg.eval.seeds) {
      const auto expls = ws.explanations(seed);
      if (opt.out) {
        *opt.out << expls.size() << " explanations in " << ws.seed_dir(seed).string() << "\n";
      }
    }
  });
}

int cmd_evaluate(const RunConfig& cfg, const CommandOptions& opt) {
  return run_command(cfg, opt, [](Workspace& ws) { ws.evaluate(); });
}

int cmd_ablate(const RunConfig& cfg, const CommandOptions& opt) {
  return run_command(cfg, opt, [](Workspace& ws) { ws.ablate(); });
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt) {
  return run_command(cfg, opt, [](Workspace& ws) { ws.sweep(); });
}

int cmd_repro(const RunConfig& cfg, const CommandOptions& opt) {
  repro::DeskScale desk;
  desk.seed = cfg.dataset.gen.seed;
  desk.validate();
  const auto dir = cfg.out / "repro";
  fs::create_directories(dir);
  auto progress = [&](const std::string& m) {
    if (opt.log) *opt.log << "[regx] " << m << "\n" << std::flush;
  };

  std::vector<repro::CriterionResult> results;
  auto report = [&](const repro::CriterionResult& r) {
    results.push_back(r);
    if (opt.out) *opt.out << repro::format_result(r) << "\n" << std::flush;
  };
  report(repro::check_exact_values());
  report(repro::check_triangle_oracles(desk.seed));
  report(repro::check_gradients(desk.seed));
  report(repro::check_mixup_invariants(desk.seed));
  const auto first = repro::run_pipeline(desk, progress);
  for (const auto& c : first.criteria) report(c);
  if (opt.determinism) {
    progress("second pipeline run for the determinism check");
    const auto second = repro::run_pipeline(desk, progress);
    report(repro::check_determinism(first, second));
  }

  std::string summary;
  int passed = 0;
  for (const auto& r : results) {
    summary += repro::format_result(r) + "\n";
    passed += r.passed ? 1 : 0;
  }
  summary += std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
  io::write_file(dir / "summary.txt", summary);
  io::write_file(dir / "records.jsonl", eval::serialize_records(first.records));

  const auto plot_dir = dir / "plots";
  plots::write_figure(auc_bars("BA-Motif-Counting: explainers", first.methods), plot_dir,
                      "methods");
  plots::write_figure(auc_bars("BA-Motif-Counting: ablation", first.ablation), plot_dir,
                      "ablation");
  {
    plots::Series s{"auc", first.sweep_alpha, {}, {}};
    for (const auto& r : first.sweep) s.y.push_back(r.mean);
    plots::Figure fig{"BA-Motif-Counting: AUC against alpha", "alpha", "AUC",
                      plots::Style::lines, true, {std::move(s)}, {}};
    plots::write_figure(fig, plot_dir, "sweep");
  }
  plots::write_figure(correlation_figure(first.volume_correlation, "BA-Motif-Volume: gaps"),
                      plot_dir, "correlation");
  if (opt.out) *opt.out << passed << "/" << results.size() << " criteria passed\n";
  return 0;
}

}  // namespace regx::cli
