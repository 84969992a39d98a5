#include "run_config.hpp"

#include <numeric>
#include <set>

#include "regx/errors.hpp"

namespace regx::cli {

namespace {

constexpr int kTrianglesFullScale = 5000;

void reject_unknown(const io::Json& j, const std::set<std::string>& known,
                    const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void take(const io::Json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const io::Json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

void take_range(const io::Json& j, const char* key, datasets::IntRange& dst,
                const std::string& where) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer()) {
    throw ValidationError(where + "." + key + ": expected [lo, hi]");
  }
  dst = {v[0].get<int>(), v[1].get<int>()};
}

void apply_gen(datasets::GenConfig& g, const io::Json& j) {
  const std::string w = "dataset.gen";
  reject_unknown(j, {"n_graphs", "seed", "base_size", "motif_size", "feature_dim",
                     "ba_edges_per_node", "pad_to", "motif_count_range", "base_size_range",
                     "er_nodes", "er_prob"},
                 w);
  take(j, "n_graphs", g.n_graphs, w);
  take(j, "seed", g.seed, w);
  take(j, "base_size", g.base_size, w);
  take(j, "motif_size", g.motif_size, w);
  take(j, "feature_dim", g.feature_dim, w);
  take(j, "ba_edges_per_node", g.ba_edges_per_node, w);
  take(j, "pad_to", g.pad_to, w);
  take_range(j, "motif_count_range", g.motif_count_range, w);
  take_range(j, "base_size_range", g.base_size_range, w);
  take(j, "er_nodes", g.er_nodes, w);
  take(j, "er_prob", g.er_prob, w);
}

void apply_gnn(TrainConfig& t, const io::Json& j) {
  const std::string w = "gnn";
  reject_unknown(j, {"learning_rate", "epochs", "seed", "hidden_dim", "readout", "adam_beta1",
                     "adam_beta2"},
                 w);
  take(j, "learning_rate", t.learning_rate, w);
  take(j, "epochs", t.epochs, w);
  take(j, "seed", t.seed, w);
  take(j, "hidden_dim", t.hidden_dim, w);
  if (j.contains("readout")) {
    std::string r;
    take(j, "readout", r, w);
    t.readout = readout_from_string(r);
  }
  take(j, "adam_beta1", t.adam_beta1, w);
  take(j, "adam_beta2", t.adam_beta2, w);
}

void apply_explainer(explain::ExplainerConfig& e, const io::Json& j) {
  const std::string w = "explainer";
  reject_unknown(j, {"kind", "epochs", "learning_rate", "alpha", "beta", "gamma", "sign_mode",
                     "eta_fraction", "conn_weight", "seed", "temperature_start",
                     "temperature_end", "ablation", "hidden_dim", "per_graph_updates"},
                 w);
  if (j.contains("kind")) {
    std::string k;
    take(j, "kind", k, w);
    const auto keep_epochs = e.epochs;
    const auto keep_seed = e.seed;
    const auto old_kind = e.kind;
    e = explain::default_config(explain::kind_from_string(k));
    // Scale presets carry over to the new kind unless it trains no network.
    if (old_kind != explain::Kind::gnnexplainer && e.kind != explain::Kind::gnnexplainer &&
        e.kind != explain::Kind::grad) {
      e.epochs = keep_epochs;
    }
    e.seed = keep_seed;
  }
  take(j, "epochs", e.epochs, w);
  take(j, "learning_rate", e.learning_rate, w);
  take(j, "alpha", e.loss_weights.alpha, w);
  take(j, "beta", e.loss_weights.beta, w);
  take(j, "gamma", e.loss_weights.gamma, w);
  if (j.contains("sign_mode")) {
    std::string s;
    take(j, "sign_mode", s, w);
    e.sign_mode = losses::sign_mode_from_string(s);
  }
  take(j, "eta_fraction", e.eta_fraction, w);
  take(j, "conn_weight", e.conn_weight, w);
  take(j, "seed", e.seed, w);
  take(j, "temperature_start", e.mask_activation.temperature_start, w);
  take(j, "temperature_end", e.mask_activation.temperature_end, w);
  if (j.contains("ablation")) {
    std::string a;
    take(j, "ablation", a, w);
    e.ablation = explain::ablation_from_string(a);
  }
  take(j, "hidden_dim", e.hidden_dim, w);
  take(j, "per_graph_updates", e.per_graph_updates, w);
}

}  // namespace

void RunConfig::validate() const {
  if (dataset.name.empty()) throw ValidationError("dataset.name is empty");
  if (dataset.path) {
    if (!std::filesystem::exists(*dataset.path)) {
      throw ValidationError("dataset.path does not exist: " + dataset.path->string());
    }
  } else {
    dataset.gen.validate();
  }
  gnn.validate();
  explainer.validate();
  if (eval.seeds.empty()) throw ValidationError("eval.seeds is empty");
  if (eval.sweep_parameter != "alpha" && eval.sweep_parameter != "beta") {
    throw ValidationError("eval.sweep_parameter must be alpha or beta");
  }
  if (eval.sweep_grid.empty()) throw ValidationError("eval.sweep_grid is empty");
  for (double v : eval.sweep_grid) {
    if (!(v >= 0.0)) throw ValidationError("eval.sweep_grid entries must be >= 0");
  }
  if (out.empty()) throw ValidationError("out is empty");
}

RunConfig default_run_config(const std::string& dataset, bool desk_scale) {
  RunConfig c;
  c.dataset.name = dataset;
  c.explainer = explain::default_config(explain::Kind::regexplainer);
  int n_seeds = 10;
  if (desk_scale) {
    c.dataset.gen.n_graphs = 500;
    c.gnn.epochs = 300;
    c.explainer.epochs = 100;
    n_seeds = 5;
    c.eval.sweep_grid = {0.01, 1.0, 100.0};
  } else {
    if (dataset == datasets::kTriangles) c.dataset.gen.n_graphs = kTrianglesFullScale;
    c.gnn.epochs = 1000;
    c.eval.sweep_grid = {0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
  }
  c.eval.seeds.resize(static_cast<std::size_t>(n_seeds));
  std::iota(c.eval.seeds.begin(), c.eval.seeds.end(), std::uint64_t{0});
  return c;
}

void apply_json(RunConfig& cfg, const io::Json& j) {
  reject_unknown(j, {"dataset", "gnn", "explainer", "eval", "out"}, "config");
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    reject_unknown(d, {"name", "path", "gen"}, "dataset");
    take(d, "name", cfg.dataset.name, "dataset");
    if (d.contains("path")) {
      std::string p;
      take(d, "path", p, "dataset");
      cfg.dataset.path = p;
    }
    if (d.contains("gen")) apply_gen(cfg.dataset.gen, d.at("gen"));
  }
  if (j.contains("gnn")) apply_gnn(cfg.gnn, j.at("gnn"));
  if (j.contains("explainer")) apply_explainer(cfg.explainer, j.at("explainer"));
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    reject_unknown(e, {"seeds", "sweep_parameter", "sweep_grid"}, "eval");
    take(e, "seeds", cfg.eval.seeds, "eval");
    take(e, "sweep_parameter", cfg.eval.sweep_parameter, "eval");
    take(e, "sweep_grid", cfg.eval.sweep_grid, "eval");
  }
  if (j.contains("out")) {
    std::string o;
    take(j, "out", o, "config");
    cfg.out = o;
  }
}

RunConfig load_run_config(const std::filesystem::path& path, bool desk_scale) {
  io::Json j;
  try {
    j = io::Json::parse(io::read_file(path));
  } catch (const io::Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::string name = datasets::kBaMotifCounting;
  if (j.is_object() && j.contains("dataset") && j["dataset"].is_object() &&
      j["dataset"].contains("name") && j["dataset"]["name"].is_string()) {
    name = j["dataset"]["name"].get<std::string>();
  }
  auto cfg = default_run_config(name, desk_scale);
  apply_json(cfg, j);
  // Relative dataset paths are resolved against the config file.
  if (cfg.dataset.path && cfg.dataset.path->is_relative()) {
    cfg.dataset.path = path.parent_path() / *cfg.dataset.path;
  }
  return cfg;
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.dataset.gen.seed = seed;
  cfg.gnn.seed = seed;
  cfg.explainer.seed = seed;
  for (std::size_t i = 0; i < cfg.eval.seeds.size(); ++i) cfg.eval.seeds[i] = seed + i;
}

io::Json to_json(const RunConfig& cfg) {
  const auto& g = cfg.dataset.gen;
  io::Json gen = {{"n_graphs", g.n_graphs},
                  {"seed", g.seed},
                  {"base_size", g.base_size},
                  {"motif_size", g.motif_size},
                  {"feature_dim", g.feature_dim},
                  {"ba_edges_per_node", g.ba_edges_per_node},
                  {"pad_to", g.pad_to},
                  {"motif_count_range", {g.motif_count_range.lo, g.motif_count_range.hi}},
                  {"base_size_range", {g.base_size_range.lo, g.base_size_range.hi}},
                  {"er_nodes", g.er_nodes},
                  {"er_prob", g.er_prob}};
  io::Json dataset = {{"name", cfg.dataset.name}, {"gen", gen}};
  if (cfg.dataset.path) dataset["path"] = cfg.dataset.path->string();

  const auto& t = cfg.gnn;
  io::Json gnn = {{"learning_rate", t.learning_rate}, {"epochs", t.epochs},
                  {"seed", t.seed},                   {"hidden_dim", t.hidden_dim},
                  {"readout", to_string(t.readout)},  {"adam_beta1", t.adam_beta1},
                  {"adam_beta2", t.adam_beta2}};

  const auto& e = cfg.explainer;
  io::Json ex = {{"kind", explain::to_string(e.kind)},
                 {"epochs", e.epochs},
                 {"learning_rate", e.learning_rate},
                 {"alpha", e.loss_weights.alpha},
                 {"beta", e.loss_weights.beta},
                 {"gamma", e.loss_weights.gamma},
                 {"sign_mode", losses::to_string(e.sign_mode)},
                 {"eta_fraction", e.eta_fraction},
                 {"conn_weight", e.conn_weight},
                 {"seed", e.seed},
                 {"temperature_start", e.mask_activation.temperature_start},
                 {"temperature_end", e.mask_activation.temperature_end},
                 {"ablation", explain::to_string(e.ablation)},
                 {"hidden_dim", e.hidden_dim},
                 {"per_graph_updates", e.per_graph_updates}};

  io::Json ev = {{"seeds", cfg.eval.seeds},
                 {"sweep_parameter", cfg.eval.sweep_parameter},
                 {"sweep_grid", cfg.eval.sweep_grid}};
  return {{"dataset", dataset}, {"gnn", gnn}, {"explainer", ex}, {"eval", ev},
          {"out", cfg.out.string()}};
}

}  // namespace regx::cli
