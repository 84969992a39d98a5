#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "plots.hpp"
#include "regx/errors.hpp"
#include "run_config.hpp"

using namespace regx;
using namespace regx::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig tiny(const fs::path& out) {
  auto cfg = default_run_config(datasets::kBaMotifCounting, true);
  apply_json(cfg, io::Json::parse(R"({"dataset": {"gen": {"n_graphs": 40}},
                                      "gnn": {"epochs": 3, "hidden_dim": 8},
                                      "explainer": {"epochs": 2, "hidden_dim": 8},
                                      "eval": {"seeds": [0]}})"));
  cfg.out = out;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("run config: defaults, overlays and validation") {
  const auto desk = default_run_config(datasets::kTriangles, true);
  const auto full = default_run_config(datasets::kTriangles, false);
  CHECK(desk.dataset.gen.n_graphs < full.dataset.gen.n_graphs);
  CHECK_NOTHROW(desk.validate());

  auto cfg = desk;
  apply_json(cfg, io::Json::parse(R"({"explainer": {"kind": "gnnexplainer"}})"));
  CHECK(cfg.explainer.kind == explain::Kind::gnnexplainer);
  CHECK(cfg.explainer.learning_rate == 0.01);
  apply_json(cfg, io::Json::parse(R"({"explainer": {"kind": "regexplainer", "alpha": 0.5,
                                                    "ablation": "no_mix"}})"));
  CHECK(cfg.explainer.loss_weights.alpha == 0.5);
  CHECK(cfg.explainer.ablation.no_mix);

  CHECK_THROWS_AS(apply_json(cfg, io::Json::parse(R"({"gnn": {"lr": 1}})")), ValidationError);
  CHECK_THROWS_AS(apply_json(cfg, io::Json::parse(R"({"extra": 1})")), ValidationError);

  apply_seed(cfg, 40);
  CHECK(cfg.gnn.seed == 40);
  CHECK(cfg.explainer.seed == 40);
  CHECK(cfg.eval.seeds.front() == 40);
  CHECK(cfg.eval.seeds[1] == 41);

  cfg.eval.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("run config: JSON round trip and relative dataset paths") {
  const auto dir = fresh_dir("regx_test_cfg");
  auto cfg = default_run_config(datasets::kBaMotifVolume, true);
  cfg.explainer.loss_weights.beta = 2.5;
  {
    std::ofstream f(dir / "a.json");
    f << to_json(cfg).dump();
  }
  const auto back = load_run_config(dir / "a.json", true);
  CHECK(to_json(back) == to_json(cfg));
  {
    std::ofstream f(dir / "b.json");
    f << R"({"dataset": {"name": "crippen", "path": "data/crippen.jsonl"}})";
  }
  const auto rel = load_run_config(dir / "b.json", true);
  REQUIRE(rel.dataset.path.has_value());
  CHECK(*rel.dataset.path == dir / "data/crippen.jsonl");
  fs::remove_all(dir);
}

TEST_CASE("plots write tab-separated series and an SVG") {
  const auto dir = fresh_dir("regx_test_plots");
  plots::Figure fig;
  fig.title = "t";
  fig.x_label = "x";
  fig.y_label = "y";
  fig.style = plots::Style::lines;
  fig.series.push_back({"a", {1, 2}, {3, 4}, {}});
  fig.series.push_back({"b", {1, 2}, {0.5, 0.25}, {0.1, 0.2}});
  const auto written = plots::write_figure(fig, dir, "fig");
  CHECK(written.size() == 3);
  CHECK(slurp(dir / "fig_a.dat").starts_with("# x\ty"));
  CHECK(slurp(dir / "fig_a.dat").find("2\t4") != std::string::npos);
  CHECK(slurp(dir / "fig.svg").find("<svg") != std::string::npos);
  CHECK(slurp(dir / "fig.svg").find("</svg>") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("workspace stages are reused and stale stamps are refused") {
  const auto dir = fresh_dir("regx_test_ws");
  std::ostringstream out, log;
  CommandOptions opt;
  opt.out = &out;
  opt.log = &log;
  const auto cfg = tiny(dir);
  CHECK(cmd_explain(cfg, opt) == 0);
  const auto ckpt = dir / datasets::kBaMotifCounting / "gnn" / "checkpoint.json";
  REQUIRE(fs::exists(ckpt));
  const auto first = slurp(ckpt);
  const auto stamp_time = fs::last_write_time(ckpt);
  CHECK(cmd_evaluate(cfg, opt) == 0);
  CHECK(fs::last_write_time(ckpt) == stamp_time);
  CHECK(slurp(ckpt) == first);

  auto changed = cfg;
  changed.gnn.epochs = 4;
  CHECK_THROWS_AS(cmd_train_gnn(changed, opt), ValidationError);
  opt.force = true;
  CHECK(cmd_train_gnn(changed, opt) == 0);
  CHECK(slurp(ckpt) != first);
  fs::remove_all(dir);
}
