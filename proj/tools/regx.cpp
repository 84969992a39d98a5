#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "regx/errors.hpp"
#include "regx/kernels.hpp"
#include "run_config.hpp"

namespace {

constexpr const char* kWorkersEnv = "REGX_WORKERS";

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset;
  std::string explainer;
  bool force = false;
  bool desk_scale = false;
  int dump_mixup = 0;
  bool once = false;
};

regx::cli::RunConfig resolve(const Flags& f) {
  using namespace regx::cli;
  RunConfig cfg = f.config.empty()
                      ? default_run_config(f.dataset.empty() ? regx::datasets::kBaMotifCounting
                                                             : f.dataset,
                                           f.desk_scale)
                      : load_run_config(f.config, f.desk_scale);
  if (!f.dataset.empty()) cfg.dataset.name = f.dataset;
  if (!f.explainer.empty()) apply_json(cfg, {{"explainer", {{"kind", f.explainer}}}});
  if (f.seed) apply_seed(cfg, *f.seed);
  if (!f.out.empty()) cfg.out = f.out;
  return cfg;
}

void apply_worker_env() {
  const char* v = std::getenv(kWorkersEnv);
  if (!v || !*v) return;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) {
    throw regx::ValidationError(std::string(kWorkersEnv) + " must be a non-negative integer");
  }
  regx::kernels::set_worker_count(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression GNN explainers: dataset generation, training, explanation and "
               "evaluation"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "seed for every stage; eval seeds become N, N+1, ...");
    sub->add_option("--out", flags.out, "output root (default: runs)");
    sub->add_flag("--force", flags.force, "recompute stages that already have artifacts");
    sub->add_flag("--desk-scale", flags.desk_scale, "scaled-down defaults");
    sub->add_option("--dataset", flags.dataset,
                    "ba_motif_volume | ba_motif_counting | triangles | crippen");
    sub->add_option("--explainer", flags.explainer,
                    "grad | gnnexplainer | pgexplainer | mixupexplainer | regexplainer");
  };

  auto* generate = app.add_subcommand("generate", "write the dataset and its manifest");
  auto* train = app.add_subcommand("train-gnn", "train the regression GCN");
  auto* explain = app.add_subcommand("explain", "run the explainer over the explainer-test split");
  auto* evaluate = app.add_subcommand("evaluate", "AUC, shift, repair and correlation reports");
  auto* ablate = app.add_subcommand("ablate", "RegExplainer ablation table");
  auto* sweep = app.add_subcommand("sweep", "loss-weight sweep table");
  auto* repro = app.add_subcommand("repro", "desk-scale acceptance run");
  for (auto* sub : {generate, train, explain, evaluate, ablate, sweep, repro}) common(sub);
  explain->add_option("--dump-mixup", flags.dump_mixup,
                      "also write the first N mixed graphs per seed in the dataset format");
  repro->add_flag("--once", flags.once, "skip the second run used for the determinism check");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_worker_env();
    auto cfg = resolve(flags);
    regx::cli::CommandOptions opt;
    opt.force = flags.force;
    opt.dump_mixup = flags.dump_mixup;
    opt.determinism = !flags.once;
    opt.out = &std::cout;
    opt.log = &std::cerr;

    if (generate->parsed()) return regx::cli::cmd_generate(cfg, opt);
    if (train->parsed()) return regx::cli::cmd_train_gnn(cfg, opt);
    if (explain->parsed()) return regx::cli::cmd_explain(cfg, opt);
    if (evaluate->parsed()) return regx::cli::cmd_evaluate(cfg, opt);
    if (ablate->parsed()) return regx::cli::cmd_ablate(cfg, opt);
    if (sweep->parsed()) return regx::cli::cmd_sweep(cfg, opt);
    if (repro->parsed()) return regx::cli::cmd_repro(cfg, opt);
  } catch (const regx::Error& e) {
    std::cerr << "regx: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "regx: unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
