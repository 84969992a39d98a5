#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "regx/explainers.hpp"
#include "regx/gnn.hpp"
#include "regx/graph.hpp"
#include "run_config.hpp"

// Subcommand drivers. Every stage writes into the run directory
//   <out>/<dataset>/                       config.json, dataset.jsonl, manifest.json
//   <out>/<dataset>/gnn/                   checkpoint.json, loss.dat, metrics.json
//   <out>/<dataset>/<explainer>/seed-<s>/  config.json, checkpoint.json, explanations.jsonl,
//                                          reports/, plots/
// and reuses what is already there unless `force` is set. A stage whose
// stamp (the config slice it depends on) differs from the current config is
// refused rather than silently reused.
namespace regx::cli {

struct CommandOptions {
  bool force = false;
  int dump_mixup = 0;  // explain: merged graphs to dump per seed
  bool determinism = true;  // repro: run the pipeline twice
  std::ostream* out = nullptr;  // results
  std::ostream* log = nullptr;  // progress
};

class Workspace {
 public:
  Workspace(RunConfig cfg, CommandOptions opt);

  const RunConfig& config() const { return cfg_; }
  std::filesystem::path dataset_dir() const;
  std::filesystem::path seed_dir(std::uint64_t seed) const;

  const GraphDataset& dataset();
  const GcnModel& model();
  /// Explanations of the explainer-test split for one explainer seed.
  std::vector<Explanation> explanations(std::uint64_t seed);

  void evaluate();
  void ablate();
  void sweep();

 private:
  explain::ExplainerConfig explainer_for(std::uint64_t seed) const;
  void say(const std::string& line) const;
  void note(const std::string& line) const;
  bool stage_ready(const std::filesystem::path& dir, const io::Json& stamp,
                   const std::vector<std::filesystem::path>& artifacts) const;
  void dump_mixup(const std::vector<Explanation>& expls, const explain::PgNetwork* net,
                  std::uint64_t seed);

  RunConfig cfg_;
  CommandOptions opt_;
  std::optional<GraphDataset> ds_;
  std::optional<GcnModel> model_;
};

// Each returns the process exit status.
int cmd_generate(const RunConfig& cfg, const CommandOptions& opt);
int cmd_train_gnn(const RunConfig& cfg, const CommandOptions& opt);
int cmd_explain(const RunConfig& cfg, const CommandOptions& opt);
int cmd_evaluate(const RunConfig& cfg, const CommandOptions& opt);
int cmd_ablate(const RunConfig& cfg, const CommandOptions& opt);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt);
/// Desk-scale acceptance run; writes <out>/repro/summary.txt and records.jsonl.
int cmd_repro(const RunConfig& cfg, const CommandOptions& opt);

}  // namespace regx::cli
