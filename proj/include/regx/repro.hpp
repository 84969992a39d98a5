#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "regx/eval.hpp"

// Desk-scale reproduction: the checks behind `regx repro` and the acceptance
// binary. Every check is deterministic at a fixed seed.
namespace regx::repro {

struct DeskScale {
  int n_graphs = 500;
  int gnn_epochs = 300;
  int explainer_epochs = 100;
  int seeds = 5;
  std::uint64_t seed = 0;
  std::vector<double> alpha_grid{0.01, 1.0, 100.0};

  void validate() const;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

/// Per-dataset numbers from the shift/repair runs.
struct DatasetRun {
  std::string dataset;
  double gnn_test_rmse = 0.0;
  double label_std = 0.0;
  eval::EvalReport pg;   // shift fields from PGExplainer
  eval::EvalReport reg;  // repair fields from RegExplainer
};

struct PipelineReport {
  std::vector<CriterionResult> criteria;  // 5..10
  std::vector<eval::Record> records;
  std::vector<DatasetRun> runs;           // counting, triangles, volume
  std::vector<eval::SeedRuns> methods;    // regexplainer, pgexplainer, gnnexplainer
  std::vector<eval::SeedRuns> ablation;   // full, no_mix, no_nce, no_mse
  std::vector<eval::SeedRuns> sweep;      // one per alpha_grid entry
  std::vector<double> sweep_alpha;
  eval::CorrelationStudy volume_correlation;
};

using Progress = std::function<void(const std::string&)>;

CriterionResult check_exact_values();
CriterionResult check_triangle_oracles(std::uint64_t seed);
CriterionResult check_gradients(std::uint64_t seed);
CriterionResult check_mixup_invariants(std::uint64_t seed);

/// Generates the desk-scale datasets, trains the regressors and runs the
/// explainer studies; fills criteria 5 to 10.
PipelineReport run_pipeline(const DeskScale& cfg, const Progress& progress = {});

/// Criterion 11: two pipeline reports serialize to identical records.
CriterionResult check_determinism(const PipelineReport& a, const PipelineReport& b);

/// "[PASS] 5 title: detail"
std::string format_result(const CriterionResult& r);

}  // namespace regx::repro
