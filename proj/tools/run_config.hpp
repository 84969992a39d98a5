#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "regx/datasets.hpp"
#include "regx/explainers.hpp"
#include "regx/gnn.hpp"
#include "regx/text_io.hpp"

namespace regx::cli {

struct DatasetSpec {
  std::string name = datasets::kBaMotifCounting;
  std::optional<std::filesystem::path> path;  // load instead of generating
  datasets::GenConfig gen;
};

struct EvalOptions {
  std::vector<std::uint64_t> seeds;
  std::string sweep_parameter = "alpha";
  std::vector<double> sweep_grid;
};

struct RunConfig {
  DatasetSpec dataset;
  TrainConfig gnn;
  explain::ExplainerConfig explainer;
  EvalOptions eval;
  std::filesystem::path out = "runs";

  /// Throws ValidationError: bad ranges, missing dataset path, empty seeds.
  void validate() const;
};

/// Full-scale or desk-scale defaults for a dataset.
RunConfig default_run_config(const std::string& dataset, bool desk_scale);

/// Overlays a JSON document onto cfg. Unknown keys raise ValidationError.
/// An explainer "kind" resets the explainer block to that kind's defaults
/// before the remaining explainer keys apply.
void apply_json(RunConfig& cfg, const io::Json& j);

/// Defaults for the dataset named in the file (if any), then the file.
RunConfig load_run_config(const std::filesystem::path& path, bool desk_scale);

/// Seeds every stage from one value; the seed list becomes seed, seed+1, ...
void apply_seed(RunConfig& cfg, std::uint64_t seed);

io::Json to_json(const RunConfig& cfg);

}  // namespace regx::cli
