#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "regx/explainers.hpp"
#include "regx/gnn.hpp"
#include "regx/graph.hpp"

namespace regx::eval {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// -- metrics ----------------------------------------------------------------

/// ROC AUC of scores against binary labels; tied scores get averaged ranks.
/// Throws UndefinedAucError when labels are all one class.
double edge_auc(std::span<const double> scores, std::span<const double> labels);
/// Over the upper-triangular support of the explained graph; gt must be binary.
double edge_auc(const Explanation& pred, const Graph& g, const EdgeMask& gt);

/// Ground truth as per-edge {0,1} labels aligned with g.edges(). Binary masks
/// pass through; continuous masks are positive where the weight is >= the
/// graph's median edge weight.
std::vector<double> binary_ground_truth(const Graph& g);

/// AUC over the pooled edges of every explained graph that has ground truth.
double pooled_auc(const GraphDataset& ds, std::span<const Explanation> expls);

double rmse(std::span<const double> xs, std::span<const double> ys);

struct Pearson {
  double r = 0.0;
  double p = 1.0;  // two-sided, Student t with n - 2 degrees of freedom
};
Pearson pearson(std::span<const double> xs, std::span<const double> ys);

/// Cosine similarity; 1 when both vectors are zero, 0 when exactly one is.
double cosine(const RowVector& a, const RowVector& b);
/// Distance between the unit-normalized vectors (zero vectors stay zero).
double unit_euclidean(const RowVector& a, const RowVector& b);

double mean(std::span<const double> xs);
/// Sample standard deviation; 0 for fewer than two values.
double stddev(std::span<const double> xs);

// -- reports ----------------------------------------------------------------

struct EvalReport {
  double auc_mean = kUnset, auc_std = kUnset;
  double rmse_gy = kUnset, rmse_sy = kUnset, rmse_gs = kUnset;
  double cos_ge = kUnset, cos_gm = kUnset, euc_ge = kUnset, euc_gm = kUnset;
  double rmse_pe = kUnset, rmse_pm = kUnset;
  struct NamedPearson {
    std::string name;
    Pearson value;
  };
  std::vector<NamedPearson> pearson;
};

/// Fixed-size explanation datasets are scored with a top-k hard mask.
bool uses_hard_mask(const std::string& dataset_name);

/// Per-graph predictions behind the shift triplet, in explanation order.
struct ShiftData {
  std::vector<int> graph_ids;
  std::vector<double> y, f_g, f_star;
};

/// Explanations are matched to graphs by id. Throws CoverageError when an
/// explanation names a graph outside ds or when a graph at one of the
/// `required` dataset indices has no explanation.
ShiftData shift_data(const GcnModel& model, const GraphDataset& ds,
                     std::span<const Explanation> expls, bool hard_topk,
                     std::span<const int> required = {});
void fill_shift(EvalReport& r, const ShiftData& d);
EvalReport shift_report(const GcnModel& model, const GraphDataset& ds,
                        std::span<const Explanation> expls, bool hard_topk,
                        std::span<const int> required = {});

struct RepairOptions {
  double eta_fraction = 0.03;
  double conn_weight = 1.0;
  std::uint64_t seed = 0;
};

/// For every explained graph G, the positive partner G+ is drawn from the
/// other explained graphs (two sampled, the more similar kept) and
/// G(mix) = mixup(G*, G+ - G+*). Fills cos/euc/rmse repair fields.
EvalReport repair_report(const GcnModel& model, const GraphDataset& ds,
                         std::span<const Explanation> expls, const RepairOptions& opt);

struct CorrelationStudy {
  Pearson star_vs_y;   // |f(G*) - Y| vs Y
  Pearson shift_vs_y;  // |f(G) - f(G*)| vs Y
  std::vector<double> y, star_err, shift_err;
};
CorrelationStudy correlation_study(const ShiftData& d);

// -- protocol drivers -------------------------------------------------------

struct SeedRuns {
  std::string label;
  std::vector<double> auc;  // one per seed
  double mean = 0.0, std = 0.0;
};

/// Runs cfg once per seed and scores pooled AUC on `targets`.
SeedRuns auc_over_seeds(const GcnModel& model, const GraphDataset& ds,
                        explain::ExplainerConfig cfg, std::span<const std::uint64_t> seeds,
                        std::span<const int> targets, std::string label);

/// RegExplainer with {none, no_mix, no_nce, no_mse}.
std::vector<SeedRuns> ablation_suite(const GcnModel& model, const GraphDataset& ds,
                                     const explain::ExplainerConfig& cfg,
                                     std::span<const std::uint64_t> seeds,
                                     std::span<const int> targets);

/// Sweeps "alpha" or "beta" over grid with the other held at 1.
std::vector<SeedRuns> hyperparam_sweep(const GcnModel& model, const GraphDataset& ds,
                                       const explain::ExplainerConfig& cfg,
                                       const std::string& parameter,
                                       std::span<const double> grid,
                                       std::span<const std::uint64_t> seeds,
                                       std::span<const int> targets);

// -- output -----------------------------------------------------------------

struct Record {
  std::string metric;
  std::string dataset;
  std::string explainer;
  std::uint64_t seed = 0;
  double value = 0.0;
};

/// One JSON object per line, keys in fixed order, reals at 17 digits.
std::string serialize_records(std::span<const Record> records);

/// Appends every set field of r as a record.
void append_records(std::vector<Record>& out, const EvalReport& r, const std::string& dataset,
                    const std::string& explainer, std::uint64_t seed);

/// Plain-text table with right-aligned columns.
std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);
std::string fixed(double v, int digits = 4);

}  // namespace regx::eval
