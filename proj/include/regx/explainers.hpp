#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regx/autodiff.hpp"
#include "regx/gnn.hpp"
#include "regx/graph.hpp"
#include "regx/kernels.hpp"
#include "regx/losses.hpp"

namespace regx::explain {

enum class Kind { grad, gnnexplainer, pgexplainer, mixupexplainer, regexplainer };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

/// RegExplainer ablation switches.
struct Ablation {
  bool no_mix = false;  // use G* in place of the mixup graphs
  bool no_nce = false;  // drop the InfoNCE term
  bool no_mse = false;  // drop the prediction term
  friend bool operator==(const Ablation&, const Ablation&) = default;
};

/// "none", or a '+'-joined list such as "no_mix+no_nce".
std::string to_string(const Ablation& a);
Ablation ablation_from_string(const std::string& s);

/// Concrete-relaxation temperature, annealed linearly over training.
struct MaskActivation {
  double temperature_start = 5.0;
  double temperature_end = 1.0;

  double temperature(int epoch, int epochs) const;
};

struct ExplainerConfig {
  Kind kind = Kind::regexplainer;
  int epochs = 100;
  double learning_rate = 0.003;
  losses::LossWeights loss_weights;
  losses::SignMode sign_mode = losses::SignMode::as_printed;
  double eta_fraction = 0.03;
  double conn_weight = 1.0;
  std::uint64_t seed = 0;
  MaskActivation mask_activation;
  Ablation ablation;
  int hidden_dim = 64;            // edge-scoring network width
  bool per_graph_updates = false; // one optimizer step per graph, not per epoch

  void validate() const;
};

/// Defaults per explainer kind.
ExplainerConfig default_config(Kind kind);

// -- GRAD -------------------------------------------------------------------

/// Per-edge d MSE(f(G), Y) / d w_e at the all-ones mask, aligned with
/// g.edges(). d/dw_e equals d/dA_ij + d/dA_ji.
std::vector<double> mse_edge_gradient(const GcnModel& model, const Graph& g);

/// |gradient|, min-max normalized; a constant gradient gives the zero mask.
Explanation grad_explain(const GcnModel& model, const Graph& g);

// -- GNNExplainer -----------------------------------------------------------

/// Per-edge mask logits after cfg.epochs Adam steps on
/// MSE(f(G ⊙ σ(l)), Y) + size(σ(l)), starting from zero.
std::vector<double> gnnexplainer_logits(const GcnModel& model, const Graph& g,
                                        const ExplainerConfig& cfg);
Explanation gnnexplainer_explain(const GcnModel& model, const Graph& g,
                                 const ExplainerConfig& cfg);

// -- edge-scoring network ---------------------------------------------------

/// MLP scoring a directed edge (i, j) from the node embeddings z_i, z_j
/// (each the concatenated GCN layer outputs, column-scaled by input_scale):
///   logit = relu(z_i Ws + z_j Wd + b1) w2 + b2.
/// The undirected edge weight averages both directions.
class PgNetwork {
 public:
  enum Param : int { kSrcW, kDstW, kB1, kOutW, kOutB, kNumParams };

  PgNetwork() = default;
  /// All-zero parameters, unit input scale.
  PgNetwork(int input_dim, int hidden_dim);
  static PgNetwork initialized(int input_dim, int hidden_dim, std::uint64_t seed);

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }
  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }
  static const char* param_name(int i);

  RowVector input_scale;

  friend bool operator==(const PgNetwork&, const PgNetwork&);

 private:
  int input_dim_ = 0;
  int hidden_dim_ = 0;
  std::vector<Matrix> params_;
};

struct EdgeLogits {
  ad::Var forward;  // E x 1, direction (u, v)
  ad::Var reverse;  // E x 1, direction (v, u)
};

/// z: unscaled node embeddings (n x input_dim).
EdgeLogits edge_logits(ad::Tape& tape, std::span<const ad::Var> params,
                       const PgNetwork& net, const Matrix& z,
                       const std::vector<Edge>& edges);

/// Deterministic inference weights: (σ(l_fwd) + σ(l_rev)) / 2 per edge.
std::vector<double> pg_edge_weights(const PgNetwork& net, const GcnModel& model,
                                    const Graph& g);
Explanation pg_explain(const PgNetwork& net, const GcnModel& model, const Graph& g);

struct PgTrainResult {
  PgNetwork net;
  std::vector<double> epoch_loss;  // mean per-graph objective
};

/// Shared training loop for pgexplainer, mixupexplainer and regexplainer
/// over ds.splits.explainer_train. Per-graph losses run through `exec`;
/// gradients are summed in split order before each update.
PgTrainResult train_pg_family(const GcnModel& model, const GraphDataset& ds,
                              const ExplainerConfig& cfg,
                              kernels::Exec exec = kernels::Exec::parallel);

PgTrainResult pgexplainer_train(const GcnModel& model, const GraphDataset& ds,
                                ExplainerConfig cfg);
PgTrainResult mixupexplainer_train(const GcnModel& model, const GraphDataset& ds,
                                   ExplainerConfig cfg);
PgTrainResult regexplainer_train(const GcnModel& model, const GraphDataset& ds,
                                 ExplainerConfig cfg);

// -- batch driver -----------------------------------------------------------

struct ExplainRun {
  std::optional<PgTrainResult> trained;  // set for the PG family
  std::vector<Explanation> explanations; // one per graph in `targets`
};

/// Trains if the kind needs it, then explains every graph in `targets`
/// (dataset indices) in parallel.
ExplainRun run_explainer(const GcnModel& model, const GraphDataset& ds,
                         const ExplainerConfig& cfg, std::span<const int> targets,
                         kernels::Exec exec = kernels::Exec::parallel);

void write_pg_checkpoint(const PgNetwork& net, const ExplainerConfig& cfg,
                         const std::filesystem::path& path);
PgNetwork read_pg_checkpoint(const std::filesystem::path& path);

}  // namespace regx::explain
