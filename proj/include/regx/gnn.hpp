#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regx/autodiff.hpp"
#include "regx/graph.hpp"
#include "regx/kernels.hpp"

namespace regx {

enum class Readout { mean, sum };

std::string to_string(Readout r);
Readout readout_from_string(const std::string& s);

struct TrainConfig {
  double learning_rate = 3e-5;
  int epochs = 100;
  std::uint64_t seed = 0;
  int hidden_dim = 64;
  Readout readout = Readout::mean;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;

  void validate() const;
};

/// Three propagation layers (d->h, h->h, h->h), a readout, and a dense head
/// (h->h->1). Input features are scaled per column by input_scale (1 / RMS
/// over the training nodes). Two fixed affines sit around the head: the readout is
/// standardized per column, `(r - embed_shift) * embed_scale`, with statistics
/// taken over the train split at the start of every epoch; the head output is
/// mapped to label units by `output_shift + output_scale * y`, set from the
/// training labels. The standardized readout is the graph embedding.
class GcnModel {
 public:
  enum Param : int {
    kConv1W, kConv1B, kConv2W, kConv2B, kConv3W, kConv3B,
    kHead1W, kHead1B, kHead2W, kHead2B, kNumParams
  };

  GcnModel() = default;
  /// All-zero parameters.
  GcnModel(int feature_dim, int hidden_dim, Readout readout);
  /// Glorot-uniform weights, uniform biases in [-0.5, 0.5] for the hidden
  /// layers, zero output weight and bias.
  static GcnModel initialized(int feature_dim, int hidden_dim, Readout readout,
                              std::uint64_t seed);

  int feature_dim() const { return feature_dim_; }
  int hidden_dim() const { return hidden_dim_; }
  Readout readout() const { return readout_; }

  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }
  static const char* param_name(int i);

  double output_shift = 0.0;
  double output_scale = 1.0;
  RowVector input_scale;  // 1 x d
  RowVector embed_shift;  // 1 x h
  RowVector embed_scale;  // 1 x h

  friend bool operator==(const GcnModel&, const GcnModel&);

 private:
  int feature_dim_ = 0;
  int hidden_dim_ = 0;
  Readout readout_ = Readout::mean;
  std::vector<Matrix> params_;
};

struct Forward {
  double prediction = 0.0;
  RowVector embedding;
};

// Tape-level forward pass, for callers that need gradients.
struct GcnTape {
  std::array<ad::Var, 3> node_states;
  ad::Var readout;    // before standardization
  ad::Var embedding;
  ad::Var prediction;
};

/// Model parameters placed on the tape, as variables or as constants.
std::vector<ad::Var> bind_params(ad::Tape& tape, const GcnModel& model,
                                 bool trainable);

/// Throws NumericError naming the first layer with non-finite activations.
GcnTape gcn_forward(ad::Tape& tape, const GcnModel& model,
                    std::span<const ad::Var> params, int n,
                    const std::vector<Edge>& edges, ad::Var edge_weights,
                    ad::Var features);

/// Forward pass on g with an optional mask; no mask means the plain adjacency.
Forward gcn_forward(const GcnModel& model, const Graph& g,
                    const EdgeMask* mask = nullptr);

/// Forward pass with per-edge weights aligned with g.edges().
Forward gcn_forward_weights(const GcnModel& model, const Graph& g,
                            std::span<const double> edge_weights);

/// The three layer outputs side by side (n x 3h) on the unmasked graph.
Matrix node_embeddings(const GcnModel& model, const Graph& g);

/// Sets embed_shift / embed_scale to the column mean and 1 / sd of the raw
/// readout over ds.graphs[idx]; constant columns get scale 0.
void refresh_embedding_stats(GcnModel& model, const GraphDataset& ds,
                             std::span<const int> idx);

struct TrainedGnn {
  GcnModel model;
  std::vector<double> epoch_loss;  // mean squared error per epoch
};

/// One Adam update per training graph, visiting the train split in a
/// seeded shuffled order each epoch. Throws TrainingError on a non-finite
/// loss.
TrainedGnn train_gnn(const GraphDataset& ds, const TrainConfig& cfg);

/// Element-wise gcn_forward over graphs; masks may be empty (no masks) or one
/// per graph, with nullptr entries meaning unmasked.
std::vector<Forward> batch_embed(const GcnModel& model,
                                 std::span<const Graph* const> graphs,
                                 std::span<const EdgeMask* const> masks = {},
                                 kernels::Exec exec = kernels::Exec::parallel);

// Model checkpoint: a JSON record with every parameter matrix at 17
// significant digits, hidden_dim, readout, output affine and the training
// config used.
void write_checkpoint(const GcnModel& model, const TrainConfig& cfg,
                      const std::filesystem::path& path);
GcnModel read_checkpoint(const std::filesystem::path& path,
                         TrainConfig* cfg = nullptr);

}  // namespace regx
