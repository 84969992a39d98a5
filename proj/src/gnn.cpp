#include "regx/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regx/adam.hpp"
#include "regx/errors.hpp"
#include "regx/random.hpp"
#include "regx/text_io.hpp"

namespace regx {

namespace {
constexpr double kBiasInit = 0.5;
}  // namespace

std::string to_string(Readout r) { return r == Readout::mean ? "mean" : "sum"; }

Readout readout_from_string(const std::string& s) {
  if (s == "mean") return Readout::mean;
  if (s == "sum") return Readout::sum;
  throw ValidationError("unknown readout '" + s + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be positive");
  }
  if (epochs < 1) throw ValidationError("epochs must be at least 1");
  if (hidden_dim < 1) throw ValidationError("hidden_dim must be positive");
}

GcnModel::GcnModel(int feature_dim, int hidden_dim, Readout readout)
    : input_scale(RowVector::Ones(feature_dim > 0 ? feature_dim : 0)),
      embed_shift(RowVector::Zero(hidden_dim > 0 ? hidden_dim : 0)),
      embed_scale(RowVector::Ones(hidden_dim > 0 ? hidden_dim : 0)),
      feature_dim_(feature_dim),
      hidden_dim_(hidden_dim),
      readout_(readout) {
  if (feature_dim <= 0 || hidden_dim <= 0) {
    throw ValidationError("GCN dimensions must be positive");
  }
  const int d = feature_dim, h = hidden_dim;
  params_ = {Matrix::Zero(d, h), Matrix::Zero(1, h), Matrix::Zero(h, h),
             Matrix::Zero(1, h), Matrix::Zero(h, h), Matrix::Zero(1, h),
             Matrix::Zero(h, h), Matrix::Zero(1, h), Matrix::Zero(h, 1),
             Matrix::Zero(1, 1)};
}

GcnModel GcnModel::initialized(int feature_dim, int hidden_dim, Readout readout,
                               std::uint64_t seed) {
  GcnModel m(feature_dim, hidden_dim, readout);
  Rng rng(derive_seed(seed, {0x6c63ULL}));
  // The output weight starts at zero so the first prediction is the label
  // mean; large early errors otherwise drive every ReLU inactive.
  for (int i : {kConv1W, kConv2W, kConv3W, kHead1W}) {
    auto& w = m.params_[static_cast<std::size_t>(i)];
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = limit * (2.0 * uniform01(rng) - 1.0);
      }
    }
  }
  // With constant node features and zero biases every hidden unit is a
  // multiple of one graph statistic.
  for (int i : {kConv1B, kConv2B, kConv3B, kHead1B}) {
    auto& b = m.params_[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < b.cols(); ++c) b(0, c) = kBiasInit * (2.0 * uniform01(rng) - 1.0);
  }
  return m;
}

const char* GcnModel::param_name(int i) {
  static const char* names[] = {"conv1.weight", "conv1.bias", "conv2.weight",
                                "conv2.bias",   "conv3.weight", "conv3.bias",
                                "head1.weight", "head1.bias", "head2.weight",
                                "head2.bias"};
  return names[i];
}

bool operator==(const GcnModel& a, const GcnModel& b) {
  if (a.feature_dim_ != b.feature_dim_ || a.hidden_dim_ != b.hidden_dim_ ||
      a.readout_ != b.readout_ || a.output_shift != b.output_shift ||
      a.output_scale != b.output_scale || a.input_scale != b.input_scale ||
      a.embed_shift != b.embed_shift ||
      a.embed_scale != b.embed_scale || a.params_.size() != b.params_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.params_.size(); ++i) {
    if (a.params_[i] != b.params_[i]) return false;
  }
  return true;
}

std::vector<ad::Var> bind_params(ad::Tape& tape, const GcnModel& model,
                                 bool trainable) {
  std::vector<ad::Var> out;
  out.reserve(model.params().size());
  for (const auto& p : model.params()) {
    out.push_back(trainable ? tape.variable(p) : tape.constant(p));
  }
  return out;
}

namespace {

// Columns flatter than this over the train split are treated as constant.
constexpr double kMinEmbedSd = 1e-6;

void check_finite(const ad::Var& v, const char* layer) {
  if (!v.value().allFinite()) {
    throw NumericError(std::string("non-finite activations in GCN ") + layer);
  }
}

}  // namespace

GcnTape gcn_forward(ad::Tape& tape, const GcnModel& model,
                    std::span<const ad::Var> p, int n,
                    const std::vector<Edge>& edges, ad::Var edge_weights,
                    ad::Var features) {
  if (features.cols() != model.feature_dim()) {
    throw ConformanceError("feature dimension " + std::to_string(features.cols()) +
                           " does not match model input " +
                           std::to_string(model.feature_dim()));
  }
  GcnTape out;
  ad::Var h = ad::matmul(features, tape.constant(Matrix(model.input_scale.asDiagonal())));
  static const char* layer_names[] = {"layer 1", "layer 2", "layer 3"};
  for (int l = 0; l < 3; ++l) {
    const auto w = p[static_cast<std::size_t>(2 * l)];
    const auto b = p[static_cast<std::size_t>(2 * l + 1)];
    h = ad::relu(ad::add_row(ad::propagate(n, edges, edge_weights, ad::matmul(h, w)), b));
    check_finite(h, layer_names[l]);
    out.node_states[static_cast<std::size_t>(l)] = h;
  }
  out.readout = model.readout() == Readout::mean ? ad::mean_rows(h) : ad::sum_rows(h);
  out.embedding = ad::mul(ad::add_row(out.readout, tape.constant(-model.embed_shift)),
                          tape.constant(model.embed_scale));
  const auto z = ad::relu(ad::add_row(
      ad::matmul(out.embedding, p[GcnModel::kHead1W]), p[GcnModel::kHead1B]));
  check_finite(z, "head");
  const auto y = ad::add(ad::matmul(z, p[GcnModel::kHead2W]), p[GcnModel::kHead2B]);
  out.prediction = ad::affine(y, model.output_scale, model.output_shift);
  check_finite(out.prediction, "output");
  return out;
}

Forward gcn_forward_weights(const GcnModel& model, const Graph& g,
                            std::span<const double> edge_weights) {
  if (edge_weights.size() != g.edges().size()) {
    throw ConformanceError("edge weight count does not match graph");
  }
  ad::Tape tape;
  const auto params = bind_params(tape, model, false);
  Matrix w(static_cast<Eigen::Index>(edge_weights.size()), 1);
  for (std::size_t k = 0; k < edge_weights.size(); ++k) {
    w(static_cast<Eigen::Index>(k), 0) = edge_weights[k];
  }
  const auto out = gcn_forward(tape, model, params, g.num_nodes(), g.edges(),
                               tape.constant(std::move(w)), tape.constant(g.features()));
  return {out.prediction.scalar(), out.embedding.value().row(0)};
}

Forward gcn_forward(const GcnModel& model, const Graph& g, const EdgeMask* mask) {
  if (mask) {
    const auto w = g.edge_weights(*mask);
    return gcn_forward_weights(model, g, w);
  }
  const std::vector<double> ones(g.edges().size(), 1.0);
  return gcn_forward_weights(model, g, ones);
}

Matrix node_embeddings(const GcnModel& model, const Graph& g) {
  ad::Tape tape;
  const auto params = bind_params(tape, model, false);
  const auto out = gcn_forward(
      tape, model, params, g.num_nodes(), g.edges(),
      tape.constant(Matrix::Ones(g.num_edges(), 1)), tape.constant(g.features()));
  const int h = model.hidden_dim();
  Matrix z(g.num_nodes(), 3 * h);
  for (int l = 0; l < 3; ++l) {
    z.middleCols(l * h, h) = out.node_states[static_cast<std::size_t>(l)].value();
  }
  return z;
}

void refresh_embedding_stats(GcnModel& model, const GraphDataset& ds,
                             std::span<const int> idx) {
  if (idx.empty()) throw ValidationError("embedding statistics need at least one graph");
  const int h = model.hidden_dim();
  Matrix r(static_cast<Eigen::Index>(idx.size()), h);
  kernels::parallel_for(static_cast<int>(idx.size()), [&](int k) {
    const Graph& g = ds.graphs.at(static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]));
    ad::Tape tape;
    const auto params = bind_params(tape, model, false);
    const auto out = gcn_forward(tape, model, params, g.num_nodes(), g.edges(),
                                 tape.constant(Matrix::Ones(g.num_edges(), 1)),
                                 tape.constant(g.features()));
    r.row(k) = out.readout.value();
  });
  const RowVector mean = r.colwise().mean();
  const RowVector sd = (r.rowwise() - mean).array().square().colwise().mean().sqrt().matrix();
  model.embed_shift = mean;
  // A constant column (typically a dead unit) is zeroed: a masked graph can
  // wake it up and a 1 / sd scale would then swamp every other column.
  for (int c = 0; c < h; ++c) model.embed_scale(c) = sd(c) > kMinEmbedSd ? 1.0 / sd(c) : 0.0;
}

TrainedGnn train_gnn(const GraphDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.splits.train.empty()) {
    throw ValidationError("GNN training needs a non-empty train split");
  }
  const auto& first = ds.graphs.at(static_cast<std::size_t>(ds.splits.train.front()));
  TrainedGnn result{GcnModel::initialized(first.feature_dim(), cfg.hidden_dim,
                                          cfg.readout, cfg.seed),
                    {}};
  auto& model = result.model;

  double mean = 0.0;
  for (int i : ds.splits.train) mean += ds.graphs[static_cast<std::size_t>(i)].label();
  mean /= static_cast<double>(ds.splits.train.size());
  double var = 0.0;
  for (int i : ds.splits.train) {
    const double d = ds.graphs[static_cast<std::size_t>(i)].label() - mean;
    var += d * d;
  }
  var /= static_cast<double>(ds.splits.train.size());
  model.output_shift = mean;
  model.output_scale = var > 0.0 ? std::sqrt(var) : 1.0;

  RowVector sq = RowVector::Zero(model.feature_dim());
  long long nodes = 0;
  for (int i : ds.splits.train) {
    const Matrix& x = ds.graphs[static_cast<std::size_t>(i)].features();
    sq += x.array().square().colwise().sum().matrix();
    nodes += x.rows();
  }
  for (int c = 0; c < model.feature_dim(); ++c) {
    const double rms = std::sqrt(sq(c) / static_cast<double>(std::max(nodes, 1LL)));
    model.input_scale(c) = rms > 0.0 ? 1.0 / rms : 1.0;
  }

  Adam adam(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2);
  std::vector<int> order = ds.splits.train;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    refresh_embedding_stats(model, ds, ds.splits.train);
    Rng rng(derive_seed(cfg.seed, {0x7261696eULL, static_cast<std::uint64_t>(epoch)}));
    shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (int gi : order) {
      const Graph& g = ds.graphs[static_cast<std::size_t>(gi)];
      ad::Tape tape;
      const auto params = bind_params(tape, model, true);
      const auto out = gcn_forward(tape, model, params, g.num_nodes(), g.edges(),
                                   tape.constant(Matrix::Ones(g.num_edges(), 1)),
                                   tape.constant(g.features()));
      const auto loss = ad::square(ad::affine(out.prediction, 1.0, -g.label()));
      const double lv = loss.scalar();
      if (!std::isfinite(lv)) {
        throw TrainingError("GNN training diverged at epoch " + std::to_string(epoch));
      }
      total += lv;
      tape.backward(loss);
      std::vector<Matrix> grads;
      grads.reserve(params.size());
      for (const auto& p : params) grads.push_back(p.grad());
      adam.step(model.params(), grads);
    }
    result.epoch_loss.push_back(total / static_cast<double>(order.size()));
  }
  return result;
}

std::vector<Forward> batch_embed(const GcnModel& model,
                                 std::span<const Graph* const> graphs,
                                 std::span<const EdgeMask* const> masks,
                                 kernels::Exec exec) {
  if (!masks.empty() && masks.size() != graphs.size()) {
    throw ConformanceError("batch_embed: one mask per graph required");
  }
  std::vector<Forward> out(graphs.size());
  kernels::for_each_index(exec, static_cast<int>(graphs.size()), [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = gcn_forward(model, *graphs[k], masks.empty() ? nullptr : masks[k]);
  });
  return out;
}

void write_checkpoint(const GcnModel& model, const TrainConfig& cfg,
                      const std::filesystem::path& path) {
  std::string out = "{\"kind\":\"gcn\",\"feature_dim\":" +
                    std::to_string(model.feature_dim()) +
                    ",\"hidden_dim\":" + std::to_string(model.hidden_dim()) +
                    ",\"readout\":" + io::quote(to_string(model.readout())) +
                    ",\"output_shift\":" + io::format_real(model.output_shift) +
                    ",\"output_scale\":" + io::format_real(model.output_scale) +
                    ",\"input_scale\":";
  io::append_reals(out, std::span<const double>(model.input_scale.data(),
                                                static_cast<std::size_t>(model.input_scale.size())));
  out += ",\"embed_shift\":";
  io::append_reals(out, std::span<const double>(model.embed_shift.data(),
                                                static_cast<std::size_t>(model.embed_shift.size())));
  out += ",\"embed_scale\":";
  io::append_reals(out, std::span<const double>(model.embed_scale.data(),
                                                static_cast<std::size_t>(model.embed_scale.size())));
  out += ",\"params\":[";
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    if (i) out += ',';
    out += "{\"name\":" + io::quote(GcnModel::param_name(static_cast<int>(i))) +
           ",\"value\":";
    io::append_matrix(out, model.params()[i]);
    out += '}';
  }
  out += "],\"train_config\":{\"learning_rate\":" + io::format_real(cfg.learning_rate) +
         ",\"epochs\":" + std::to_string(cfg.epochs) +
         ",\"seed\":" + std::to_string(cfg.seed) +
         ",\"hidden_dim\":" + std::to_string(cfg.hidden_dim) +
         ",\"readout\":" + io::quote(to_string(cfg.readout)) +
         ",\"optimizer\":\"adam\",\"adam_beta1\":" + io::format_real(cfg.adam_beta1) +
         ",\"adam_beta2\":" + io::format_real(cfg.adam_beta2) + "}}\n";
  io::write_file(path, out);
}

GcnModel read_checkpoint(const std::filesystem::path& path, TrainConfig* cfg) {
  try {
    const auto j = io::Json::parse(io::read_file(path));
    if (j.at("kind") != "gcn") throw ParseError("not a GCN checkpoint");
    GcnModel model(j.at("feature_dim").get<int>(), j.at("hidden_dim").get<int>(),
                   readout_from_string(j.at("readout").get<std::string>()));
    model.output_shift = j.at("output_shift").get<double>();
    model.output_scale = j.at("output_scale").get<double>();
    const auto in_scale = j.at("input_scale").get<std::vector<double>>();
    if (static_cast<int>(in_scale.size()) != model.feature_dim()) {
      throw ParseError(path.string() + ": input scale has wrong length");
    }
    for (int c = 0; c < model.feature_dim(); ++c) {
      model.input_scale(c) = in_scale[static_cast<std::size_t>(c)];
    }
    const auto shift = j.at("embed_shift").get<std::vector<double>>();
    const auto scale = j.at("embed_scale").get<std::vector<double>>();
    if (static_cast<int>(shift.size()) != model.hidden_dim() ||
        static_cast<int>(scale.size()) != model.hidden_dim()) {
      throw ParseError(path.string() + ": embedding statistics have wrong length");
    }
    for (int c = 0; c < model.hidden_dim(); ++c) {
      model.embed_shift(c) = shift[static_cast<std::size_t>(c)];
      model.embed_scale(c) = scale[static_cast<std::size_t>(c)];
    }
    const auto& ps = j.at("params");
    if (ps.size() != model.params().size()) {
      throw ParseError("checkpoint has " + std::to_string(ps.size()) + " parameters");
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Matrix m = io::matrix_from_json(ps[i].at("value"));
      if (m.rows() != model.params()[i].rows() || m.cols() != model.params()[i].cols()) {
        throw ParseError(std::string("parameter ") +
                         GcnModel::param_name(static_cast<int>(i)) + " has wrong shape");
      }
      model.params()[i] = std::move(m);
    }
    if (cfg) {
      const auto& t = j.at("train_config");
      cfg->learning_rate = t.at("learning_rate").get<double>();
      cfg->epochs = t.at("epochs").get<int>();
      cfg->seed = t.at("seed").get<std::uint64_t>();
      cfg->hidden_dim = t.at("hidden_dim").get<int>();
      cfg->readout = readout_from_string(t.at("readout").get<std::string>());
      cfg->adam_beta1 = t.at("adam_beta1").get<double>();
      cfg->adam_beta2 = t.at("adam_beta2").get<double>();
    }
    return model;
  } catch (const io::Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace regx
