#include "regx/explainers.hpp"

#include <algorithm>
#include <cmath>

#include "regx/adam.hpp"
#include "regx/errors.hpp"
#include "regx/mixup.hpp"
#include "regx/random.hpp"
#include "regx/text_io.hpp"

namespace regx::explain {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::grad: return "grad";
    case Kind::gnnexplainer: return "gnnexplainer";
    case Kind::pgexplainer: return "pgexplainer";
    case Kind::mixupexplainer: return "mixupexplainer";
    case Kind::regexplainer: return "regexplainer";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& s) {
  for (Kind k : {Kind::grad, Kind::gnnexplainer, Kind::pgexplainer, Kind::mixupexplainer,
                 Kind::regexplainer}) {
    if (s == to_string(k)) return k;
  }
  throw ValidationError("unknown explainer '" + s + "'");
}

std::string to_string(const Ablation& a) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(a.no_mix, "no_mix");
  add(a.no_nce, "no_nce");
  add(a.no_mse, "no_mse");
  return out.empty() ? "none" : out;
}

Ablation ablation_from_string(const std::string& s) {
  Ablation a;
  if (s == "none" || s.empty()) return a;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find('+', start), s.size());
    const auto part = s.substr(start, end - start);
    if (part == "no_mix") {
      a.no_mix = true;
    } else if (part == "no_nce") {
      a.no_nce = true;
    } else if (part == "no_mse") {
      a.no_mse = true;
    } else {
      throw ValidationError("unknown ablation '" + part + "'");
    }
    start = end + 1;
  }
  return a;
}

double MaskActivation::temperature(int epoch, int epochs) const {
  if (epochs <= 1) return temperature_start;
  const double frac = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return temperature_start + (temperature_end - temperature_start) * frac;
}

void ExplainerConfig::validate() const {
  const bool trains_network = kind == Kind::pgexplainer || kind == Kind::mixupexplainer ||
                              kind == Kind::regexplainer;
  if (epochs < (trains_network ? 1 : 0)) {
    throw ValidationError("explainer epochs must be at least " +
                          std::string(trains_network ? "1" : "0"));
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("explainer learning_rate must be positive");
  }
  if (!(eta_fraction >= 0.0) || !std::isfinite(eta_fraction)) {
    throw ValidationError("eta_fraction must be >= 0");
  }
  if (!(conn_weight >= 0.0 && conn_weight <= 1.0)) {
    throw ValidationError("conn_weight must lie in [0, 1]");
  }
  if (!(mask_activation.temperature_start > 0.0) || !(mask_activation.temperature_end > 0.0)) {
    throw ValidationError("temperatures must be positive");
  }
  if (hidden_dim < 1) throw ValidationError("explainer hidden_dim must be positive");
  loss_weights.validate();
}

ExplainerConfig default_config(Kind kind) {
  ExplainerConfig c;
  c.kind = kind;
  switch (kind) {
    case Kind::grad:
      c.epochs = 0;
      break;
    case Kind::gnnexplainer:
      c.epochs = 100;
      c.learning_rate = 0.01;
      break;
    case Kind::pgexplainer:
    case Kind::mixupexplainer:
    case Kind::regexplainer:
      c.epochs = 100;
      c.learning_rate = 0.003;
      break;
  }
  return c;
}

namespace {

std::vector<double> to_vector(const Matrix& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

GcnTape forward_on(ad::Tape& tape, const GcnModel& model, std::span<const ad::Var> gp,
                   const Graph& g, ad::Var weights) {
  return gcn_forward(tape, model, gp, g.num_nodes(), g.edges(), weights,
                     tape.constant(g.features()));
}

Matrix scaled(const Matrix& z, const RowVector& scale) {
  return (z.array().rowwise() * scale.array()).matrix();
}

}  // namespace

// -- GRAD -------------------------------------------------------------------

std::vector<double> mse_edge_gradient(const GcnModel& model, const Graph& g) {
  ad::Tape tape;
  const auto gp = bind_params(tape, model, false);
  const auto w = tape.variable(Matrix::Ones(g.num_edges(), 1));
  const auto out = forward_on(tape, model, gp, g, w);
  const auto loss = ad::square(ad::affine(out.prediction, 1.0, -g.label()));
  tape.backward(loss);
  const Matrix grad = w.grad();
  if (!grad.allFinite()) {
    throw NumericError("non-finite edge gradient for graph " + std::to_string(g.id()));
  }
  return to_vector(grad);
}

Explanation grad_explain(const GcnModel& model, const Graph& g) {
  auto s = mse_edge_gradient(model, g);
  for (double& v : s) v = std::abs(v);
  if (!s.empty()) {
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    const double min = *lo, range = *hi - *lo;
    for (double& v : s) v = range > 0.0 ? (v - min) / range : 0.0;
  }
  return Explanation(g, g.mask_from_edge_weights(s));
}

// -- GNNExplainer -----------------------------------------------------------

std::vector<double> gnnexplainer_logits(const GcnModel& model, const Graph& g,
                                        const ExplainerConfig& cfg) {
  cfg.validate();
  std::vector<Matrix> logits{Matrix::Zero(g.num_edges(), 1)};
  Adam adam(cfg.learning_rate);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    ad::Tape tape;
    const auto gp = bind_params(tape, model, false);
    const auto l = tape.variable(logits[0]);
    const auto w = ad::sigmoid(l);
    const auto out = forward_on(tape, model, gp, g, w);
    const auto pred = losses::mse(out.prediction, tape.scalar_constant(g.label()));
    const auto size = losses::size(w, out.embedding, cfg.loss_weights.gamma);
    const auto loss = ad::add(ad::scale(pred, cfg.loss_weights.beta), size);
    if (!std::isfinite(loss.scalar())) {
      throw TrainingError("GNNExplainer diverged on graph " + std::to_string(g.id()) +
                          " at epoch " + std::to_string(epoch));
    }
    tape.backward(loss);
    adam.step(logits, {l.grad()});
  }
  return to_vector(logits[0]);
}

Explanation gnnexplainer_explain(const GcnModel& model, const Graph& g,
                                 const ExplainerConfig& cfg) {
  auto w = gnnexplainer_logits(model, g, cfg);
  for (double& v : w) v = 1.0 / (1.0 + std::exp(-v));
  return Explanation(g, g.mask_from_edge_weights(w));
}

// -- edge-scoring network ---------------------------------------------------

PgNetwork::PgNetwork(int input_dim, int hidden_dim)
    : input_scale(RowVector::Ones(input_dim)), input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (input_dim <= 0 || hidden_dim <= 0) {
    throw ValidationError("edge network dimensions must be positive");
  }
  params_ = {Matrix::Zero(input_dim, hidden_dim), Matrix::Zero(input_dim, hidden_dim),
             Matrix::Zero(1, hidden_dim), Matrix::Zero(hidden_dim, 1), Matrix::Zero(1, 1)};
}

PgNetwork PgNetwork::initialized(int input_dim, int hidden_dim, std::uint64_t seed) {
  PgNetwork net(input_dim, hidden_dim);
  Rng rng(derive_seed(seed, {0x7067ULL}));
  for (int i : {kSrcW, kDstW, kOutW}) {
    auto& w = net.params_[static_cast<std::size_t>(i)];
    // fan-in of the first layer is the concatenated pair
    const double fan_in = i == kOutW ? static_cast<double>(w.rows())
                                     : 2.0 * static_cast<double>(w.rows());
    const double limit = std::sqrt(6.0 / (fan_in + static_cast<double>(w.cols())));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = limit * (2.0 * uniform01(rng) - 1.0);
      }
    }
  }
  return net;
}

const char* PgNetwork::param_name(int i) {
  static const char* names[] = {"edge.src_weight", "edge.dst_weight", "edge.bias",
                                "out.weight", "out.bias"};
  return names[i];
}

bool operator==(const PgNetwork& a, const PgNetwork& b) {
  if (a.input_dim_ != b.input_dim_ || a.hidden_dim_ != b.hidden_dim_ ||
      a.input_scale != b.input_scale || a.params_.size() != b.params_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.params_.size(); ++i) {
    if (a.params_[i] != b.params_[i]) return false;
  }
  return true;
}

EdgeLogits edge_logits(ad::Tape& tape, std::span<const ad::Var> p, const PgNetwork& net,
                       const Matrix& z, const std::vector<Edge>& edges) {
  if (z.cols() != net.input_dim()) {
    throw ConformanceError("edge network expects " + std::to_string(net.input_dim()) +
                           " input columns, got " + std::to_string(z.cols()));
  }
  const auto zs = tape.constant(scaled(z, net.input_scale));
  const auto src = ad::matmul(zs, p[PgNetwork::kSrcW]);
  const auto dst = ad::matmul(zs, p[PgNetwork::kDstW]);
  std::vector<int> us, vs;
  us.reserve(edges.size());
  vs.reserve(edges.size());
  for (const auto& e : edges) {
    us.push_back(e.u);
    vs.push_back(e.v);
  }
  auto head = [&](ad::Var pre) {
    const auto hidden = ad::relu(ad::add_row(pre, p[PgNetwork::kB1]));
    return ad::add_row(ad::matmul(hidden, p[PgNetwork::kOutW]), p[PgNetwork::kOutB]);
  };
  return {head(ad::add(ad::gather_rows(src, us), ad::gather_rows(dst, vs))),
          head(ad::add(ad::gather_rows(src, vs), ad::gather_rows(dst, us)))};
}

std::vector<double> pg_edge_weights(const PgNetwork& net, const GcnModel& model,
                                    const Graph& g) {
  ad::Tape tape;
  std::vector<ad::Var> p;
  for (const auto& m : net.params()) p.push_back(tape.constant(m));
  const auto l = edge_logits(tape, p, net, node_embeddings(model, g), g.edges());
  const auto w = ad::affine(ad::add(ad::sigmoid(l.forward), ad::sigmoid(l.reverse)), 0.5, 0.0);
  if (!w.value().allFinite()) {
    throw NumericError("non-finite edge logits for graph " + std::to_string(g.id()));
  }
  return to_vector(w.value());
}

Explanation pg_explain(const PgNetwork& net, const GcnModel& model, const Graph& g) {
  return Explanation(g, g.mask_from_edge_weights(pg_edge_weights(net, model, g)));
}

// -- PG-family training -----------------------------------------------------

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
constexpr std::uint64_t kNeighborStream = 0x6e656967ULL;
constexpr std::uint64_t kMixStream = 0x6d6978ULL;

enum Role : std::uint64_t { kTarget = 0, kPositive = 1, kNegative = 2, kPartner = 3 };

struct Cached {
  Matrix z;           // node embeddings on the unmasked graph
  RowVector h;        // graph embedding on the unmasked graph
  double prediction;  // f(G)
};

struct GraphObjective {
  double loss = 0.0;
  std::vector<Matrix> grads;
};

class PgTrainer {
 public:
  PgTrainer(const GcnModel& model, const GraphDataset& ds, const ExplainerConfig& cfg)
      : model_(model), ds_(ds), cfg_(cfg), pool_(ds.splits.explainer_train) {
    if (pool_.empty()) throw ValidationError("explainer-train split is empty");
    if (cfg.kind == Kind::regexplainer && !cfg.ablation.no_mix && needs_neighbors() &&
        pool_.size() < 3) {
      throw SamplingError("explainer-train split has fewer than three graphs");
    }
    if (cfg.kind == Kind::mixupexplainer && pool_.size() < 2) {
      throw SamplingError("mixup training needs at least two explainer-train graphs");
    }
    cache_.resize(ds.graphs.size());
    kernels::parallel_for(static_cast<int>(pool_.size()), [&](int k) {
      const auto gi = static_cast<std::size_t>(pool_[static_cast<std::size_t>(k)]);
      const Graph& g = ds.graphs[gi];
      const auto f = gcn_forward(model, g);
      cache_[gi] = Cached{node_embeddings(model, g), f.embedding, f.prediction};
    });
  }

  bool needs_neighbors() const {
    return cfg_.kind == Kind::regexplainer &&
           (!cfg_.ablation.no_nce || !cfg_.ablation.no_mse) && !cfg_.ablation.no_mix;
  }

  /// Column RMS of node embeddings over the pool; zero columns keep scale 1.
  RowVector input_scale() const {
    const auto cols = cache_[static_cast<std::size_t>(pool_.front())].z.cols();
    RowVector sq = RowVector::Zero(cols);
    double rows = 0.0;
    for (int gi : pool_) {
      const auto& z = cache_[static_cast<std::size_t>(gi)].z;
      sq += z.cwiseAbs2().colwise().sum();
      rows += static_cast<double>(z.rows());
    }
    RowVector scale(cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double rms = std::sqrt(sq(c) / std::max(rows, 1.0));
      scale(c) = rms > 0.0 ? 1.0 / rms : 1.0;
    }
    return scale;
  }

  const std::vector<int>& pool() const { return pool_; }

  GraphObjective evaluate(const PgNetwork& net, int gi, int epoch) const {
    ad::Tape tape;
    std::vector<ad::Var> p;
    for (const auto& m : net.params()) p.push_back(tape.variable(m));
    const auto gp = bind_params(tape, model_, false);
    const double temp = cfg_.mask_activation.temperature(epoch, cfg_.epochs);
    const Graph& g = graph(gi);
    const Cached& c = cache_[static_cast<std::size_t>(gi)];
    const auto& lw = cfg_.loss_weights;

    const auto w = sampled_weights(tape, p, net, gi, epoch, kTarget, temp);
    const auto star = forward_on(tape, model_, gp, g, w);
    ad::Var loss = losses::size(w, star.embedding, lw.gamma);

    switch (cfg_.kind) {
      case Kind::pgexplainer:
        if (lw.beta > 0.0) {
          loss = ad::add(loss, ad::scale(losses::mse(star.prediction,
                                                     tape.scalar_constant(g.label())),
                                         lw.beta));
        }
        break;
      case Kind::mixupexplainer: {
        if (lw.beta > 0.0) {
          Rng rng(derive_seed(cfg_.seed, {kNeighborStream, u64(epoch), u64(g.id())}));
          const auto partners = mixup::sample_two(pool_, gi, rng);
          const auto mix = mixed(tape, p, gp, net, gi, w, partners.first, epoch, kPartner, temp);
          loss = ad::add(loss, ad::scale(losses::mse(mix.prediction,
                                                     tape.scalar_constant(g.label())),
                                         lw.beta));
        }
        break;
      }
      case Kind::regexplainer:
        loss = add_regexplainer_terms(tape, p, gp, net, gi, epoch, temp, w, star, loss, c);
        break;
      default:
        throw ValidationError("kind " + to_string(cfg_.kind) + " has no edge network");
    }

    GraphObjective out;
    out.loss = loss.scalar();
    if (!std::isfinite(out.loss)) {
      throw TrainingError(to_string(cfg_.kind) + " diverged on graph " +
                          std::to_string(g.id()) + " at epoch " + std::to_string(epoch));
    }
    tape.backward(loss);
    for (const auto& v : p) out.grads.push_back(v.grad());
    return out;
  }

 private:
  static std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

  const Graph& graph(int gi) const { return ds_.graphs[static_cast<std::size_t>(gi)]; }

  ad::Var sampled_weights(ad::Tape& tape, std::span<const ad::Var> p, const PgNetwork& net,
                          int gi, int epoch, Role role, double temp) const {
    const Graph& g = graph(gi);
    const auto l = edge_logits(tape, p, net, cache_[static_cast<std::size_t>(gi)].z, g.edges());
    Rng rng(derive_seed(cfg_.seed, {kNoiseStream, u64(epoch), u64(g.id()), role}));
    auto noise = [&] {
      Matrix eps(g.num_edges(), 1);
      for (Eigen::Index k = 0; k < eps.rows(); ++k) {
        const double u = std::clamp(uniform01(rng), 1e-10, 1.0 - 1e-10);
        eps(k, 0) = std::log(u) - std::log1p(-u);
      }
      return eps;
    };
    const Matrix ef = noise();
    const Matrix er = noise();
    const auto sf = ad::sigmoid(ad::scale(ad::add_const(l.forward, ef), 1.0 / temp));
    const auto sr = ad::sigmoid(ad::scale(ad::add_const(l.reverse, er), 1.0 / temp));
    return ad::affine(ad::add(sf, sr), 0.5, 0.0);
  }

  // G* mixed with the remainder of the partner's current explanation.
  GcnTape mixed(ad::Tape& tape, std::span<const ad::Var> p, std::span<const ad::Var> gp,
                const PgNetwork& net, int gi, ad::Var w, int partner, int epoch, Role role,
                double temp) const {
    const Graph& g = graph(gi);
    const Graph& gb = graph(partner);
    // The partner's mask only supplies context; its gradient would push the
    // shared network toward the partner's complement.
    const auto wb = tape.constant(sampled_weights(tape, p, net, partner, epoch, role, temp).value());
    const auto plan = mixup::plan_mixup(
        g, gb, cfg_.eta_fraction, derive_seed(cfg_.seed, {kMixStream, u64(epoch), u64(g.id()), role}));
    const auto mw = mixup::merged_weights(plan, w, wb, cfg_.conn_weight);
    const int n = plan.target_nodes + plan.partner_nodes;
    return gcn_forward(tape, model_, gp, n, plan.edges, mw,
                       tape.constant(mixup::merged_features(g, gb)));
  }

  ad::Var add_regexplainer_terms(ad::Tape& tape, std::span<const ad::Var> p,
                                 std::span<const ad::Var> gp, const PgNetwork& net, int gi,
                                 int epoch, double temp, ad::Var w, const GcnTape& star,
                                 ad::Var loss, const Cached& c) const {
    const auto& lw = cfg_.loss_weights;
    const auto& ab = cfg_.ablation;
    const bool use_nce = !ab.no_nce && lw.alpha > 0.0;
    const bool use_mse = !ab.no_mse && lw.beta > 0.0;
    if (!use_nce && !use_mse) return loss;

    const Graph& g = graph(gi);
    ad::Var h_mix_pos = star.embedding, h_mix_neg = star.embedding;
    ad::Var pred_mix = star.prediction;
    int pos = -1, neg = -1;
    if (use_nce || !ab.no_mix) {
      Rng rng(derive_seed(cfg_.seed, {kNeighborStream, u64(epoch), u64(g.id())}));
      const auto [b, d] = mixup::sample_two(pool_, gi, rng);
      const auto& cb = cache_[static_cast<std::size_t>(b)];
      const auto& cd = cache_[static_cast<std::size_t>(d)];
      const auto order = mixup::order_by_similarity(c.h, b, graph(b).id(), cb.h, d,
                                                    graph(d).id(), cd.h);
      pos = order.positive;
      neg = order.negative;
    }
    if (!ab.no_mix) {
      const auto mix_pos = mixed(tape, p, gp, net, gi, w, pos, epoch, kPositive, temp);
      h_mix_pos = mix_pos.embedding;
      pred_mix = mix_pos.prediction;
      if (use_nce) {
        h_mix_neg = mixed(tape, p, gp, net, gi, w, neg, epoch, kNegative, temp).embedding;
      }
    }
    const double sign =
        cfg_.sign_mode == losses::SignMode::as_derived ? lw.alpha : -lw.alpha;
    if (use_nce) {
      const auto h = tape.constant(c.h);
      const auto hp = tape.constant(cache_[static_cast<std::size_t>(pos)].h);
      const auto hn = tape.constant(cache_[static_cast<std::size_t>(neg)].h);
      loss = ad::add(loss, ad::scale(losses::info_nce(h_mix_pos, h_mix_neg, h, hp, hn), sign));
    }
    if (use_mse) {
      loss = ad::add(loss, ad::scale(losses::mse(tape.scalar_constant(c.prediction), pred_mix),
                                     lw.beta));
    }
    return loss;
  }

  const GcnModel& model_;
  const GraphDataset& ds_;
  const ExplainerConfig& cfg_;
  std::vector<int> pool_;
  std::vector<Cached> cache_;
};

}  // namespace

PgTrainResult train_pg_family(const GcnModel& model, const GraphDataset& ds,
                              const ExplainerConfig& cfg, kernels::Exec exec) {
  cfg.validate();
  PgTrainer trainer(model, ds, cfg);
  PgTrainResult result;
  result.net = PgNetwork::initialized(3 * model.hidden_dim(), cfg.hidden_dim, cfg.seed);
  result.net.input_scale = trainer.input_scale();
  Adam adam(cfg.learning_rate);
  const auto& pool = trainer.pool();
  const int n = static_cast<int>(pool.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double total = 0.0;
    if (cfg.per_graph_updates) {
      for (int k = 0; k < n; ++k) {
        auto obj = trainer.evaluate(result.net, pool[static_cast<std::size_t>(k)], epoch);
        total += obj.loss;
        adam.step(result.net.params(), obj.grads);
      }
    } else {
      std::vector<GraphObjective> per_graph(static_cast<std::size_t>(n));
      kernels::for_each_index(exec, n, [&](int k) {
        per_graph[static_cast<std::size_t>(k)] =
            trainer.evaluate(result.net, pool[static_cast<std::size_t>(k)], epoch);
      });
      std::vector<std::vector<Matrix>> grads;
      grads.reserve(per_graph.size());
      for (auto& o : per_graph) {
        total += o.loss;
        grads.push_back(std::move(o.grads));
      }
      adam.step(result.net.params(), kernels::ordered_sum(grads));
    }
    result.epoch_loss.push_back(total / static_cast<double>(n));
  }
  return result;
}

namespace {

PgTrainResult train_as(Kind kind, const GcnModel& model, const GraphDataset& ds,
                       ExplainerConfig cfg) {
  cfg.kind = kind;
  return train_pg_family(model, ds, cfg);
}

}  // namespace

PgTrainResult pgexplainer_train(const GcnModel& model, const GraphDataset& ds,
                                ExplainerConfig cfg) {
  return train_as(Kind::pgexplainer, model, ds, std::move(cfg));
}

PgTrainResult mixupexplainer_train(const GcnModel& model, const GraphDataset& ds,
                                   ExplainerConfig cfg) {
  return train_as(Kind::mixupexplainer, model, ds, std::move(cfg));
}

PgTrainResult regexplainer_train(const GcnModel& model, const GraphDataset& ds,
                                 ExplainerConfig cfg) {
  return train_as(Kind::regexplainer, model, ds, std::move(cfg));
}

ExplainRun run_explainer(const GcnModel& model, const GraphDataset& ds,
                         const ExplainerConfig& cfg, std::span<const int> targets,
                         kernels::Exec exec) {
  cfg.validate();
  ExplainRun run;
  run.explanations.resize(targets.size());
  const bool pg_family = cfg.kind == Kind::pgexplainer || cfg.kind == Kind::mixupexplainer ||
                         cfg.kind == Kind::regexplainer;
  if (pg_family) run.trained = train_pg_family(model, ds, cfg, exec);
  kernels::for_each_index(exec, static_cast<int>(targets.size()), [&](int k) {
    const Graph& g = ds.graphs.at(static_cast<std::size_t>(targets[static_cast<std::size_t>(k)]));
    auto& slot = run.explanations[static_cast<std::size_t>(k)];
    switch (cfg.kind) {
      case Kind::grad: slot = grad_explain(model, g); break;
      case Kind::gnnexplainer: slot = gnnexplainer_explain(model, g, cfg); break;
      default: slot = pg_explain(run.trained->net, model, g); break;
    }
  });
  return run;
}

void write_pg_checkpoint(const PgNetwork& net, const ExplainerConfig& cfg,
                         const std::filesystem::path& path) {
  std::string out = "{\"kind\":\"edge_network\",\"explainer\":" +
                    io::quote(to_string(cfg.kind)) +
                    ",\"input_dim\":" + std::to_string(net.input_dim()) +
                    ",\"hidden_dim\":" + std::to_string(net.hidden_dim()) +
                    ",\"input_scale\":";
  io::append_reals(out, std::span<const double>(net.input_scale.data(),
                                                static_cast<std::size_t>(net.input_scale.size())));
  out += ",\"params\":[";
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    if (i) out += ',';
    out += "{\"name\":" + io::quote(PgNetwork::param_name(static_cast<int>(i))) + ",\"value\":";
    io::append_matrix(out, net.params()[i]);
    out += '}';
  }
  out += "],\"train_config\":{\"epochs\":" + std::to_string(cfg.epochs) +
         ",\"learning_rate\":" + io::format_real(cfg.learning_rate) +
         ",\"seed\":" + std::to_string(cfg.seed) +
         ",\"alpha\":" + io::format_real(cfg.loss_weights.alpha) +
         ",\"beta\":" + io::format_real(cfg.loss_weights.beta) +
         ",\"gamma\":" + io::format_real(cfg.loss_weights.gamma) +
         ",\"eta_fraction\":" + io::format_real(cfg.eta_fraction) +
         ",\"ablation\":" + io::quote(to_string(cfg.ablation)) +
         ",\"sign_mode\":" + io::quote(losses::to_string(cfg.sign_mode)) + "}}\n";
  io::write_file(path, out);
}

PgNetwork read_pg_checkpoint(const std::filesystem::path& path) {
  try {
    const auto j = io::Json::parse(io::read_file(path));
    if (j.at("kind") != "edge_network") throw ParseError(path.string() + ": not an edge network");
    PgNetwork net(j.at("input_dim").get<int>(), j.at("hidden_dim").get<int>());
    const auto scale = j.at("input_scale").get<std::vector<double>>();
    if (static_cast<int>(scale.size()) != net.input_dim()) {
      throw ParseError(path.string() + ": input_scale has wrong length");
    }
    for (std::size_t c = 0; c < scale.size(); ++c) {
      net.input_scale(static_cast<Eigen::Index>(c)) = scale[c];
    }
    const auto& ps = j.at("params");
    if (ps.size() != net.params().size()) throw ParseError(path.string() + ": wrong parameter count");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Matrix m = io::matrix_from_json(ps[i].at("value"));
      if (m.rows() != net.params()[i].rows() || m.cols() != net.params()[i].cols()) {
        throw ParseError(path.string() + ": parameter " +
                         PgNetwork::param_name(static_cast<int>(i)) + " has wrong shape");
      }
      net.params()[i] = std::move(m);
    }
    return net;
  } catch (const io::Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace regx::explain
