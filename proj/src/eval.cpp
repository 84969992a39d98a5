#include "regx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "regx/datasets.hpp"
#include "regx/errors.hpp"
#include "regx/kernels.hpp"
#include "regx/mixup.hpp"
#include "regx/random.hpp"
#include "regx/text_io.hpp"

namespace regx::eval {

double edge_auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw ConformanceError("edge_auc: " + std::to_string(scores.size()) + " scores vs " +
                           std::to_string(labels.size()) + " labels");
  }
  double positives = 0.0;
  for (double l : labels) {
    if (l != 0.0 && l != 1.0) throw ValidationError("edge_auc: labels must be binary");
    positives += l;
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw UndefinedAucError("edge AUC undefined: ground truth has a single class");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) rank_sum += avg_rank * labels[order[k]];
    i = j;
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double edge_auc(const Explanation& pred, const Graph& g, const EdgeMask& gt) {
  g.check_conforms(pred.mask());
  g.check_conforms(gt);
  return edge_auc(pred.weights(), g.edge_weights(gt));
}

std::vector<double> binary_ground_truth(const Graph& g) {
  if (!g.gt_mask()) return {};
  auto w = g.edge_weights(*g.gt_mask());
  const bool binary = std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0 || v == 1.0; });
  if (binary || w.empty()) return w;
  auto sorted = w;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  for (double& v : w) v = v >= median ? 1.0 : 0.0;
  return w;
}

namespace {

std::unordered_map<int, std::size_t> index_by_id(const GraphDataset& ds) {
  std::unordered_map<int, std::size_t> out;
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) out.emplace(ds.graphs[i].id(), i);
  return out;
}

const Graph& graph_for(const GraphDataset& ds, const std::unordered_map<int, std::size_t>& ids,
                       const Explanation& e) {
  const auto it = ids.find(e.graph_id());
  if (it == ids.end()) {
    throw CoverageError("explanation for unknown graph id " + std::to_string(e.graph_id()));
  }
  return ds.graphs[it->second];
}

void check_required(const GraphDataset& ds, std::span<const Explanation> expls,
                    std::span<const int> required) {
  std::vector<int> have;
  for (const auto& e : expls) have.push_back(e.graph_id());
  std::sort(have.begin(), have.end());
  for (int idx : required) {
    if (idx < 0 || idx >= static_cast<int>(ds.graphs.size())) {
      throw CoverageError("required graph index " + std::to_string(idx) + " is outside the dataset");
    }
    const int id = ds.graphs[static_cast<std::size_t>(idx)].id();
    if (!std::binary_search(have.begin(), have.end(), id)) {
      throw CoverageError("no explanation for graph id " + std::to_string(id));
    }
  }
}

}  // namespace

double pooled_auc(const GraphDataset& ds, std::span<const Explanation> expls) {
  const auto ids = index_by_id(ds);
  std::vector<double> scores, labels;
  for (const auto& e : expls) {
    const Graph& g = graph_for(ds, ids, e);
    if (!g.gt_mask()) continue;
    g.check_conforms(e.mask());
    const auto w = e.weights();
    const auto gt = binary_ground_truth(g);
    scores.insert(scores.end(), w.begin(), w.end());
    labels.insert(labels.end(), gt.begin(), gt.end());
  }
  return edge_auc(scores, labels);
}

double rmse(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw ConformanceError("rmse needs two non-empty lists of equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    total += d * d;
  }
  return std::sqrt(total / static_cast<double>(xs.size()));
}

Pearson pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ConformanceError("pearson: length mismatch");
  if (xs.size() < 3) throw ValidationError("pearson needs at least three points");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson: zero variance");
  Pearson out;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(xs.size()) - 2.0;
  if (std::abs(out.r) == 1.0) {
    out.p = 0.0;
  } else {
    const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
    const boost::math::students_t dist(df);
    out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return out;
}

double cosine(const RowVector& a, const RowVector& b) {
  if (a.size() != b.size()) throw ConformanceError("cosine: length mismatch");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double unit_euclidean(const RowVector& a, const RowVector& b) {
  if (a.size() != b.size()) throw ConformanceError("unit_euclidean: length mismatch");
  const double na = a.norm(), nb = b.norm();
  const RowVector ua = na > 0.0 ? RowVector(a / na) : a;
  const RowVector ub = nb > 0.0 ? RowVector(b / nb) : b;
  return (ua - ub).norm();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("mean of an empty list");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

bool uses_hard_mask(const std::string& dataset_name) {
  return dataset_name == datasets::kBaMotifVolume;
}

ShiftData shift_data(const GcnModel& model, const GraphDataset& ds,
                     std::span<const Explanation> expls, bool hard_topk,
                     std::span<const int> required) {
  check_required(ds, expls, required);
  const auto ids = index_by_id(ds);
  ShiftData d;
  const auto n = expls.size();
  d.graph_ids.resize(n);
  d.y.resize(n);
  d.f_g.resize(n);
  d.f_star.resize(n);
  kernels::parallel_for(static_cast<int>(n), [&](int k) {
    const auto i = static_cast<std::size_t>(k);
    const Explanation& e = expls[i];
    const Graph& g = graph_for(ds, ids, e);
    EdgeMask mask = e.mask();
    if (hard_topk) {
      if (!g.gt_mask()) {
        throw CoverageError("hard mask needs a ground-truth size for graph " +
                            std::to_string(g.id()));
      }
      const auto gt = g.edge_weights(*g.gt_mask());
      const int k_edges = static_cast<int>(std::count_if(gt.begin(), gt.end(),
                                                         [](double v) { return v > 0.0; }));
      mask = topk_mask(g, e, k_edges);
    }
    d.graph_ids[i] = g.id();
    d.y[i] = g.label();
    d.f_g[i] = gcn_forward(model, g).prediction;
    d.f_star[i] = gcn_forward(model, g, &mask).prediction;
  });
  return d;
}

void fill_shift(EvalReport& r, const ShiftData& d) {
  r.rmse_gy = rmse(d.f_g, d.y);
  r.rmse_sy = rmse(d.f_star, d.y);
  r.rmse_gs = rmse(d.f_g, d.f_star);
}

EvalReport shift_report(const GcnModel& model, const GraphDataset& ds,
                        std::span<const Explanation> expls, bool hard_topk,
                        std::span<const int> required) {
  EvalReport r;
  fill_shift(r, shift_data(model, ds, expls, hard_topk, required));
  return r;
}

EvalReport repair_report(const GcnModel& model, const GraphDataset& ds,
                         std::span<const Explanation> expls, const RepairOptions& opt) {
  if (expls.size() < 3) {
    throw SamplingError("repair report needs at least three explained graphs");
  }
  const auto ids = index_by_id(ds);
  const auto n = expls.size();
  std::vector<Forward> plain(n);
  kernels::parallel_for(static_cast<int>(n), [&](int k) {
    plain[static_cast<std::size_t>(k)] = gcn_forward(model, graph_for(ds, ids, expls[static_cast<std::size_t>(k)]));
  });
  std::vector<int> positions(n);
  std::iota(positions.begin(), positions.end(), 0);

  std::vector<double> cos_e(n), cos_m(n), euc_e(n), euc_m(n), p_g(n), p_e(n), p_m(n);
  kernels::parallel_for(static_cast<int>(n), [&](int k) {
    const auto i = static_cast<std::size_t>(k);
    const Explanation& e = expls[i];
    const Graph& g = graph_for(ds, ids, e);
    Rng rng(derive_seed(opt.seed, {0x726570ULL, static_cast<std::uint64_t>(g.id())}));
    const auto [b, c] = mixup::sample_two(positions, k, rng);
    const auto bi = static_cast<std::size_t>(b), ci = static_cast<std::size_t>(c);
    const Graph& gb = graph_for(ds, ids, expls[bi]);
    const Graph& gc = graph_for(ds, ids, expls[ci]);
    const auto pos = mixup::order_by_similarity(plain[i].embedding, b, gb.id(),
                                                plain[bi].embedding, c, gc.id(),
                                                plain[ci].embedding).positive;
    const auto pi = static_cast<std::size_t>(pos);
    const Graph& gp = graph_for(ds, ids, expls[pi]);
    const auto mix = mixup::mixup_graphs(
        g, e.mask(), gp, expls[pi].mask(), opt.eta_fraction,
        derive_seed(opt.seed, {0x6d6978ULL, static_cast<std::uint64_t>(g.id())}), opt.conn_weight);
    const auto fe = gcn_forward(model, g, &e.mask());
    const auto fm = gcn_forward(model, mix.merged, &mix.mask);
    const auto& vg = plain[i].embedding;
    cos_e[i] = cosine(vg, fe.embedding);
    cos_m[i] = cosine(vg, fm.embedding);
    euc_e[i] = unit_euclidean(vg, fe.embedding);
    euc_m[i] = unit_euclidean(vg, fm.embedding);
    p_g[i] = plain[i].prediction;
    p_e[i] = fe.prediction;
    p_m[i] = fm.prediction;
  });
  EvalReport r;
  r.cos_ge = mean(cos_e);
  r.cos_gm = mean(cos_m);
  r.euc_ge = mean(euc_e);
  r.euc_gm = mean(euc_m);
  r.rmse_pe = rmse(p_g, p_e);
  r.rmse_pm = rmse(p_g, p_m);
  return r;
}

CorrelationStudy correlation_study(const ShiftData& d) {
  CorrelationStudy s;
  s.y = d.y;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    s.star_err.push_back(std::abs(d.f_star[i] - d.y[i]));
    s.shift_err.push_back(std::abs(d.f_g[i] - d.f_star[i]));
  }
  s.star_vs_y = pearson(s.star_err, s.y);
  s.shift_vs_y = pearson(s.shift_err, s.y);
  return s;
}

SeedRuns auc_over_seeds(const GcnModel& model, const GraphDataset& ds,
                        explain::ExplainerConfig cfg, std::span<const std::uint64_t> seeds,
                        std::span<const int> targets, std::string label) {
  if (seeds.empty()) throw ValidationError("at least one seed is required");
  SeedRuns out;
  out.label = std::move(label);
  for (auto seed : seeds) {
    cfg.seed = seed;
    const auto run = explain::run_explainer(model, ds, cfg, targets);
    out.auc.push_back(pooled_auc(ds, run.explanations));
  }
  out.mean = mean(out.auc);
  out.std = stddev(out.auc);
  return out;
}

std::vector<SeedRuns> ablation_suite(const GcnModel& model, const GraphDataset& ds,
                                     const explain::ExplainerConfig& cfg,
                                     std::span<const std::uint64_t> seeds,
                                     std::span<const int> targets) {
  std::vector<SeedRuns> rows;
  for (const char* variant : {"none", "no_mix", "no_nce", "no_mse"}) {
    auto c = cfg;
    c.kind = explain::Kind::regexplainer;
    c.ablation = explain::ablation_from_string(variant);
    rows.push_back(auc_over_seeds(model, ds, c, seeds, targets,
                                  std::string(variant) == "none" ? "full" : variant));
  }
  return rows;
}

std::vector<SeedRuns> hyperparam_sweep(const GcnModel& model, const GraphDataset& ds,
                                       const explain::ExplainerConfig& cfg,
                                       const std::string& parameter,
                                       std::span<const double> grid,
                                       std::span<const std::uint64_t> seeds,
                                       std::span<const int> targets) {
  if (parameter != "alpha" && parameter != "beta") {
    throw ValidationError("sweep parameter must be alpha or beta, got '" + parameter + "'");
  }
  std::vector<SeedRuns> rows;
  for (double v : grid) {
    auto c = cfg;
    c.kind = explain::Kind::regexplainer;
    c.loss_weights.alpha = parameter == "alpha" ? v : 1.0;
    c.loss_weights.beta = parameter == "beta" ? v : 1.0;
    char label[48];
    std::snprintf(label, sizeof label, "%s=%g", parameter.c_str(), v);
    rows.push_back(auc_over_seeds(model, ds, c, seeds, targets, label));
  }
  return rows;
}

std::string serialize_records(std::span<const Record> records) {
  std::string out;
  for (const auto& r : records) {
    out += "{\"metric\":" + io::quote(r.metric) + ",\"dataset\":" + io::quote(r.dataset) +
           ",\"explainer\":" + io::quote(r.explainer) + ",\"seed\":" + std::to_string(r.seed) +
           ",\"value\":" + io::format_real(r.value) + "}\n";
  }
  return out;
}

void append_records(std::vector<Record>& out, const EvalReport& r, const std::string& dataset,
                    const std::string& explainer, std::uint64_t seed) {
  auto add = [&](const std::string& metric, double v) {
    if (!std::isnan(v)) out.push_back({metric, dataset, explainer, seed, v});
  };
  add("auc_mean", r.auc_mean);
  add("auc_std", r.auc_std);
  add("rmse_gy", r.rmse_gy);
  add("rmse_sy", r.rmse_sy);
  add("rmse_gs", r.rmse_gs);
  add("cos_ge", r.cos_ge);
  add("cos_gm", r.cos_gm);
  add("euc_ge", r.euc_ge);
  add("euc_gm", r.euc_gm);
  add("rmse_pe", r.rmse_pe);
  add("rmse_pm", r.rmse_pm);
  for (const auto& p : r.pearson) {
    add("pearson_r:" + p.name, p.value.r);
    add("pearson_p:" + p.name, p.value.p);
  }
}

std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  };
  widen(header);
  for (const auto& r : rows) widen(r);
  auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < row.size() ? row[c] : "";
      if (c) out += "  ";
      out += c == 0 ? cell + std::string(width[c] - cell.size(), ' ')
                    : std::string(width[c] - cell.size(), ' ') + cell;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace regx::eval
