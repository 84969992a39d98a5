#include "regx/losses.hpp"

#include <cmath>

#include "regx/errors.hpp"

namespace regx::losses {

void LossWeights::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be > 0");
}

std::string to_string(SignMode m) {
  return m == SignMode::as_derived ? "as_derived" : "as_printed";
}

SignMode sign_mode_from_string(const std::string& s) {
  if (s == "as_derived") return SignMode::as_derived;
  if (s == "as_printed") return SignMode::as_printed;
  throw ValidationError("unknown sign mode '" + s + "'");
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double log_sigmoid(double x) { return -softplus(-x); }

namespace {

void check_lengths(std::initializer_list<const RowVector*> vs) {
  const auto n = (*vs.begin())->size();
  for (const auto* v : vs) {
    if (v->size() != n) throw ConformanceError("InfoNCE: embedding length mismatch");
  }
}

// Softmax weight of the positive pair in the denominator.
double positive_share(double pos, double neg) {
  return 1.0 / (1.0 + std::exp(neg - pos));
}

}  // namespace

double info_nce_loss(const RowVector& h_mix_pos, const RowVector& h_mix_neg,
                     const RowVector& h, const RowVector& h_pos,
                     const RowVector& h_neg) {
  check_lengths({&h_mix_pos, &h_mix_neg, &h, &h_pos, &h_neg});
  const double num = h_mix_pos.dot(h);
  const double pos = h_mix_pos.dot(h_pos);
  const double neg = h_mix_neg.dot(h_neg);
  const double hi = std::max(pos, neg);
  const double lse = hi + std::log(std::exp(pos - hi) + std::exp(neg - hi));
  return lse - num;
}

InfoNceGrad info_nce_grad(const RowVector& h_mix_pos, const RowVector& h_mix_neg,
                          const RowVector& h, const RowVector& h_pos,
                          const RowVector& h_neg) {
  check_lengths({&h_mix_pos, &h_mix_neg, &h, &h_pos, &h_neg});
  const double sp = positive_share(h_mix_pos.dot(h_pos), h_mix_neg.dot(h_neg));
  const double sn = 1.0 - sp;
  return {sp * h_pos - h, sn * h_neg, -h_mix_pos, sp * h_mix_pos, sn * h_mix_neg};
}

double size_loss(std::span<const double> edge_weights, const RowVector& h_star,
                 double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("size loss gamma must be > 0");
  double total = 0.0;
  for (double w : edge_weights) total += w;
  return gamma * total - log_sigmoid(h_star.squaredNorm());
}

double size_loss(const EdgeMask& mask, const RowVector& h_star, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("size loss gamma must be > 0");
  double total = 0.0;
  const auto& m = mask.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) total += m(i, j);
  }
  return gamma * total - log_sigmoid(h_star.squaredNorm());
}

SizeGrad size_grad(const RowVector& h_star, double gamma) {
  // d/dq [-log sigmoid(q)] = -sigmoid(-q), q = |h|^2
  const double q = h_star.squaredNorm();
  const double s = std::exp(log_sigmoid(-q));
  return {gamma, -2.0 * s * h_star};
}

double mse_loss(double y_a, double y_b) {
  const double d = y_a - y_b;
  return d * d;
}

std::pair<double, double> mse_grad(double y_a, double y_b) {
  const double d = 2.0 * (y_a - y_b);
  return {d, -d};
}

double overall_loss(double size, double nce, double mse, const LossWeights& w,
                    SignMode mode) {
  switch (mode) {
    case SignMode::as_derived:
      return size + w.alpha * nce + w.beta * mse;
    case SignMode::as_printed:
      return size - w.alpha * nce + w.beta * mse;
  }
  throw ValidationError("unknown sign mode");
}

ad::Var info_nce(ad::Var h_mix_pos, ad::Var h_mix_neg, ad::Var h, ad::Var h_pos,
                 ad::Var h_neg) {
  ad::Tape& t = *h.tape();
  Matrix out(1, 1);
  out(0, 0) = info_nce_loss(h_mix_pos.value(), h_mix_neg.value(), h.value(),
                            h_pos.value(), h_neg.value());
  return t.push(std::move(out), {h_mix_pos, h_mix_neg, h, h_pos, h_neg},
                [=](ad::Tape& t, int self) {
                  const double g = t.grad(self)(0, 0);
                  const auto d = info_nce_grad(h_mix_pos.value(), h_mix_neg.value(),
                                               h.value(), h_pos.value(), h_neg.value());
                  const std::pair<ad::Var, const RowVector*> parts[] = {
                      {h_mix_pos, &d.h_mix_pos}, {h_mix_neg, &d.h_mix_neg},
                      {h, &d.h}, {h_pos, &d.h_pos}, {h_neg, &d.h_neg}};
                  for (const auto& [v, dv] : parts) {
                    if (t.requires_grad(v.id())) t.grad(v.id()) += g * *dv;
                  }
                });
}

ad::Var size(ad::Var edge_weights, ad::Var h_star, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("size loss gamma must be > 0");
  ad::Tape& t = *h_star.tape();
  const Matrix& w = edge_weights.value();
  Matrix out(1, 1);
  out(0, 0) = size_loss(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())),
                        h_star.value(), gamma);
  return t.push(std::move(out), {edge_weights, h_star},
                [edge_weights, h_star, gamma](ad::Tape& t, int self) {
                  const double g = t.grad(self)(0, 0);
                  const auto d = size_grad(h_star.value(), gamma);
                  if (t.requires_grad(edge_weights.id())) {
                    t.grad(edge_weights.id()).array() += g * d.per_edge;
                  }
                  if (t.requires_grad(h_star.id())) t.grad(h_star.id()) += g * d.h_star;
                });
}

ad::Var mse(ad::Var y_a, ad::Var y_b) {
  ad::Tape& t = *y_a.tape();
  Matrix out(1, 1);
  out(0, 0) = mse_loss(y_a.scalar(), y_b.scalar());
  return t.push(std::move(out), {y_a, y_b}, [y_a, y_b](ad::Tape& t, int self) {
    const double g = t.grad(self)(0, 0);
    const auto [da, db] = mse_grad(y_a.scalar(), y_b.scalar());
    if (t.requires_grad(y_a.id())) t.grad(y_a.id())(0, 0) += g * da;
    if (t.requires_grad(y_b.id())) t.grad(y_b.id())(0, 0) += g * db;
  });
}

}  // namespace regx::losses
