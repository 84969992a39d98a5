#pragma once

#include <span>
#include <string>

#include "regx/autodiff.hpp"
#include "regx/graph.hpp"

namespace regx::losses {

struct LossWeights {
  double alpha = 1.0;   // InfoNCE
  double beta = 1.0;    // MSE
  double gamma = 0.003; // edge size

  void validate() const;
};

/// as_derived: size + alpha * nce + beta * mse (sign consistent with
/// maximizing the InfoNCE bound). as_printed: size - alpha * nce + beta * mse.
enum class SignMode { as_derived, as_printed };

std::string to_string(SignMode m);
SignMode sign_mode_from_string(const std::string& s);

// -- values -----------------------------------------------------------------

/// -log[ exp(h_mix_pos.h) / (exp(h_mix_pos.h_pos) + exp(h_mix_neg.h_neg)) ],
/// evaluated with log-sum-exp.
double info_nce_loss(const RowVector& h_mix_pos, const RowVector& h_mix_neg,
                     const RowVector& h, const RowVector& h_pos,
                     const RowVector& h_neg);

/// gamma * sum_{i<j} M_ij - log sigmoid(h_star . h_star).
double size_loss(const EdgeMask& mask, const RowVector& h_star, double gamma);
double size_loss(std::span<const double> edge_weights, const RowVector& h_star,
                 double gamma);

double mse_loss(double y_a, double y_b);

double overall_loss(double size, double nce, double mse, const LossWeights& w,
                    SignMode mode = SignMode::as_derived);

/// log(1 + exp(x)) without overflow.
double softplus(double x);
/// log sigmoid(x).
double log_sigmoid(double x);

// -- analytic gradients -----------------------------------------------------

struct InfoNceGrad {
  RowVector h_mix_pos, h_mix_neg, h, h_pos, h_neg;
};
InfoNceGrad info_nce_grad(const RowVector& h_mix_pos, const RowVector& h_mix_neg,
                          const RowVector& h, const RowVector& h_pos,
                          const RowVector& h_neg);

struct SizeGrad {
  double per_edge = 0.0;  // d/dM_ij for every upper-triangular edge entry
  RowVector h_star;
};
SizeGrad size_grad(const RowVector& h_star, double gamma);

/// (d/dy_a, d/dy_b).
std::pair<double, double> mse_grad(double y_a, double y_b);

// -- tape nodes, backed by the analytic gradients above ---------------------

ad::Var info_nce(ad::Var h_mix_pos, ad::Var h_mix_neg, ad::Var h, ad::Var h_pos,
                 ad::Var h_neg);
/// edge_weights: E x 1, one entry per undirected edge.
ad::Var size(ad::Var edge_weights, ad::Var h_star, double gamma);
ad::Var mse(ad::Var y_a, ad::Var y_b);

}  // namespace regx::losses
