#pragma once

#include <cmath>
#include <vector>

#include "regx/graph.hpp"

namespace regx {

/// Adaptive-moment gradient descent over a list of parameter matrices.
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::vector<Matrix>& params, const std::vector<Matrix>& grads) {
    if (m_.empty()) {
      for (const auto& p : params) {
        m_.push_back(Matrix::Zero(p.rows(), p.cols()));
        v_.push_back(Matrix::Zero(p.rows(), p.cols()));
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseAbs2();
      params[i].array() -=
          lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
    }
  }

  int steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace regx
