#pragma once

#include <functional>
#include <span>
#include <vector>

#include "regx/graph.hpp"

// Minimal reverse-mode differentiation over dense matrices. A Tape records
// every value produced during a forward computation together with a closure
// that pushes the node's gradient onto its inputs. Scalars are 1x1 matrices.
// Nodes only carry gradients when some input is a variable, so frozen
// sub-computations cost nothing in the backward sweep.
namespace regx::ad {

class Tape;

class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  /// Gradient after Tape::backward; zero matrix if none reached this node.
  Matrix grad() const;
  double scalar() const;
  bool requires_grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* t, int id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  using Backprop = std::function<void(Tape&, int self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var variable(Matrix value);
  Var scalar_constant(double v);

  /// Seeds d(root)/d(root) = 1 and sweeps the tape backwards. root must be
  /// 1x1. Gradients accumulate across calls until clear_grads().
  void backward(Var root);
  void clear_grads();

  const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool requires_grad(int id) const {
    return nodes_[static_cast<std::size_t>(id)].requires_grad;
  }
  /// Mutable gradient accumulator, allocated on first use.
  Matrix& grad(int id);
  bool has_grad(int id) const {
    return nodes_[static_cast<std::size_t>(id)].grad.size() != 0;
  }
  const Matrix* grad_if_any(int id) const;

  /// Records an op result. requires_grad is derived from the inputs.
  Var push(Matrix value, std::initializer_list<Var> inputs, Backprop backprop);
  Var push(Matrix value, std::span<const Var> inputs, Backprop backprop);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Var;
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Backprop backprop;
  };
  std::vector<Node> nodes_;
};

// Elementwise / structural ops. Shapes follow Eigen conventions.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
/// a (n x c) + b (1 x c) broadcast over rows.
Var add_row(Var a, Var b);
Var scale(Var a, double s);
/// s * a + t elementwise.
Var affine(Var a, double s, double t);
/// a + c with a constant matrix of the same shape.
Var add_const(Var a, const Matrix& c);
Var relu(Var a);
Var sigmoid(Var a);
Var square(Var a);
/// Sum of all entries -> 1x1.
Var sum(Var a);
/// Column means / sums over rows -> 1 x c.
Var mean_rows(Var a);
Var sum_rows(Var a);
/// Frobenius inner product -> 1x1.
Var dot(Var a, Var b);
/// Stacks column-compatible blocks vertically.
Var concat_rows(std::span<const Var> parts);
/// Stacks row-compatible blocks horizontally.
Var concat_cols(std::span<const Var> parts);
/// out.row(k) = a.row(idx[k]); the backward pass scatter-adds.
Var gather_rows(Var a, std::vector<int> idx);
/// Columns [first, first + count) of a.
Var slice_cols(Var a, int first, int count);

/// Symmetric-normalized propagation over a weighted undirected graph with unit
/// self loops:  out = D^{-1/2} (A_w + I) D^{-1/2} x,  D = diag(1 + sum_j w_ij).
/// `weights` is E x 1 aligned with `edges`; differentiable in both weights
/// and x.
Var propagate(int n, const std::vector<Edge>& edges, Var weights, Var x);

}  // namespace regx::ad
