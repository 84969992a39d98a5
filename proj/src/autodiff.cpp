#include "regx/autodiff.hpp"

#include <cassert>
#include <cmath>

#include "regx/errors.hpp"

namespace regx::ad {

const Matrix& Var::value() const { return tape_->value(id_); }

Matrix Var::grad() const {
  if (const Matrix* g = tape_->grad_if_any(id_)) return *g;
  return Matrix::Zero(value().rows(), value().cols());
}

double Var::scalar() const {
  const auto& v = value();
  assert(v.rows() == 1 && v.cols() == 1);
  return v(0, 0);
}

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::constant(Matrix value) {
  nodes_.push_back({std::move(value), Matrix(), false, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::variable(Matrix value) {
  nodes_.push_back({std::move(value), Matrix(), true, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::scalar_constant(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

Matrix& Tape::grad(int id) {
  auto& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

const Matrix* Tape::grad_if_any(int id) const {
  const auto& n = nodes_[static_cast<std::size_t>(id)];
  return n.grad.size() == 0 ? nullptr : &n.grad;
}

Var Tape::push(Matrix value, std::initializer_list<Var> inputs, Backprop backprop) {
  return push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
              std::move(backprop));
}

Var Tape::push(Matrix value, std::span<const Var> inputs, Backprop backprop) {
  bool rg = false;
  for (const auto& in : inputs) {
    assert(in.tape() == this);
    rg = rg || requires_grad(in.id());
  }
  nodes_.push_back({std::move(value), Matrix(), rg, rg ? std::move(backprop) : nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::backward(Var root) {
  if (root.value().rows() != 1 || root.value().cols() != 1) {
    throw ConformanceError("backward root must be a scalar");
  }
  if (!requires_grad(root.id())) return;
  grad(root.id())(0, 0) += 1.0;
  for (int id = root.id(); id >= 0; --id) {
    auto& n = nodes_[static_cast<std::size_t>(id)];
    if (n.backprop && n.grad.size() != 0) n.backprop(*this, id);
  }
}

void Tape::clear_grads() {
  for (auto& n : nodes_) n.grad.resize(0, 0);
}

namespace {

// Gradient accumulator of an input, or nullptr when it needs none.
Matrix* grad_of(Tape& t, Var v) {
  return t.requires_grad(v.id()) ? &t.grad(v.id()) : nullptr;
}

// y = D^{-1/2} (A_w + I) D^{-1/2} v. The operator is symmetric, so the same
// routine serves the forward pass and the gradient w.r.t. v.
Matrix apply_normalized(const std::vector<Edge>& edges, const Eigen::VectorXd& deg,
                        const Eigen::VectorXd& inv_sqrt, const Matrix& w,
                        const Matrix& v) {
  Matrix y = deg.cwiseInverse().asDiagonal() * v;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int a = edges[e].u, b = edges[e].v;
    const double c = w(static_cast<Eigen::Index>(e), 0) * inv_sqrt(a) * inv_sqrt(b);
    y.row(a) += c * v.row(b);
    y.row(b) += c * v.row(a);
  }
  return y;
}

void check_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConformanceError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) throw ConformanceError("matmul: inner dimension mismatch");
  Tape& t = *a.tape();
  return t.push(a.value() * b.value(), {a, b}, [a, b](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    if (auto* ga = grad_of(t, a)) ga->noalias() += g * b.value().transpose();
    if (auto* gb = grad_of(t, b)) gb->noalias() += a.value().transpose() * g;
  });
}

Var add(Var a, Var b) {
  check_same_shape(a, b, "add");
  Tape& t = *a.tape();
  return t.push(a.value() + b.value(), {a, b}, [a, b](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    if (auto* ga = grad_of(t, a)) *ga += g;
    if (auto* gb = grad_of(t, b)) *gb += g;
  });
}

Var sub(Var a, Var b) {
  check_same_shape(a, b, "sub");
  Tape& t = *a.tape();
  return t.push(a.value() - b.value(), {a, b}, [a, b](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    if (auto* ga = grad_of(t, a)) *ga += g;
    if (auto* gb = grad_of(t, b)) *gb -= g;
  });
}

Var mul(Var a, Var b) {
  check_same_shape(a, b, "mul");
  Tape& t = *a.tape();
  return t.push(a.value().cwiseProduct(b.value()), {a, b}, [a, b](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    if (auto* ga = grad_of(t, a)) *ga += g.cwiseProduct(b.value());
    if (auto* gb = grad_of(t, b)) *gb += g.cwiseProduct(a.value());
  });
}

Var add_row(Var a, Var b) {
  if (b.rows() != 1 || b.cols() != a.cols()) {
    throw ConformanceError("add_row: bias must be 1 x cols");
  }
  Tape& t = *a.tape();
  Matrix out = a.value();
  out.rowwise() += b.value().row(0);
  return t.push(std::move(out), {a, b}, [a, b](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    if (auto* ga = grad_of(t, a)) *ga += g;
    if (auto* gb = grad_of(t, b)) *gb += g.colwise().sum();
  });
}

Var scale(Var a, double s) { return affine(a, s, 0.0); }

Var affine(Var a, double s, double c) {
  Tape& t = *a.tape();
  Matrix out = (a.value() * s).array() + c;
  return t.push(std::move(out), {a}, [a, s](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) *ga += s * t.grad(self);
  });
}

Var add_const(Var a, const Matrix& c) {
  if (c.rows() != a.rows() || c.cols() != a.cols()) {
    throw ConformanceError("add_const: shape mismatch");
  }
  Tape& t = *a.tape();
  return t.push(a.value() + c, {a}, [a](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) *ga += t.grad(self);
  });
}

Var relu(Var a) {
  Tape& t = *a.tape();
  return t.push(a.value().cwiseMax(0.0), {a}, [a](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) {
      *ga += (a.value().array() > 0.0).select(t.grad(self).array(), 0.0).matrix();
    }
  });
}

Var sigmoid(Var a) {
  Tape& t = *a.tape();
  Matrix out = a.value().unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return t.push(std::move(out), {a}, [a](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) {
      const Matrix& s = t.value(self);
      *ga += t.grad(self).cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
    }
  });
}

Var square(Var a) {
  Tape& t = *a.tape();
  return t.push(a.value().cwiseAbs2(), {a}, [a](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) *ga += 2.0 * t.grad(self).cwiseProduct(a.value());
  });
}

Var sum(Var a) {
  Tape& t = *a.tape();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.push(std::move(out), {a}, [a](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) ga->array() += t.grad(self)(0, 0);
  });
}

Var mean_rows(Var a) {
  Tape& t = *a.tape();
  const double inv = 1.0 / static_cast<double>(a.rows());
  Matrix out = a.value().colwise().sum() * inv;
  return t.push(std::move(out), {a}, [a, inv](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) ga->rowwise() += inv * t.grad(self).row(0);
  });
}

Var sum_rows(Var a) {
  Tape& t = *a.tape();
  Matrix out = a.value().colwise().sum();
  return t.push(std::move(out), {a}, [a](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) ga->rowwise() += t.grad(self).row(0);
  });
}

Var dot(Var a, Var b) {
  check_same_shape(a, b, "dot");
  Tape& t = *a.tape();
  Matrix out(1, 1);
  out(0, 0) = a.value().cwiseProduct(b.value()).sum();
  return t.push(std::move(out), {a, b}, [a, b](Tape& t, int self) {
    const double g = t.grad(self)(0, 0);
    if (auto* ga = grad_of(t, a)) *ga += g * b.value();
    if (auto* gb = grad_of(t, b)) *gb += g * a.value();
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ConformanceError("concat_rows: no parts");
  Tape& t = *parts.front().tape();
  const auto cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw ConformanceError("concat_rows: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  std::vector<Var> keep(parts.begin(), parts.end());
  return t.push(std::move(out), parts, [keep](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    Eigen::Index r = 0;
    for (const auto& p : keep) {
      if (auto* gp = grad_of(t, p)) *gp += g.middleRows(r, p.rows());
      r += p.rows();
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ConformanceError("concat_cols: no parts");
  Tape& t = *parts.front().tape();
  const auto rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ConformanceError("concat_cols: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  std::vector<Var> keep(parts.begin(), parts.end());
  return t.push(std::move(out), parts, [keep](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    Eigen::Index c = 0;
    for (const auto& p : keep) {
      if (auto* gp = grad_of(t, p)) *gp += g.middleCols(c, p.cols());
      c += p.cols();
    }
  });
}

Var gather_rows(Var a, std::vector<int> idx) {
  Tape& t = *a.tape();
  Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= a.rows()) {
      throw RangeError("gather_rows: index out of range");
    }
    out.row(static_cast<Eigen::Index>(k)) = a.value().row(idx[k]);
  }
  return t.push(std::move(out), {a}, [a, idx = std::move(idx)](Tape& t, int self) {
    if (auto* ga = grad_of(t, a)) {
      const Matrix& g = t.grad(self);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        ga->row(idx[k]) += g.row(static_cast<Eigen::Index>(k));
      }
    }
  });
}

Var slice_cols(Var a, int first, int count) {
  if (first < 0 || count < 0 || first + count > a.cols()) {
    throw RangeError("slice_cols: range outside matrix");
  }
  Tape& t = *a.tape();
  return t.push(a.value().middleCols(first, count), {a},
                [a, first, count](Tape& t, int self) {
                  if (auto* ga = grad_of(t, a)) {
                    ga->middleCols(first, count) += t.grad(self);
                  }
                });
}

Var propagate(int n, const std::vector<Edge>& edges, Var weights, Var x) {
  if (x.rows() != n) throw ConformanceError("propagate: feature rows != n");
  if (weights.rows() != static_cast<Eigen::Index>(edges.size()) || weights.cols() != 1) {
    throw ConformanceError("propagate: weights must be E x 1");
  }
  Tape& t = *x.tape();
  const Matrix& w = weights.value();
  const Matrix& xv = x.value();
  Eigen::VectorXd deg = Eigen::VectorXd::Ones(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto k = static_cast<Eigen::Index>(e);
    deg(edges[e].u) += w(k, 0);
    deg(edges[e].v) += w(k, 0);
  }
  const Eigen::VectorXd inv_sqrt = deg.cwiseSqrt().cwiseInverse();

  Matrix out = apply_normalized(edges, deg, inv_sqrt, w, xv);
  return t.push(std::move(out), {weights, x},
                [n, edges, weights, x, deg, inv_sqrt](Tape& t, int self) {
                  const Matrix& g = t.grad(self);
                  const Matrix& wv = weights.value();
                  const Matrix& xv = x.value();
                  const Matrix pg = apply_normalized(edges, deg, inv_sqrt, wv, g);
                  if (auto* gx = grad_of(t, x)) *gx += pg;
                  if (auto* gw = grad_of(t, weights)) {
                    const Matrix& out = t.value(self);
                    Eigen::VectorXd dd(n);
                    for (int k = 0; k < n; ++k) {
                      const double r = g.row(k).dot(out.row(k)) + xv.row(k).dot(pg.row(k));
                      dd(k) = -0.5 * r / deg(k);
                    }
                    for (std::size_t e = 0; e < edges.size(); ++e) {
                      const int a = edges[e].u, b = edges[e].v;
                      const double direct = inv_sqrt(a) * inv_sqrt(b) *
                                            (g.row(a).dot(xv.row(b)) + g.row(b).dot(xv.row(a)));
                      (*gw)(static_cast<Eigen::Index>(e), 0) += direct + dd(a) + dd(b);
                    }
                  }
                });
}

}  // namespace regx::ad
