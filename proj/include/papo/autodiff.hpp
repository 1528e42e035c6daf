// Copyright 2026 The PAPO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reverse-mode differentiation over dense row-major matrices.
//
// A Tape records every operation applied to its variables together with the
// adjoint rule. Parameter leaves alias the storage of a Parameter and
// accumulate their gradient directly into Parameter::grad, so large weight
// matrices are never copied onto the tape.
//
//   Tape<double> tape;
//   auto w = tape.parameter(weights);
//   auto x = tape.constant(inputs);
//   auto loss = mean(square(relu(matmul(x, w))));
//   tape.backward(loss);  // weights.grad now holds d loss / d weights
//
// Every recorded value is checked for NaN/Inf; a non-finite result throws
// NumericError naming the operation.

#ifndef PAPO_AUTODIFF_HPP_
#define PAPO_AUTODIFF_HPP_

#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "papo/errors.hpp"
#include "papo/types.hpp"

namespace papo {

template <typename Scalar>
struct Parameter {
  Parameter(std::string name_in, Matrix<Scalar> value_in)
      : name(std::move(name_in)),
        value(std::move(value_in)),
        grad(Matrix<Scalar>::Zero(value.rows(), value.cols())) {}

  Index size() const { return value.size(); }

  std::string name;
  Matrix<Scalar> value;
  Matrix<Scalar> grad;
};

// Owns parameters at stable addresses.
template <typename Scalar>
class ParameterStore {
 public:
  Parameter<Scalar>& add(std::string name, Matrix<Scalar> value) {
    params_.push_back(
        std::make_unique<Parameter<Scalar>>(std::move(name), std::move(value)));
    return *params_.back();
  }

  std::size_t size() const { return params_.size(); }
  Parameter<Scalar>& operator[](std::size_t i) { return *params_[i]; }
  const Parameter<Scalar>& operator[](std::size_t i) const { return *params_[i]; }

  Parameter<Scalar>* find(const std::string& name) {
    for (auto& p : params_) {
      if (p->name == name) return p.get();
    }
    return nullptr;
  }

  Index parameter_count() const {
    Index total = 0;
    for (const auto& p : params_) total += p->size();
    return total;
  }

  void zero_grad() {
    for (auto& p : params_) p->grad.setZero();
  }

 private:
  std::vector<std::unique_ptr<Parameter<Scalar>>> params_;
};

template <typename Scalar>
class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
template <typename Scalar>
class Var {
 public:
  Var() = default;
  Var(Tape<Scalar>* tape, int id) : tape_(tape), id_(id) {}

  Tape<Scalar>& tape() const { return *tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Matrix<Scalar>& value() const { return tape_->value(id_); }
  const Matrix<Scalar>& grad() const { return tape_->grad(id_); }
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  // Value of a 1x1 variable.
  Scalar scalar() const { return value()(0, 0); }

 private:
  Tape<Scalar>* tape_ = nullptr;
  int id_ = -1;
};

template <typename Scalar>
class Tape {
 public:
  using Mat = Matrix<Scalar>;
  using Backward = std::function<void(Tape&, const Mat&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<Scalar> parameter(Parameter<Scalar>& param) {
    Node node;
    node.param = &param;
    node.needs_grad = true;
    nodes_.push_back(std::move(node));
    return Var<Scalar>(this, static_cast<int>(nodes_.size()) - 1);
  }

  Var<Scalar> constant(Mat value) {
    check_finite(value, "constant");
    Node node;
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return Var<Scalar>(this, static_cast<int>(nodes_.size()) - 1);
  }

  // Appends a node computed from `inputs`. `backward` receives the node's
  // adjoint and must push adjoints to the inputs via accumulate().
  Var<Scalar> record(const char* op, Mat value,
                     std::initializer_list<Var<Scalar>> inputs,
                     Backward backward) {
    check_finite(value, op);
    Node node;
    node.value = std::move(value);
    for (const Var<Scalar>& in : inputs) {
      if (&in.tape() != this) throw ContractError("variables from another tape");
      node.needs_grad = node.needs_grad || nodes_[in.id()].needs_grad;
    }
    if (node.needs_grad) node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    return Var<Scalar>(this, static_cast<int>(nodes_.size()) - 1);
  }

  // Variadic form for ops with a runtime number of inputs.
  Var<Scalar> record(const char* op, Mat value,
                     std::span<const Var<Scalar>> inputs, Backward backward) {
    check_finite(value, op);
    Node node;
    node.value = std::move(value);
    for (const Var<Scalar>& in : inputs) {
      node.needs_grad = node.needs_grad || nodes_[in.id()].needs_grad;
    }
    if (node.needs_grad) node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    return Var<Scalar>(this, static_cast<int>(nodes_.size()) - 1);
  }

  const Mat& value(int id) const {
    const Node& node = nodes_[id];
    return node.param ? node.param->value : node.value;
  }

  // Adjoint of a non-parameter node, or the parameter's gradient buffer.
  const Mat& grad(int id) const {
    const Node& node = nodes_[id];
    if (node.param) return node.param->grad;
    if (!node.has_adjoint) {
      throw ContractError("no gradient reached this variable");
    }
    return node.adjoint;
  }

  bool needs_grad(int id) const { return nodes_[id].needs_grad; }

  template <typename Expr>
  void accumulate(int id, const Expr& delta) {
    Node& node = nodes_[id];
    if (!node.needs_grad) return;
    if (node.param) {
      node.param->grad.noalias() += delta;
    } else if (!node.has_adjoint) {
      node.adjoint = delta;
      node.has_adjoint = true;
    } else {
      node.adjoint.noalias() += delta;
    }
  }

  // Propagates d loss / d node to every node that needs a gradient.
  // Parameter gradients accumulate: zero them between steps.
  void backward(const Var<Scalar>& loss) {
    if (&loss.tape() != this) throw ContractError("loss from another tape");
    const Mat& v = value(loss.id());
    if (v.rows() != 1 || v.cols() != 1) {
      throw ContractError("backward() requires a scalar loss, got " +
                          std::to_string(v.rows()) + "x" +
                          std::to_string(v.cols()));
    }
    accumulate(loss.id(), Mat::Constant(1, 1, Scalar(1)));
    for (int id = loss.id(); id >= 0; --id) {
      Node& node = nodes_[id];
      if (!node.has_adjoint || !node.backward) continue;
      node.backward(*this, node.adjoint);
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat adjoint;
    Parameter<Scalar>* param = nullptr;
    bool needs_grad = false;
    bool has_adjoint = false;
    Backward backward;
  };

  static void check_finite(const Mat& value, const char* op) {
    if (!value.allFinite()) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }

  std::deque<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Operations. Binary elementwise ops accept a 1 x cols right operand, which is
// broadcast over the rows of the left operand.

namespace detail {

template <typename Scalar>
void require_same_tape(const Var<Scalar>& a, const Var<Scalar>& b) {
  if (&a.tape() != &b.tape()) throw ContractError("variables from another tape");
}

// Returns true when b broadcasts as a row over a.
template <typename Scalar>
bool check_broadcast(const Var<Scalar>& a, const Var<Scalar>& b,
                     const char* op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return false;
  if (b.rows() == 1 && b.cols() == a.cols()) return true;
  throw DimensionError(std::string(op) + ": shape mismatch " +
                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                       " vs " + std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()));
}

}  // namespace detail

template <typename Scalar>
Var<Scalar> matmul(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::require_same_tape(a, b);
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions " + std::to_string(a.cols()) +
                         " and " + std::to_string(b.rows()) + " differ");
  }
  Matrix<Scalar> out = a.value() * b.value();
  const int ia = a.id(), ib = b.id();
  return a.tape().record(
      "matmul", std::move(out), {a, b},
      [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        if (t.needs_grad(ia)) t.accumulate(ia, g * t.value(ib).transpose());
        if (t.needs_grad(ib)) t.accumulate(ib, t.value(ia).transpose() * g);
      });
}

template <typename Scalar>
Var<Scalar> add(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::require_same_tape(a, b);
  const bool bcast = detail::check_broadcast(a, b, "add");
  Matrix<Scalar> out = a.value();
  if (bcast) {
    out.rowwise() += b.value().row(0);
  } else {
    out += b.value();
  }
  const int ia = a.id(), ib = b.id();
  return a.tape().record("add", std::move(out), {a, b},
                         [ia, ib, bcast](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, g);
                           if (bcast) {
                             t.accumulate(ib, g.colwise().sum());
                           } else {
                             t.accumulate(ib, g);
                           }
                         });
}

template <typename Scalar>
Var<Scalar> sub(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::require_same_tape(a, b);
  const bool bcast = detail::check_broadcast(a, b, "sub");
  Matrix<Scalar> out = a.value();
  if (bcast) {
    out.rowwise() -= b.value().row(0);
  } else {
    out -= b.value();
  }
  const int ia = a.id(), ib = b.id();
  return a.tape().record("sub", std::move(out), {a, b},
                         [ia, ib, bcast](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, g);
                           if (bcast) {
                             t.accumulate(ib, -g.colwise().sum());
                           } else {
                             t.accumulate(ib, -g);
                           }
                         });
}

// Elementwise product.
template <typename Scalar>
Var<Scalar> hadamard(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::require_same_tape(a, b);
  const bool bcast = detail::check_broadcast(a, b, "hadamard");
  Matrix<Scalar> out = a.value();
  if (bcast) {
    out.array().rowwise() *= b.value().row(0).array();
  } else {
    out.array() *= b.value().array();
  }
  const int ia = a.id(), ib = b.id();
  return a.tape().record(
      "hadamard", std::move(out), {a, b},
      [ia, ib, bcast](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        const Matrix<Scalar>& av = t.value(ia);
        const Matrix<Scalar>& bv = t.value(ib);
        if (t.needs_grad(ia)) {
          Matrix<Scalar> da = g;
          if (bcast) {
            da.array().rowwise() *= bv.row(0).array();
          } else {
            da.array() *= bv.array();
          }
          t.accumulate(ia, da);
        }
        if (t.needs_grad(ib)) {
          if (bcast) {
            t.accumulate(ib, (g.array() * av.array()).matrix().colwise().sum());
          } else {
            t.accumulate(ib, (g.array() * av.array()).matrix());
          }
        }
      });
}

template <typename Scalar>
Var<Scalar> scale(const Var<Scalar>& a, Scalar s) {
  Matrix<Scalar> out = a.value() * s;
  const int ia = a.id();
  return a.tape().record("scale", std::move(out), {a},
                         [ia, s](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, g * s);
                         });
}

template <typename Scalar>
Var<Scalar> add_scalar(const Var<Scalar>& a, Scalar s) {
  Matrix<Scalar> out = (a.value().array() + s).matrix();
  const int ia = a.id();
  return a.tape().record("add_scalar", std::move(out), {a},
                         [ia](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, g);
                         });
}

template <typename Scalar>
Var<Scalar> relu(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().cwiseMax(Scalar(0));
  const int ia = a.id();
  return a.tape().record(
      "relu", std::move(out), {a},
      [ia](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.accumulate(ia, (t.value(ia).array() > Scalar(0))
                             .select(g, Matrix<Scalar>::Zero(g.rows(), g.cols())));
      });
}

template <typename Scalar>
Var<Scalar> exp(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().exp().matrix();
  const int ia = a.id();
  const int io = static_cast<int>(a.tape().size());
  return a.tape().record("exp", std::move(out), {a},
                         [ia, io](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, (g.array() * t.value(io).array()).matrix());
                         });
}

template <typename Scalar>
Var<Scalar> log(const Var<Scalar>& a) {
  if ((a.value().array() <= Scalar(0)).any()) {
    throw NumericError("log of a non-positive value");
  }
  Matrix<Scalar> out = a.value().array().log().matrix();
  const int ia = a.id();
  return a.tape().record("log", std::move(out), {a},
                         [ia](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, (g.array() / t.value(ia).array()).matrix());
                         });
}

template <typename Scalar>
Var<Scalar> square(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().square().matrix();
  const int ia = a.id();
  return a.tape().record(
      "square", std::move(out), {a},
      [ia](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.accumulate(ia, (Scalar(2) * g.array() * t.value(ia).array()).matrix());
      });
}

namespace detail {

template <typename Scalar>
Matrix<Scalar> row_softmax(const Matrix<Scalar>& z) {
  Matrix<Scalar> out = z;
  for (Index r = 0; r < out.rows(); ++r) {
    out.row(r).array() -= out.row(r).maxCoeff();
    out.row(r) = out.row(r).array().exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> row_log_softmax(const Matrix<Scalar>& z) {
  Matrix<Scalar> out = z;
  for (Index r = 0; r < out.rows(); ++r) {
    const Scalar m = out.row(r).maxCoeff();
    const Scalar lse = m + std::log((out.row(r).array() - m).exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

}  // namespace detail

// Row-wise softmax.
template <typename Scalar>
Var<Scalar> softmax(const Var<Scalar>& a) {
  Matrix<Scalar> out = detail::row_softmax(a.value());
  const int ia = a.id();
  const int io = static_cast<int>(a.tape().size());
  return a.tape().record(
      "softmax", std::move(out), {a},
      [ia, io](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        const Matrix<Scalar>& y = t.value(io);
        const Vector<Scalar> dot = (g.array() * y.array()).rowwise().sum();
        Matrix<Scalar> da = g;
        da.colwise() -= dot;
        t.accumulate(ia, (da.array() * y.array()).matrix());
      });
}

// Row-wise log-softmax.
template <typename Scalar>
Var<Scalar> log_softmax(const Var<Scalar>& a) {
  Matrix<Scalar> out = detail::row_log_softmax(a.value());
  const int ia = a.id();
  const int io = static_cast<int>(a.tape().size());
  return a.tape().record(
      "log_softmax", std::move(out), {a},
      [ia, io](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        const Matrix<Scalar> p = t.value(io).array().exp().matrix();
        const Vector<Scalar> total = g.rowwise().sum();
        Matrix<Scalar> da = p;
        da.array().colwise() *= total.array();
        t.accumulate(ia, g - da);
      });
}

// Clamps to [lo, hi]; gradient passes through inside the closed interval and
// is zero outside it.
template <typename Scalar>
Var<Scalar> clip(const Var<Scalar>& a, Scalar lo, Scalar hi) {
  Matrix<Scalar> out = a.value().cwiseMax(lo).cwiseMin(hi);
  const int ia = a.id();
  return a.tape().record(
      "clip", std::move(out), {a},
      [ia, lo, hi](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        const auto& v = t.value(ia).array();
        t.accumulate(ia, ((v >= lo) && (v <= hi))
                             .select(g, Matrix<Scalar>::Zero(g.rows(), g.cols())));
      });
}

// Elementwise minimum; ties route the gradient to `a`.
template <typename Scalar>
Var<Scalar> minimum(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::require_same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("minimum: shape mismatch");
  }
  Matrix<Scalar> out = a.value().cwiseMin(b.value());
  const int ia = a.id(), ib = b.id();
  return a.tape().record(
      "minimum", std::move(out), {a, b},
      [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        const auto take_a = (t.value(ia).array() <= t.value(ib).array());
        const Matrix<Scalar> zero = Matrix<Scalar>::Zero(g.rows(), g.cols());
        t.accumulate(ia, take_a.select(g, zero));
        t.accumulate(ib, take_a.select(zero, g));
      });
}

template <typename Scalar>
Var<Scalar> sum(const Var<Scalar>& a) {
  Matrix<Scalar> out = Matrix<Scalar>::Constant(1, 1, a.value().sum());
  const int ia = a.id();
  const Index r = a.rows(), c = a.cols();
  return a.tape().record("sum", std::move(out), {a},
                         [ia, r, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, Matrix<Scalar>::Constant(r, c, g(0, 0)));
                         });
}

template <typename Scalar>
Var<Scalar> mean(const Var<Scalar>& a) {
  const Index r = a.rows(), c = a.cols();
  if (r * c == 0) throw ContractError("mean of an empty variable");
  Matrix<Scalar> out = Matrix<Scalar>::Constant(1, 1, a.value().mean());
  const int ia = a.id();
  return a.tape().record(
      "mean", std::move(out), {a}, [ia, r, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.accumulate(ia, Matrix<Scalar>::Constant(r, c, g(0, 0) / Scalar(r * c)));
      });
}

// Sums each row into a column vector.
template <typename Scalar>
Var<Scalar> row_sum(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().rowwise().sum();
  const int ia = a.id();
  const Index c = a.cols();
  return a.tape().record("row_sum", std::move(out), {a},
                         [ia, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, g.col(0).replicate(1, c));
                         });
}

// out(r) = a(r, cols[r]).
template <typename Scalar>
Var<Scalar> pick(const Var<Scalar>& a, std::span<const int> cols) {
  if (static_cast<Index>(cols.size()) != a.rows()) {
    throw DimensionError("pick: one column index per row required");
  }
  Matrix<Scalar> out(a.rows(), 1);
  for (Index r = 0; r < a.rows(); ++r) {
    if (cols[r] < 0 || cols[r] >= a.cols()) {
      throw DimensionError("pick: column index out of range");
    }
    out(r, 0) = a.value()(r, cols[r]);
  }
  const int ia = a.id();
  std::vector<int> idx(cols.begin(), cols.end());
  const Index c = a.cols();
  return a.tape().record(
      "pick", std::move(out), {a},
      [ia, idx = std::move(idx), c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> da = Matrix<Scalar>::Zero(g.rows(), c);
        for (Index r = 0; r < g.rows(); ++r) da(r, idx[r]) = g(r, 0);
        t.accumulate(ia, da);
      });
}

// Row-major reinterpretation with a new shape.
template <typename Scalar>
Var<Scalar> reshape(const Var<Scalar>& a, Index rows, Index cols) {
  if (rows * cols != a.value().size()) {
    throw DimensionError("reshape: element count mismatch");
  }
  Matrix<Scalar> out =
      Eigen::Map<const Matrix<Scalar>>(a.value().data(), rows, cols);
  const int ia = a.id();
  const Index r0 = a.rows(), c0 = a.cols();
  return a.tape().record(
      "reshape", std::move(out), {a},
      [ia, r0, c0](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.accumulate(ia, Eigen::Map<const Matrix<Scalar>>(g.data(), r0, c0));
      });
}

template <typename Scalar>
Var<Scalar> row(const Var<Scalar>& a, Index r) {
  if (r < 0 || r >= a.rows()) throw DimensionError("row: index out of range");
  Matrix<Scalar> out = a.value().row(r);
  const int ia = a.id();
  const Index rows = a.rows();
  return a.tape().record(
      "row", std::move(out), {a},
      [ia, r, rows](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> da = Matrix<Scalar>::Zero(rows, g.cols());
        da.row(r) = g.row(0);
        t.accumulate(ia, da);
      });
}

// Stacks a 1 x c row n times.
template <typename Scalar>
Var<Scalar> repeat_rows(const Var<Scalar>& a, Index n) {
  if (a.rows() != 1) throw DimensionError("repeat_rows: expects a single row");
  Matrix<Scalar> out = a.value().replicate(n, 1);
  const int ia = a.id();
  return a.tape().record("repeat_rows", std::move(out), {a},
                         [ia](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                           t.accumulate(ia, g.colwise().sum());
                         });
}

template <typename Scalar>
Var<Scalar> concat_cols(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::require_same_tape(a, b);
  if (a.rows() != b.rows()) throw DimensionError("concat_cols: row mismatch");
  Matrix<Scalar> out(a.rows(), a.cols() + b.cols());
  out << a.value(), b.value();
  const int ia = a.id(), ib = b.id();
  const Index ca = a.cols(), cb = b.cols();
  return a.tape().record(
      "concat_cols", std::move(out), {a, b},
      [ia, ib, ca, cb](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        if (t.needs_grad(ia)) t.accumulate(ia, g.leftCols(ca));
        if (t.needs_grad(ib)) t.accumulate(ib, g.rightCols(cb));
      });
}

template <typename Scalar>
Var<Scalar> concat_rows(std::span<const Var<Scalar>> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw DimensionError("concat_rows: column mismatch");
    rows += p.rows();
  }
  Matrix<Scalar> out(rows, cols);
  std::vector<std::pair<int, Index>> layout;
  Index offset = 0;
  for (const auto& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    layout.emplace_back(p.id(), p.rows());
    offset += p.rows();
  }
  return parts.front().tape().record(
      "concat_rows", std::move(out), parts,
      [layout = std::move(layout)](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Index off = 0;
        for (const auto& [id, n] : layout) {
          if (t.needs_grad(id)) t.accumulate(id, g.middleRows(off, n));
          off += n;
        }
      });
}

template <typename Scalar>
Var<Scalar> operator+(const Var<Scalar>& a, const Var<Scalar>& b) {
  return add(a, b);
}

template <typename Scalar>
Var<Scalar> operator-(const Var<Scalar>& a, const Var<Scalar>& b) {
  return sub(a, b);
}

template <typename Scalar>
Var<Scalar> operator-(const Var<Scalar>& a) {
  return scale(a, Scalar(-1));
}

template <typename Scalar>
Var<Scalar> operator*(Scalar s, const Var<Scalar>& a) {
  return scale(a, s);
}

}  // namespace papo

#endif  // PAPO_AUTODIFF_HPP_
