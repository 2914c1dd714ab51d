// Copyright 2026 The Lacuna Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "lacuna/autodiff/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lacuna/autodiff/kernels.hpp"

namespace lacuna::ad {

namespace {

const char* op_label(int op) {
  static const char* const kNames[] = {
      "leaf",    "matmul",     "add",         "mul",     "scale",        "concat_cols", "concat_rows",
      "slice_cols", "slice_rows", "gather_rows", "sigmoid", "tanh",      "softmax",     "log_softmax",
      "dropout", "cross_entropy", "sum",      "lstm_cell", "attention_scores", "attention_context",
  };
  return kNames[op];
}

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape != b.shape) {
    throw ShapeError(std::string(op) + ": shapes " + shape_string(a.shape) + " and " + shape_string(b.shape) +
                     " differ");
  }
}

template <typename T>
T stable_sigmoid(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Writes row-wise softmax of x (first `len` columns) into y; the tail is zero.
template <typename T>
void softmax_row(const T* x, T* y, int cols, int len) {
  if (len <= 0) {
    std::fill(y, y + cols, T(0));
    return;
  }
  T mx = x[0];
  for (int j = 1; j < len; ++j) mx = std::max(mx, x[j]);
  T total = 0;
  for (int j = 0; j < len; ++j) {
    y[j] = std::exp(x[j] - mx);
    total += y[j];
  }
  const T inv = T(1) / total;
  for (int j = 0; j < len; ++j) y[j] *= inv;
  std::fill(y + len, y + cols, T(0));
}

template <typename T>
T log_sum_exp(const T* x, int cols) {
  T mx = x[0];
  for (int j = 1; j < cols; ++j) mx = std::max(mx, x[j]);
  T total = 0;
  for (int j = 0; j < cols; ++j) total += std::exp(x[j] - mx);
  return mx + std::log(total);
}

}  // namespace

template <typename T>
Graph<T>::Graph(Mode mode, Rng* rng) : mode_(mode), rng_(rng), grad_enabled_(mode == Mode::kTraining) {
  nodes_.reserve(256);
}

template <typename T>
typename Graph<T>::Node& Graph<T>::node(Var v) {
  if (v.id < 0 || static_cast<size_t>(v.id) >= nodes_.size()) throw std::out_of_range("invalid graph variable");
  return nodes_[static_cast<size_t>(v.id)];
}

template <typename T>
const typename Graph<T>::Node& Graph<T>::node(Var v) const {
  return const_cast<Graph*>(this)->node(v);
}

template <typename T>
Var Graph<T>::push(Op op, std::vector<int> inputs, Tensor<T> value) {
  for (T x : value.data) {
    if (!std::isfinite(x)) {
      throw NonFiniteError(std::string(op_label(static_cast<int>(op))) + " produced a non-finite value");
    }
  }
  Node n;
  n.op = op;
  for (int id : inputs) n.requires_grad = n.requires_grad || nodes_[static_cast<size_t>(id)].requires_grad;
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

template <typename T>
Tensor<T>& Graph<T>::grad_of(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (n.grad.shape != val(n).shape) n.grad = Tensor<T>(val(n).shape);
  return n.grad;
}

template <typename T>
Var Graph<T>::constant(Tensor<T> value) {
  return input(std::move(value), false);
}

template <typename T>
Var Graph<T>::input(Tensor<T> value, bool requires_grad) {
  Var v = push(Op::kLeaf, {}, std::move(value));
  nodes_.back().requires_grad = requires_grad && grad_enabled_;
  return v;
}

template <typename T>
Var Graph<T>::param(Parameter<T>& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var{it->second};
  Var v = push(Op::kLeaf, {}, Tensor<T>());
  Node& n = nodes_.back();
  n.requires_grad = grad_enabled_;
  n.ref = &p.value;
  n.param = &p;
  param_nodes_.emplace(&p, v.id);
  return v;
}

template <typename T>
const Tensor<T>& Graph<T>::value(Var v) const {
  return val(v);
}

template <typename T>
Tensor<T> Graph<T>::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.shape == val(n).shape) return n.grad;
  return Tensor<T>(val(n).shape);
}

template <typename T>
bool Graph<T>::requires_grad(Var v) const {
  return node(v).requires_grad;
}

template <typename T>
Var Graph<T>::matmul(Var a, Var b) {
  const Tensor<T>& x = val(a);
  const Tensor<T>& y = val(b);
  if (x.cols() != y.rows()) {
    throw ShapeError("matmul: shapes " + shape_string(x.shape) + " and " + shape_string(y.shape) +
                     " are incompatible");
  }
  Tensor<T> out(x.rows(), y.cols());
  kernels::gemm_nn(x.rows(), y.cols(), x.cols(), x.data.data(), y.data.data(), out.data.data(), false);
  return push(Op::kMatmul, {a.id, b.id}, std::move(out));
}

template <typename T>
Var Graph<T>::add(Var a, Var b) {
  const Tensor<T>& x = val(a);
  const Tensor<T>& y = val(b);
  Tensor<T> out = x;
  if (x.shape == y.shape) {
    for (size_t i = 0; i < out.size(); ++i) out.data[i] += y.data[i];
  } else if (y.rows() == 1 && y.cols() == x.cols()) {
    const int cols = x.cols();
    for (int r = 0; r < x.rows(); ++r) {
      T* row = out.row(r);
      for (int c = 0; c < cols; ++c) row[c] += y.data[static_cast<size_t>(c)];
    }
  } else {
    throw ShapeError("add: shapes " + shape_string(x.shape) + " and " + shape_string(y.shape) +
                     " do not broadcast");
  }
  return push(Op::kAdd, {a.id, b.id}, std::move(out));
}

template <typename T>
Var Graph<T>::mul(Var a, Var b) {
  const Tensor<T>& x = val(a);
  const Tensor<T>& y = val(b);
  require_same_shape("mul", x, y);
  Tensor<T> out = x;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] *= y.data[i];
  return push(Op::kMul, {a.id, b.id}, std::move(out));
}

template <typename T>
Var Graph<T>::scale(Var a, T factor) {
  Tensor<T> out = val(a);
  for (T& x : out.data) x *= factor;
  Var v = push(Op::kScale, {a.id}, std::move(out));
  nodes_.back().factor = factor;
  return v;
}

template <typename T>
Var Graph<T>::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const int rows = val(parts[0]).rows();
  int cols = 0;
  std::vector<int> ids;
  for (Var p : parts) {
    const Tensor<T>& t = val(p);
    if (t.rows() != rows) {
      throw ShapeError("concat_cols: shapes " + shape_string(val(parts[0]).shape) + " and " +
                       shape_string(t.shape) + " have different row counts");
    }
    cols += t.cols();
    ids.push_back(p.id);
  }
  Tensor<T> out(rows, cols);
  int offset = 0;
  for (Var p : parts) {
    const Tensor<T>& t = val(p);
    const int w = t.cols();
    for (int r = 0; r < rows; ++r) std::copy(t.row(r), t.row(r) + w, out.row(r) + offset);
    offset += w;
  }
  return push(Op::kConcatCols, std::move(ids), std::move(out));
}

template <typename T>
Var Graph<T>::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const int cols = val(parts[0]).cols();
  int rows = 0;
  std::vector<int> ids;
  for (Var p : parts) {
    const Tensor<T>& t = val(p);
    if (t.cols() != cols) {
      throw ShapeError("concat_rows: shapes " + shape_string(val(parts[0]).shape) + " and " +
                       shape_string(t.shape) + " have different column counts");
    }
    rows += t.rows();
    ids.push_back(p.id);
  }
  Tensor<T> out(rows, cols);
  auto dst = out.data.begin();
  for (Var p : parts) dst = std::copy(val(p).data.begin(), val(p).data.end(), dst);
  return push(Op::kConcatRows, std::move(ids), std::move(out));
}

template <typename T>
Var Graph<T>::slice_cols(Var a, int begin, int end) {
  const Tensor<T>& x = val(a);
  if (begin < 0 || end > x.cols() || begin >= end) {
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") outside shape " + shape_string(x.shape));
  }
  Tensor<T> out(x.rows(), end - begin);
  for (int r = 0; r < x.rows(); ++r) std::copy(x.row(r) + begin, x.row(r) + end, out.row(r));
  Var v = push(Op::kSliceCols, {a.id}, std::move(out));
  nodes_.back().ints = {begin};
  return v;
}

template <typename T>
Var Graph<T>::slice_rows(Var a, int begin, int end) {
  const Tensor<T>& x = val(a);
  if (begin < 0 || end > x.rows() || begin >= end) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") outside shape " + shape_string(x.shape));
  }
  Tensor<T> out(end - begin, x.cols());
  std::copy(x.row(begin), x.row(end - 1) + x.cols(), out.data.begin());
  Var v = push(Op::kSliceRows, {a.id}, std::move(out));
  nodes_.back().ints = {begin};
  return v;
}

template <typename T>
Var Graph<T>::gather_rows(Var table, std::vector<int> ids) {
  const Tensor<T>& x = val(table);
  const int cols = x.cols();
  Tensor<T> out(static_cast<int>(ids.size()), cols);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= x.rows()) {
      throw std::out_of_range("gather_rows: index " + std::to_string(ids[i]) + " outside table of " +
                              std::to_string(x.rows()) + " rows");
    }
    std::copy(x.row(ids[i]), x.row(ids[i]) + cols, out.row(static_cast<int>(i)));
  }
  Var v = push(Op::kGather, {table.id}, std::move(out));
  nodes_.back().ints = std::move(ids);
  return v;
}

template <typename T>
Var Graph<T>::sigmoid(Var a) {
  Tensor<T> out = val(a);
  for (T& x : out.data) x = stable_sigmoid(x);
  return push(Op::kSigmoid, {a.id}, std::move(out));
}

template <typename T>
Var Graph<T>::tanh(Var a) {
  Tensor<T> out = val(a);
  for (T& x : out.data) x = std::tanh(x);
  return push(Op::kTanh, {a.id}, std::move(out));
}

template <typename T>
Var Graph<T>::softmax(Var a, std::vector<int> lengths) {
  const Tensor<T>& x = val(a);
  const int rows = x.rows(), cols = x.cols();
  if (!lengths.empty() && static_cast<int>(lengths.size()) != rows) {
    throw ShapeError("softmax: " + std::to_string(lengths.size()) + " lengths for shape " + shape_string(x.shape));
  }
  Tensor<T> out(x.shape);
  for (int r = 0; r < rows; ++r) {
    const int len = lengths.empty() ? cols : std::clamp(lengths[static_cast<size_t>(r)], 0, cols);
    softmax_row(x.row(r), out.row(r), cols, len);
  }
  return push(Op::kSoftmax, {a.id}, std::move(out));
}

template <typename T>
Var Graph<T>::log_softmax(Var a) {
  const Tensor<T>& x = val(a);
  Tensor<T> out = x;
  for (int r = 0; r < x.rows(); ++r) {
    const T lse = log_sum_exp(x.row(r), x.cols());
    T* row = out.row(r);
    for (int c = 0; c < x.cols(); ++c) row[c] -= lse;
  }
  return push(Op::kLogSoftmax, {a.id}, std::move(out));
}

template <typename T>
Var Graph<T>::dropout(Var a, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout probability must lie in [0, 1)");
  if (!training() || p == 0.0) return a;
  if (rng_ == nullptr) throw std::logic_error("dropout in training mode needs an Rng");
  const Tensor<T>& x = val(a);
  Tensor<T> mask(x.shape);
  const T keep = static_cast<T>(1.0 / (1.0 - p));
  for (T& m : mask.data) m = rng_->uniform() < p ? T(0) : keep;
  Tensor<T> out = x;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] *= mask.data[i];
  Var v = push(Op::kDropout, {a.id}, std::move(out));
  nodes_.back().saved = std::move(mask);
  return v;
}

template <typename T>
Var Graph<T>::cross_entropy(Var logits, std::vector<int> targets, std::vector<T> weights) {
  const Tensor<T>& x = val(logits);
  const int rows = x.rows(), cols = x.cols();
  if (static_cast<int>(targets.size()) != rows) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for logits " +
                     shape_string(x.shape));
  }
  if (weights.empty()) weights.assign(static_cast<size_t>(rows), T(1) / static_cast<T>(rows));
  if (static_cast<int>(weights.size()) != rows) {
    throw ShapeError("cross_entropy: " + std::to_string(weights.size()) + " weights for logits " +
                     shape_string(x.shape));
  }
  Tensor<T> probs(x.shape);
  T loss = 0;
  for (int r = 0; r < rows; ++r) {
    const int t = targets[static_cast<size_t>(r)];
    if (t < 0 || t >= cols) throw std::out_of_range("cross_entropy: target " + std::to_string(t) + " out of range");
    softmax_row(x.row(r), probs.row(r), cols, cols);
    const T w = weights[static_cast<size_t>(r)];
    if (w != T(0)) loss += w * (log_sum_exp(x.row(r), cols) - x.at(r, t));
  }
  Var v = push(Op::kCrossEntropy, {logits.id}, Tensor<T>(Shape{1}, std::vector<T>{loss}));
  Node& n = nodes_.back();
  n.saved = std::move(probs);
  n.ints = std::move(targets);
  n.reals = std::move(weights);
  return v;
}

template <typename T>
Var Graph<T>::sum(Var a) {
  T total = 0;
  for (T x : val(a).data) total += x;
  return push(Op::kSum, {a.id}, Tensor<T>(Shape{1}, std::vector<T>{total}));
}

template <typename T>
Var Graph<T>::lstm_cell(Var gates, Var cell) {
  const Tensor<T>& g = val(gates);
  const Tensor<T>& c = val(cell);
  const int batch = c.rows(), h = c.cols();
  if (g.rows() != batch || g.cols() != 4 * h) {
    throw ShapeError("lstm_cell: gates " + shape_string(g.shape) + " do not match cell " + shape_string(c.shape));
  }
  Tensor<T> act(g.shape);
  Tensor<T> out(batch, 2 * h);
  for (int b = 0; b < batch; ++b) {
    const T* pre = g.row(b);
    T* a = act.row(b);
    for (int j = 0; j < h; ++j) {
      a[j] = stable_sigmoid(pre[j]);
      a[h + j] = stable_sigmoid(pre[h + j]);
      a[2 * h + j] = std::tanh(pre[2 * h + j]);
      a[3 * h + j] = stable_sigmoid(pre[3 * h + j]);
    }
    const T* cp = c.row(b);
    T* o = out.row(b);
    for (int j = 0; j < h; ++j) {
      const T cn = a[h + j] * cp[j] + a[j] * a[2 * h + j];
      o[h + j] = cn;
      o[j] = a[3 * h + j] * std::tanh(cn);
    }
  }
  Var v = push(Op::kLstmCell, {gates.id, cell.id}, std::move(out));
  nodes_.back().saved = std::move(act);
  return v;
}

template <typename T>
Var Graph<T>::attention_scores(Var memory, Var query, int steps) {
  const Tensor<T>& m = val(memory);
  const Tensor<T>& q = val(query);
  const int batch = q.rows(), d = q.cols();
  if (steps <= 0 || m.cols() != d || m.rows() % steps != 0 ||
      (m.rows() / steps != batch && m.rows() / steps != 1)) {
    throw ShapeError("attention_scores: memory " + shape_string(m.shape) + " and query " + shape_string(q.shape) +
                     " incompatible with " + std::to_string(steps) + " steps");
  }
  const bool shared = m.rows() / steps != batch || batch == 1;
  Tensor<T> out(batch, steps);
  if (shared) {
    kernels::gemm_nt(batch, steps, d, q.data.data(), m.data.data(), out.data.data(), false);
  } else {
    for (int b = 0; b < batch; ++b) {
      kernels::gemm_nt(1, steps, d, q.row(b), m.row(b * steps), out.row(b), false);
    }
  }
  Var v = push(Op::kAttnScores, {memory.id, query.id}, std::move(out));
  nodes_.back().ints = {steps, shared ? 1 : 0};
  return v;
}

template <typename T>
Var Graph<T>::attention_context(Var weights, Var memory, int steps) {
  const Tensor<T>& w = val(weights);
  const Tensor<T>& m = val(memory);
  const int batch = w.rows(), d = m.cols();
  if (steps <= 0 || w.cols() != steps || m.rows() % steps != 0 ||
      (m.rows() / steps != batch && m.rows() / steps != 1)) {
    throw ShapeError("attention_context: weights " + shape_string(w.shape) + " and memory " + shape_string(m.shape) +
                     " incompatible with " + std::to_string(steps) + " steps");
  }
  const bool shared = m.rows() / steps != batch || batch == 1;
  Tensor<T> out(batch, d);
  if (shared) {
    kernels::gemm_nn(batch, d, steps, w.data.data(), m.data.data(), out.data.data(), false);
  } else {
    for (int b = 0; b < batch; ++b) {
      kernels::gemm_nn(1, d, steps, w.row(b), m.row(b * steps), out.row(b), false);
    }
  }
  Var v = push(Op::kAttnContext, {weights.id, memory.id}, std::move(out));
  nodes_.back().ints = {steps, shared ? 1 : 0};
  return v;
}

template <typename T>
void Graph<T>::backward(Var loss) {
  Node& root = node(loss);
  if (val(root).size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " + shape_string(val(root).shape));
  }
  if (backward_done_) throw std::logic_error("backward: graph already differentiated");
  backward_done_ = true;
  if (!root.requires_grad) return;
  grad_of(loss.id).data[0] = T(1);
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.requires_grad || n.grad.shape != val(n).shape) continue;
    if (n.op == Op::kLeaf) {
      if (n.param != nullptr) {
        auto& dst = n.param->grad.data;
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += n.grad.data[i];
      }
      continue;
    }
    backward_node(id);
  }
}

template <typename T>
void Graph<T>::backward_node(int id) {
  // Gradients of inputs that do not require them are skipped; grad_of() may
  // reallocate nothing but the target tensor, so `n` stays valid.
  Node& n = nodes_[static_cast<size_t>(id)];
  const Tensor<T>& g = n.grad;
  auto wants = [&](size_t k) { return nodes_[static_cast<size_t>(n.inputs[k])].requires_grad; };
  auto in_value = [&](size_t k) -> const Tensor<T>& { return val(Var{n.inputs[k]}); };

  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kMatmul: {
      const Tensor<T>& a = in_value(0);
      const Tensor<T>& b = in_value(1);
      const int m = a.rows(), k = a.cols(), cols = b.cols();
      if (wants(0)) kernels::gemm_nt(m, k, cols, g.data.data(), b.data.data(), grad_of(n.inputs[0]).data.data(), true);
      if (wants(1)) kernels::gemm_tn(k, cols, m, a.data.data(), g.data.data(), grad_of(n.inputs[1]).data.data(), true);
      break;
    }
    case Op::kAdd: {
      if (wants(0)) {
        auto& ga = grad_of(n.inputs[0]).data;
        for (size_t i = 0; i < ga.size(); ++i) ga[i] += g.data[i];
      }
      if (wants(1)) {
        auto& gb = grad_of(n.inputs[1]);
        if (gb.size() == g.size()) {
          for (size_t i = 0; i < gb.size(); ++i) gb.data[i] += g.data[i];
        } else {
          const int cols = g.cols();
          for (int r = 0; r < g.rows(); ++r) {
            const T* row = g.row(r);
            for (int c = 0; c < cols; ++c) gb.data[static_cast<size_t>(c)] += row[c];
          }
        }
      }
      break;
    }
    case Op::kMul: {
      const Tensor<T>& a = in_value(0);
      const Tensor<T>& b = in_value(1);
      if (wants(0)) {
        auto& ga = grad_of(n.inputs[0]).data;
        for (size_t i = 0; i < ga.size(); ++i) ga[i] += g.data[i] * b.data[i];
      }
      if (wants(1)) {
        auto& gb = grad_of(n.inputs[1]).data;
        for (size_t i = 0; i < gb.size(); ++i) gb[i] += g.data[i] * a.data[i];
      }
      break;
    }
    case Op::kScale: {
      auto& ga = grad_of(n.inputs[0]).data;
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += n.factor * g.data[i];
      break;
    }
    case Op::kConcatCols: {
      int offset = 0;
      for (size_t k = 0; k < n.inputs.size(); ++k) {
        const int w = in_value(k).cols();
        if (wants(k)) {
          Tensor<T>& gi = grad_of(n.inputs[k]);
          for (int r = 0; r < g.rows(); ++r) {
            const T* src = g.row(r) + offset;
            T* dst = gi.row(r);
            for (int c = 0; c < w; ++c) dst[c] += src[c];
          }
        }
        offset += w;
      }
      break;
    }
    case Op::kConcatRows: {
      size_t offset = 0;
      for (size_t k = 0; k < n.inputs.size(); ++k) {
        const size_t len = in_value(k).size();
        if (wants(k)) {
          auto& gi = grad_of(n.inputs[k]).data;
          for (size_t i = 0; i < len; ++i) gi[i] += g.data[offset + i];
        }
        offset += len;
      }
      break;
    }
    case Op::kSliceCols: {
      Tensor<T>& gi = grad_of(n.inputs[0]);
      const int begin = n.ints[0], w = g.cols();
      for (int r = 0; r < g.rows(); ++r) {
        T* dst = gi.row(r) + begin;
        const T* src = g.row(r);
        for (int c = 0; c < w; ++c) dst[c] += src[c];
      }
      break;
    }
    case Op::kSliceRows: {
      Tensor<T>& gi = grad_of(n.inputs[0]);
      T* dst = gi.row(n.ints[0]);
      for (size_t i = 0; i < g.size(); ++i) dst[i] += g.data[i];
      break;
    }
    case Op::kGather: {
      Tensor<T>& gi = grad_of(n.inputs[0]);
      const int cols = g.cols();
      for (size_t i = 0; i < n.ints.size(); ++i) {
        T* dst = gi.row(n.ints[i]);
        const T* src = g.row(static_cast<int>(i));
        for (int c = 0; c < cols; ++c) dst[c] += src[c];
      }
      break;
    }
    case Op::kSigmoid: {
      auto& gi = grad_of(n.inputs[0]).data;
      for (size_t i = 0; i < gi.size(); ++i) {
        const T y = n.value.data[i];
        gi[i] += g.data[i] * y * (T(1) - y);
      }
      break;
    }
    case Op::kTanh: {
      auto& gi = grad_of(n.inputs[0]).data;
      for (size_t i = 0; i < gi.size(); ++i) {
        const T y = n.value.data[i];
        gi[i] += g.data[i] * (T(1) - y * y);
      }
      break;
    }
    case Op::kSoftmax: {
      Tensor<T>& gi = grad_of(n.inputs[0]);
      const int cols = g.cols();
      for (int r = 0; r < g.rows(); ++r) {
        const T* y = n.value.row(r);
        const T* gy = g.row(r);
        T dot = 0;
        for (int c = 0; c < cols; ++c) dot += gy[c] * y[c];
        T* dst = gi.row(r);
        for (int c = 0; c < cols; ++c) dst[c] += y[c] * (gy[c] - dot);
      }
      break;
    }
    case Op::kLogSoftmax: {
      Tensor<T>& gi = grad_of(n.inputs[0]);
      const int cols = g.cols();
      for (int r = 0; r < g.rows(); ++r) {
        const T* y = n.value.row(r);
        const T* gy = g.row(r);
        T total = 0;
        for (int c = 0; c < cols; ++c) total += gy[c];
        T* dst = gi.row(r);
        for (int c = 0; c < cols; ++c) dst[c] += gy[c] - std::exp(y[c]) * total;
      }
      break;
    }
    case Op::kDropout: {
      auto& gi = grad_of(n.inputs[0]).data;
      for (size_t i = 0; i < gi.size(); ++i) gi[i] += g.data[i] * n.saved.data[i];
      break;
    }
    case Op::kCrossEntropy: {
      Tensor<T>& gi = grad_of(n.inputs[0]);
      const T seed = g.data[0];
      const int cols = gi.cols();
      for (int r = 0; r < gi.rows(); ++r) {
        const T w = n.reals[static_cast<size_t>(r)] * seed;
        if (w == T(0)) continue;
        const T* p = n.saved.row(r);
        T* dst = gi.row(r);
        for (int c = 0; c < cols; ++c) dst[c] += w * p[c];
        dst[n.ints[static_cast<size_t>(r)]] -= w;
      }
      break;
    }
    case Op::kSum: {
      auto& gi = grad_of(n.inputs[0]).data;
      const T seed = g.data[0];
      for (T& x : gi) x += seed;
      break;
    }
    case Op::kLstmCell: {
      const Tensor<T>& cprev = in_value(1);
      const int batch = cprev.rows(), h = cprev.cols();
      const bool want_gates = wants(0), want_cell = wants(1);
      Tensor<T>* gg = want_gates ? &grad_of(n.inputs[0]) : nullptr;
      Tensor<T>* gc = want_cell ? &grad_of(n.inputs[1]) : nullptr;
      for (int b = 0; b < batch; ++b) {
        const T* a = n.saved.row(b);
        const T* out = n.value.row(b);
        const T* dout = g.row(b);
        const T* cp = cprev.row(b);
        for (int j = 0; j < h; ++j) {
          const T i_g = a[j], f_g = a[h + j], c_g = a[2 * h + j], o_g = a[3 * h + j];
          const T tc = std::tanh(out[h + j]);
          const T dh = dout[j];
          const T dc = dout[h + j] + dh * o_g * (T(1) - tc * tc);
          if (gg != nullptr) {
            T* dg = gg->row(b);
            dg[j] += dc * c_g * i_g * (T(1) - i_g);
            dg[h + j] += dc * cp[j] * f_g * (T(1) - f_g);
            dg[2 * h + j] += dc * i_g * (T(1) - c_g * c_g);
            dg[3 * h + j] += dh * tc * o_g * (T(1) - o_g);
          }
          if (gc != nullptr) gc->row(b)[j] += dc * f_g;
        }
      }
      break;
    }
    case Op::kAttnScores: {
      const Tensor<T>& m = in_value(0);
      const Tensor<T>& q = in_value(1);
      const int steps = n.ints[0], batch = q.rows(), d = q.cols();
      const bool shared = n.ints[1] != 0;
      if (wants(0)) {
        Tensor<T>& gm = grad_of(n.inputs[0]);
        if (shared) {
          kernels::gemm_tn(steps, d, batch, g.data.data(), q.data.data(), gm.data.data(), true);
        } else {
          for (int b = 0; b < batch; ++b) kernels::gemm_tn(steps, d, 1, g.row(b), q.row(b), gm.row(b * steps), true);
        }
      }
      if (wants(1)) {
        Tensor<T>& gq = grad_of(n.inputs[1]);
        if (shared) {
          kernels::gemm_nn(batch, d, steps, g.data.data(), m.data.data(), gq.data.data(), true);
        } else {
          for (int b = 0; b < batch; ++b) kernels::gemm_nn(1, d, steps, g.row(b), m.row(b * steps), gq.row(b), true);
        }
      }
      break;
    }
    case Op::kAttnContext: {
      const Tensor<T>& w = in_value(0);
      const Tensor<T>& m = in_value(1);
      const int steps = n.ints[0], batch = w.rows(), d = m.cols();
      const bool shared = n.ints[1] != 0;
      if (wants(0)) {
        Tensor<T>& gw = grad_of(n.inputs[0]);
        if (shared) {
          kernels::gemm_nt(batch, steps, d, g.data.data(), m.data.data(), gw.data.data(), true);
        } else {
          for (int b = 0; b < batch; ++b) kernels::gemm_nt(1, steps, d, g.row(b), m.row(b * steps), gw.row(b), true);
        }
      }
      if (wants(1)) {
        Tensor<T>& gm = grad_of(n.inputs[1]);
        if (shared) {
          kernels::gemm_tn(steps, d, batch, w.data.data(), g.data.data(), gm.data.data(), true);
        } else {
          for (int b = 0; b < batch; ++b) kernels::gemm_tn(steps, d, 1, w.row(b), g.row(b), gm.row(b * steps), true);
        }
      }
      break;
    }
  }
}

template class Graph<float>;
template class Graph<double>;

}  // namespace lacuna::ad
