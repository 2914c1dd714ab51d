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


#ifndef LACUNA_AUTODIFF_GRAPH_HPP_
#define LACUNA_AUTODIFF_GRAPH_HPP_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "lacuna/autodiff/parameters.hpp"
#include "lacuna/autodiff/rng.hpp"
#include "lacuna/autodiff/tensor.hpp"

namespace lacuna::ad {

// Handle to a node on a Graph.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

enum class Mode { kInference, kTraining };

// Define-by-run tape. Every operation evaluates immediately and, when any
// input needs a gradient, remembers enough to run backward() later. Operands
// are matrices: the last dimension is the column count and everything before
// it is folded into rows. A scalar is a one-element tensor.
//
// A graph is single-threaded and single-use: build, call backward() once,
// drop it.
template <typename T>
class Graph {
 public:
  explicit Graph(Mode mode = Mode::kInference, Rng* rng = nullptr);

  bool training() const { return mode_ == Mode::kTraining; }
  // Gradient tracking is on in training mode and off otherwise unless set.
  bool grad_enabled() const { return grad_enabled_; }
  void set_grad_enabled(bool on) { grad_enabled_ = on; }
  size_t node_count() const { return nodes_.size(); }

  Var constant(Tensor<T> value);
  // Leaf whose gradient is read back with grad().
  Var input(Tensor<T> value, bool requires_grad = true);
  // Leaf bound to a parameter; backward() adds into p.grad. The value is
  // read in place, not copied, so the parameter must outlive the graph.
  // Repeated calls with the same parameter return the same node.
  Var param(Parameter<T>& p);

  const Tensor<T>& value(Var v) const;
  Tensor<T> grad(Var v) const;  // zeros when nothing flowed back
  bool requires_grad(Var v) const;

  Var matmul(Var a, Var b);                        // [M,K] x [K,N]
  Var add(Var a, Var b);                           // b may be a [1,N] bias row
  Var mul(Var a, Var b);                           // elementwise
  Var scale(Var a, T factor);
  Var concat_cols(std::span<const Var> parts);
  Var concat_rows(std::span<const Var> parts);
  Var slice_cols(Var a, int begin, int end);
  Var slice_rows(Var a, int begin, int end);
  Var gather_rows(Var table, std::vector<int> ids);  // embedding lookup
  Var sigmoid(Var a);
  Var tanh(Var a);
  // Row softmax. With `lengths`, row r only spans its first lengths[r]
  // columns and the rest are exactly zero.
  Var softmax(Var a, std::vector<int> lengths = {});
  Var log_softmax(Var a);
  // Inverted dropout; identity outside training mode or when p == 0.
  Var dropout(Var a, double p);
  // Sum over rows of weight[r] * -log softmax(logits)[r, target[r]]. Without
  // weights every row counts 1/rows, giving the mean.
  Var cross_entropy(Var logits, std::vector<int> targets, std::vector<T> weights = {});
  Var sum(Var a);

  // Fused LSTM cell. `gates` is [B,4H] pre-activations ordered input, forget,
  // candidate, output; `cell` is [B,H]. Returns [B,2H] holding (h | c).
  Var lstm_cell(Var gates, Var cell);

  // Dot-product scores of each query row against `steps` consecutive memory
  // rows. memory is [Bm*steps, D], query [B,D]; Bm is B or 1 (shared memory,
  // as in beam search). Returns [B, steps].
  Var attention_scores(Var memory, Var query, int steps);
  // Weighted sum of memory rows: weights [B, steps] -> [B, D].
  Var attention_context(Var weights, Var memory, int steps);

  // Reverse pass from a scalar. Allowed once per graph.
  void backward(Var loss);

 private:
  enum class Op : uint8_t {
    kLeaf, kMatmul, kAdd, kMul, kScale, kConcatCols, kConcatRows, kSliceCols, kSliceRows,
    kGather, kSigmoid, kTanh, kSoftmax, kLogSoftmax, kDropout, kCrossEntropy, kSum,
    kLstmCell, kAttnScores, kAttnContext,
  };

  struct Node {
    Op op = Op::kLeaf;
    bool requires_grad = false;
    std::vector<int> inputs;
    Tensor<T> value;
    Tensor<T> grad;        // allocated on first use
    Tensor<T> saved;       // op-specific intermediate
    std::vector<int> ints; // op-specific integers
    std::vector<T> reals;  // op-specific reals
    T factor = T(1);
    Parameter<T>* param = nullptr;
    const Tensor<T>* ref = nullptr;  // parameter leaves read the store directly
  };

  Node& node(Var v);
  const Tensor<T>& val(const Node& n) const { return n.ref != nullptr ? *n.ref : n.value; }
  const Tensor<T>& val(Var v) const { return val(node(v)); }
  const Node& node(Var v) const;
  Var push(Op op, std::vector<int> inputs, Tensor<T> value);
  Tensor<T>& grad_of(int id);
  void backward_node(int id);

  Mode mode_;
  Rng* rng_;
  bool grad_enabled_;
  bool backward_done_ = false;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter<T>*, int> param_nodes_;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace lacuna::ad

#endif  // LACUNA_AUTODIFF_GRAPH_HPP_
