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


#ifndef LACUNA_MODEL_SEQ2SEQ_HPP_
#define LACUNA_MODEL_SEQ2SEQ_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacuna/autodiff/graph.hpp"
#include "lacuna/autodiff/parameters.hpp"
#include "lacuna/autodiff/rng.hpp"
#include "lacuna/model/config.hpp"
#include "lacuna/text/vocab.hpp"

namespace lacuna::model {

using ad::Graph;
using ad::ParameterStore;
using ad::Shape;
using ad::Tensor;
using ad::Var;

// Ordered (name, shape) list that defines a model's parameters. Variants
// share every decoder entry; they differ only in encoder directions and the
// word table.
std::vector<std::pair<std::string, Shape>> parameter_manifest(const ModelConfig& config);

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], fan_in being the first
// dimension (rows of a weight or embedding table). Biases start at zero
// except the forget gate, which starts at one.
template <typename T>
ParameterStore<T> init_parameters(const ModelConfig& config, ad::Rng& rng);

// Encoded batch: sequences may have different lengths.
struct EncoderOutput {
  int batch = 0;
  int steps = 0;                // longest sequence
  std::vector<int> lengths;     // per row
  Var memory;                   // [batch*steps, encoder_width], row b*steps+t
  Var keys;                     // memory projected for scoring, [batch*steps, hidden]
  std::vector<Var> init_state;  // per decoder layer, [batch, 2*hidden] = (h | c)
};

struct DecoderState {
  std::vector<Var> layers;  // [rows, 2*hidden] each
  Var feed;                 // previous attentional vector, [rows, hidden]
};

struct StepOutput {
  Var logits;     // [rows, alphabet]
  Var attention;  // [rows, steps]
  DecoderState state;
};

template <typename T>
EncoderOutput encode(Graph<T>& g, ParameterStore<T>& params, const ModelConfig& config,
                     std::span<const text::EncodedSequence* const> batch);

template <typename T>
DecoderState initial_state(Graph<T>& g, const ModelConfig& config, const EncoderOutput& enc);

// Reorders (or replicates) decoder rows, e.g. to follow beam parents.
template <typename T>
DecoderState select_rows(Graph<T>& g, const DecoderState& state, const std::vector<int>& rows);

// One decoder step for each state row. When the encoder ran on a single
// sequence, any number of rows may share its memory.
template <typename T>
StepOutput decode_step(Graph<T>& g, ParameterStore<T>& params, const ModelConfig& config, const EncoderOutput& enc,
                       const DecoderState& state, const std::vector<int>& prev_ids);

struct LossExample {
  const text::EncodedSequence* input = nullptr;
  std::vector<int> target;  // char ids, one per '?' in the input
};

// Mean over examples of the mean per-step cross-entropy. At each step after
// the first, with probability scheduled_p the previous input is the argmax
// of the model's own logits instead of the true character.
template <typename T>
Var forward_loss(Graph<T>& g, ParameterStore<T>& params, const ModelConfig& config,
                 std::span<const LossExample> batch, double scheduled_p, ad::Rng* rng);

// Greedy rollout of exactly predict_count() characters.
template <typename T>
std::vector<int> greedy_decode(ParameterStore<T>& params, const ModelConfig& config, const text::EncodedSequence& seq);

// Logits of each teacher-forced step, [L, alphabet], in inference mode.
template <typename T>
Tensor<T> teacher_forced_logits(ParameterStore<T>& params, const ModelConfig& config,
                                const text::EncodedSequence& seq, const std::vector<int>& target);

}  // namespace lacuna::model

#endif  // LACUNA_MODEL_SEQ2SEQ_HPP_
