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


#include "lacuna/model/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lacuna/text/alphabet.hpp"

namespace lacuna::model {

namespace {

using text::CharAlphabet;

std::string layer_prefix(const char* part, int layer) { return std::string(part) + "/l" + std::to_string(layer); }

const char* direction_name(int d) { return d == 0 ? "fwd" : "bwd"; }

struct LayerRun {
  std::vector<Var> cells;  // per processing step, [batch, 2*hidden]
  Var outputs;             // h for every step, [steps*batch, hidden], time-major
};

// One LSTM layer over a time-major input [steps*batch, in]. The input
// projection for every step is a single product.
template <typename T>
LayerRun run_lstm(Graph<T>& g, ParameterStore<T>& params, const std::string& prefix, Var x, int steps, int batch,
                  int hidden) {
  Var wx = g.param(params.get(prefix + "/wx"));
  Var wh = g.param(params.get(prefix + "/wh"));
  Var b = g.param(params.get(prefix + "/b"));
  Var projected = g.add(g.matmul(x, wx), b);
  Var c = g.constant(Tensor<T>(batch, hidden));
  Var h;
  LayerRun run;
  std::vector<Var> hs;
  for (int t = 0; t < steps; ++t) {
    Var gates = g.slice_rows(projected, t * batch, (t + 1) * batch);
    if (t > 0) gates = g.add(gates, g.matmul(h, wh));
    Var cell = g.lstm_cell(gates, c);
    h = g.slice_cols(cell, 0, hidden);
    c = g.slice_cols(cell, hidden, 2 * hidden);
    run.cells.push_back(cell);
    hs.push_back(h);
  }
  run.outputs = g.concat_rows(hs);
  return run;
}

template <typename T>
int argmax_output(const T* row, int cols) {
  int best = CharAlphabet::kSpaceId;
  for (int c = CharAlphabet::kSpaceId + 1; c < cols; ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

void check_sequence(const text::EncodedSequence& seq, const ModelConfig& config) {
  if (seq.size() == 0) throw std::invalid_argument("cannot encode an empty sequence");
  if (seq.word_ids.size() != seq.size() || seq.predict_mask.size() != seq.size()) {
    throw std::invalid_argument("encoded sequence streams are not aligned");
  }
  for (size_t i = 0; i < seq.size(); ++i) {
    if (seq.char_ids[i] < 0 || seq.char_ids[i] >= config.alphabet_size) {
      throw std::out_of_range("character id " + std::to_string(seq.char_ids[i]) + " at position " + std::to_string(i) +
                              " outside alphabet of " + std::to_string(config.alphabet_size));
    }
    if (config.uses_words() && (seq.word_ids[i] < 0 || seq.word_ids[i] >= config.vocab_size)) {
      throw std::out_of_range("word id " + std::to_string(seq.word_ids[i]) + " at position " + std::to_string(i) +
                              " outside vocabulary of " + std::to_string(config.vocab_size));
    }
  }
}

}  // namespace

std::vector<std::pair<std::string, Shape>> parameter_manifest(const ModelConfig& config) {
  config.validate();
  const int h = config.hidden;
  std::vector<std::pair<std::string, Shape>> m;
  m.push_back({"embed/char", {config.alphabet_size, config.char_embedding}});
  if (config.uses_words()) m.push_back({"embed/word", {config.vocab_size, config.word_embedding}});
  for (int l = 0; l < config.layers; ++l) {
    const int in = l == 0 ? config.encoder_input() : config.encoder_width();
    for (int d = 0; d < config.directions(); ++d) {
      const std::string p = layer_prefix("enc", l) + "/" + direction_name(d);
      m.push_back({p + "/wx", {in, 4 * h}});
      m.push_back({p + "/wh", {h, 4 * h}});
      m.push_back({p + "/b", {1, 4 * h}});
    }
  }
  for (int l = 0; l < config.layers; ++l) {
    m.push_back({layer_prefix("bridge", l) + "/w", {2 * h * config.directions(), 2 * h}});
    m.push_back({layer_prefix("bridge", l) + "/b", {1, 2 * h}});
  }
  for (int l = 0; l < config.layers; ++l) {
    const int in = l == 0 ? config.char_embedding + h : h;
    m.push_back({layer_prefix("dec", l) + "/wx", {in, 4 * h}});
    m.push_back({layer_prefix("dec", l) + "/wh", {h, 4 * h}});
    m.push_back({layer_prefix("dec", l) + "/b", {1, 4 * h}});
  }
  m.push_back({"attn/w", {config.encoder_width(), h}});
  m.push_back({"out/combine/w", {h + config.encoder_width(), h}});
  m.push_back({"out/combine/b", {1, h}});
  m.push_back({"out/proj/w", {h, config.alphabet_size}});
  m.push_back({"out/proj/b", {1, config.alphabet_size}});
  return m;
}

template <typename T>
ParameterStore<T> init_parameters(const ModelConfig& config, ad::Rng& rng) {
  ParameterStore<T> store;
  for (auto& [name, shape] : parameter_manifest(config)) {
    auto& p = store.add(name, shape);
    const bool bias = name.size() >= 2 && name.compare(name.size() - 2, 2, "/b") == 0;
    if (bias) {
      // Forget-gate slice of LSTM biases.
      if (shape[1] == 4 * config.hidden && name.rfind("bridge", 0) != 0) {
        for (int j = config.hidden; j < 2 * config.hidden; ++j) p.value.data[static_cast<size_t>(j)] = T(1);
      }
      continue;
    }
    const double k = 1.0 / std::sqrt(static_cast<double>(shape[0]));
    for (T& v : p.value.data) v = static_cast<T>(rng.uniform(-k, k));
  }
  return store;
}

template <typename T>
EncoderOutput encode(Graph<T>& g, ParameterStore<T>& params, const ModelConfig& config,
                     std::span<const text::EncodedSequence* const> batch) {
  if (batch.empty()) throw std::invalid_argument("encode: empty batch");
  EncoderOutput enc;
  enc.batch = static_cast<int>(batch.size());
  for (const auto* seq : batch) {
    check_sequence(*seq, config);
    enc.lengths.push_back(static_cast<int>(seq->size()));
    enc.steps = std::max(enc.steps, static_cast<int>(seq->size()));
  }
  const int B = enc.batch, T_ = enc.steps, H = config.hidden;

  // Time-major ids, padded.
  std::vector<int> char_ids(static_cast<size_t>(B * T_), CharAlphabet::kPadId);
  std::vector<int> word_ids(static_cast<size_t>(B * T_), text::WordVocab::kNoWordId);
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < enc.lengths[static_cast<size_t>(b)]; ++t) {
      char_ids[static_cast<size_t>(t * B + b)] = batch[static_cast<size_t>(b)]->char_ids[static_cast<size_t>(t)];
      word_ids[static_cast<size_t>(t * B + b)] = batch[static_cast<size_t>(b)]->word_ids[static_cast<size_t>(t)];
    }
  }
  // Row permutation that reverses each sequence within its own length; it is
  // its own inverse, and padding rows map to themselves.
  std::vector<int> reverse(static_cast<size_t>(B * T_));
  for (int t = 0; t < T_; ++t) {
    for (int b = 0; b < B; ++b) {
      const int len = enc.lengths[static_cast<size_t>(b)];
      reverse[static_cast<size_t>(t * B + b)] = t < len ? (len - 1 - t) * B + b : t * B + b;
    }
  }
  std::vector<int> last_step(static_cast<size_t>(B));
  for (int b = 0; b < B; ++b) last_step[static_cast<size_t>(b)] = (enc.lengths[static_cast<size_t>(b)] - 1) * B + b;

  Var x = g.gather_rows(g.param(params.get("embed/char")), char_ids);
  if (config.uses_words()) {
    Var parts[] = {x, g.gather_rows(g.param(params.get("embed/word")), word_ids)};
    x = g.concat_cols(parts);
  }
  x = g.dropout(x, config.dropout);

  std::vector<Var> finals;  // per layer, [B, dirs*2H]
  for (int l = 0; l < config.layers; ++l) {
    std::vector<Var> outs, ends;
    for (int d = 0; d < config.directions(); ++d) {
      const std::string prefix = layer_prefix("enc", l) + "/" + direction_name(d);
      Var in = d == 0 ? x : g.gather_rows(x, reverse);
      LayerRun run = run_lstm(g, params, prefix, in, T_, B, H);
      outs.push_back(d == 0 ? run.outputs : g.gather_rows(run.outputs, reverse));
      ends.push_back(g.gather_rows(g.concat_rows(run.cells), last_step));
    }
    x = outs.size() == 1 ? outs[0] : g.concat_cols(outs);
    finals.push_back(ends.size() == 1 ? ends[0] : g.concat_cols(ends));
    if (l + 1 < config.layers) x = g.dropout(x, config.dropout);
  }

  std::vector<int> batch_major(static_cast<size_t>(B * T_));
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < T_; ++t) batch_major[static_cast<size_t>(b * T_ + t)] = t * B + b;
  }
  enc.memory = g.gather_rows(x, batch_major);
  enc.keys = g.matmul(enc.memory, g.param(params.get("attn/w")));
  for (int l = 0; l < config.layers; ++l) {
    Var w = g.param(params.get(layer_prefix("bridge", l) + "/w"));
    Var b = g.param(params.get(layer_prefix("bridge", l) + "/b"));
    enc.init_state.push_back(g.add(g.matmul(finals[static_cast<size_t>(l)], w), b));
  }
  return enc;
}

template <typename T>
DecoderState initial_state(Graph<T>& g, const ModelConfig& config, const EncoderOutput& enc) {
  DecoderState s;
  s.layers = enc.init_state;
  s.feed = g.constant(Tensor<T>(enc.batch, config.hidden));
  return s;
}

template <typename T>
DecoderState select_rows(Graph<T>& g, const DecoderState& state, const std::vector<int>& rows) {
  DecoderState s;
  for (Var v : state.layers) s.layers.push_back(g.gather_rows(v, rows));
  s.feed = g.gather_rows(state.feed, rows);
  return s;
}

template <typename T>
StepOutput decode_step(Graph<T>& g, ParameterStore<T>& params, const ModelConfig& config, const EncoderOutput& enc,
                       const DecoderState& state, const std::vector<int>& prev_ids) {
  const int H = config.hidden;
  const int rows = g.value(state.feed).rows();
  if (static_cast<int>(prev_ids.size()) != rows) throw std::invalid_argument("decode_step: one previous id per row");
  if (enc.batch != rows && enc.batch != 1) throw std::invalid_argument("decode_step: rows do not match the encoder batch");

  Var emb = g.gather_rows(g.param(params.get("embed/char")), prev_ids);
  Var parts[] = {emb, state.feed};
  Var x = g.dropout(g.concat_cols(parts), config.dropout);
  StepOutput out;
  for (int l = 0; l < config.layers; ++l) {
    const std::string p = layer_prefix("dec", l);
    Var prev = state.layers[static_cast<size_t>(l)];
    Var h = g.slice_cols(prev, 0, H);
    Var c = g.slice_cols(prev, H, 2 * H);
    Var gates = g.add(g.add(g.matmul(x, g.param(params.get(p + "/wx"))), g.matmul(h, g.param(params.get(p + "/wh")))),
                      g.param(params.get(p + "/b")));
    Var cell = g.lstm_cell(gates, c);
    out.state.layers.push_back(cell);
    x = g.slice_cols(cell, 0, H);
    if (l + 1 < config.layers) x = g.dropout(x, config.dropout);
  }
  std::vector<int> lengths;
  if (enc.batch == rows) {
    lengths = enc.lengths;
  } else {
    lengths.assign(static_cast<size_t>(rows), enc.lengths[0]);
  }
  out.attention = g.softmax(g.attention_scores(enc.keys, x, enc.steps), std::move(lengths));
  Var context = g.attention_context(out.attention, enc.memory, enc.steps);
  Var both[] = {x, context};
  Var combined = g.tanh(g.add(g.matmul(g.concat_cols(both), g.param(params.get("out/combine/w"))),
                              g.param(params.get("out/combine/b"))));
  out.state.feed = combined;
  out.logits = g.add(g.matmul(g.dropout(combined, config.dropout), g.param(params.get("out/proj/w"))),
                     g.param(params.get("out/proj/b")));
  return out;
}

template <typename T>
Var forward_loss(Graph<T>& g, ParameterStore<T>& params, const ModelConfig& config,
                 std::span<const LossExample> batch, double scheduled_p, ad::Rng* rng) {
  if (batch.empty()) throw std::invalid_argument("forward_loss: empty batch");
  if (scheduled_p < 0.0 || scheduled_p > 1.0) throw std::invalid_argument("scheduled sampling probability outside [0, 1]");
  if (scheduled_p > 0.0 && rng == nullptr) throw std::invalid_argument("scheduled sampling needs an Rng");
  std::vector<const text::EncodedSequence*> inputs;
  int steps = 0;
  for (const auto& ex : batch) {
    const int expected = ex.input->predict_count();
    if (static_cast<int>(ex.target.size()) != expected || expected == 0) {
      throw std::invalid_argument("target length " + std::to_string(ex.target.size()) + " does not match " +
                                  std::to_string(expected) + " masked positions");
    }
    inputs.push_back(ex.input);
    steps = std::max(steps, expected);
  }
  const int B = static_cast<int>(batch.size());
  EncoderOutput enc = encode(g, params, config, inputs);
  DecoderState state = initial_state(g, config, enc);

  std::vector<Var> logits;
  std::vector<int> targets;
  std::vector<T> weights;
  std::vector<int> prev(static_cast<size_t>(B), CharAlphabet::kStartId);
  for (int j = 0; j < steps; ++j) {
    StepOutput step = decode_step(g, params, config, enc, state, prev);
    const Tensor<T>& values = g.value(step.logits);
    for (int b = 0; b < B; ++b) {
      const auto& target = batch[static_cast<size_t>(b)].target;
      const int len = static_cast<int>(target.size());
      const bool live = j < len;
      targets.push_back(live ? target[static_cast<size_t>(j)] : CharAlphabet::kPadId);
      weights.push_back(live ? T(1) / static_cast<T>(len * B) : T(0));
      int next = live ? target[static_cast<size_t>(j)] : CharAlphabet::kPadId;
      if (live && scheduled_p > 0.0 && rng->bernoulli(scheduled_p)) next = argmax_output(values.row(b), values.cols());
      prev[static_cast<size_t>(b)] = next;
    }
    logits.push_back(step.logits);
    state = step.state;
  }
  return g.cross_entropy(g.concat_rows(logits), std::move(targets), std::move(weights));
}

template <typename T>
std::vector<int> greedy_decode(ParameterStore<T>& params, const ModelConfig& config, const text::EncodedSequence& seq) {
  const int L = seq.predict_count();
  if (L == 0) throw std::invalid_argument("nothing to predict: no '?' in the input");
  Graph<T> g(ad::Mode::kInference);
  const text::EncodedSequence* one[] = {&seq};
  EncoderOutput enc = encode(g, params, config, one);
  DecoderState state = initial_state(g, config, enc);
  std::vector<int> out;
  int prev = CharAlphabet::kStartId;
  for (int j = 0; j < L; ++j) {
    StepOutput step = decode_step(g, params, config, enc, state, {prev});
    prev = argmax_output(g.value(step.logits).row(0), config.alphabet_size);
    out.push_back(prev);
    state = step.state;
  }
  return out;
}

template <typename T>
Tensor<T> teacher_forced_logits(ParameterStore<T>& params, const ModelConfig& config,
                                const text::EncodedSequence& seq, const std::vector<int>& target) {
  if (static_cast<int>(target.size()) != seq.predict_count()) throw std::invalid_argument("target length mismatch");
  Graph<T> g(ad::Mode::kInference);
  const text::EncodedSequence* one[] = {&seq};
  EncoderOutput enc = encode(g, params, config, one);
  DecoderState state = initial_state(g, config, enc);
  Tensor<T> out(static_cast<int>(target.size()), config.alphabet_size);
  int prev = CharAlphabet::kStartId;
  for (size_t j = 0; j < target.size(); ++j) {
    StepOutput step = decode_step(g, params, config, enc, state, {prev});
    const Tensor<T>& row = g.value(step.logits);
    std::copy(row.data.begin(), row.data.end(), out.row(static_cast<int>(j)));
    prev = target[j];
    state = step.state;
  }
  return out;
}

#define LACUNA_INSTANTIATE(T)                                                                                    \
  template ParameterStore<T> init_parameters<T>(const ModelConfig&, ad::Rng&);                                    \
  template EncoderOutput encode<T>(Graph<T>&, ParameterStore<T>&, const ModelConfig&,                            \
                                   std::span<const text::EncodedSequence* const>);                               \
  template DecoderState initial_state<T>(Graph<T>&, const ModelConfig&, const EncoderOutput&);                   \
  template DecoderState select_rows<T>(Graph<T>&, const DecoderState&, const std::vector<int>&);                 \
  template StepOutput decode_step<T>(Graph<T>&, ParameterStore<T>&, const ModelConfig&, const EncoderOutput&,    \
                                     const DecoderState&, const std::vector<int>&);                              \
  template Var forward_loss<T>(Graph<T>&, ParameterStore<T>&, const ModelConfig&, std::span<const LossExample>, \
                               double, ad::Rng*);                                                                \
  template std::vector<int> greedy_decode<T>(ParameterStore<T>&, const ModelConfig&, const text::EncodedSequence&); \
  template Tensor<T> teacher_forced_logits<T>(ParameterStore<T>&, const ModelConfig&, const text::EncodedSequence&, \
                                              const std::vector<int>&);

LACUNA_INSTANTIATE(float)
LACUNA_INSTANTIATE(double)
#undef LACUNA_INSTANTIATE

}  // namespace lacuna::model
