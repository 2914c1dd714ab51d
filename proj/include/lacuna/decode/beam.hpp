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


#ifndef LACUNA_DECODE_BEAM_HPP_
#define LACUNA_DECODE_BEAM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lacuna/autodiff/parameters.hpp"
#include "lacuna/model/config.hpp"
#include "lacuna/model/model.hpp"
#include "lacuna/text/alphabet.hpp"
#include "lacuna/text/vocab.hpp"

namespace lacuna::decode {

struct BeamConfig {
  int beam_width = 100;
  int top_k = 20;

  // Throws std::invalid_argument unless 1 <= top_k <= beam_width.
  void validate() const;
};

// Rows are decode steps, columns source positions.
using AttentionMatrix = std::vector<std::vector<float>>;

struct Hypothesis {
  std::vector<int> ids;
  std::u32string text;
  double log_prob = 0.0;  // sum of per-step log-probabilities
  AttentionMatrix attention;
};

// Fixed-length beam search: exactly predict_count() steps, no length
// normalization. Each step keeps the beam_width best prefixes by total
// log-probability; equal scores are ordered by the id sequence, smallest
// first. Only ids a decoder may emit (not '?', '-', start, pad) are expanded.
// Returns at most top_k hypotheses, best first.
template <typename T>
std::vector<Hypothesis> beam_search(ad::ParameterStore<T>& params, const model::ModelConfig& config,
                                    const text::CharAlphabet& alphabet, const text::EncodedSequence& seq,
                                    const BeamConfig& beam);

std::vector<Hypothesis> beam_search(model::Seq2SeqModel& model, const text::EncodedSequence& seq,
                                    const BeamConfig& beam);

// Strict weak order used for ranking: higher score first, then the
// lexicographically smaller id sequence.
bool ranks_before(double score_a, const std::vector<int>& ids_a, double score_b, const std::vector<int>& ids_b);

// Min-max scales each row separately over the masked columns and over the
// unmasked columns. A region whose values are all equal becomes 0.
std::vector<std::vector<double>> scale_attention_for_viz(const AttentionMatrix& attention,
                                                         const std::vector<uint8_t>& predict_mask);

// {text, log_prob, attention}. `attention` is the given matrix, so callers
// choose raw or scaled weights.
nlohmann::json hypothesis_json(const Hypothesis& h, const std::vector<std::vector<double>>& attention);

}  // namespace lacuna::decode

#endif  // LACUNA_DECODE_BEAM_HPP_
