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


#include "lacuna/decode/beam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lacuna/autodiff/graph.hpp"
#include "lacuna/model/seq2seq.hpp"
#include "lacuna/text/utf8.hpp"

namespace lacuna::decode {

void BeamConfig::validate() const {
  if (beam_width < 1) throw std::invalid_argument("beam width must be at least 1");
  if (top_k < 1 || top_k > beam_width) throw std::invalid_argument("top_k must lie in [1, beam width]");
}

bool ranks_before(double score_a, const std::vector<int>& ids_a, double score_b, const std::vector<int>& ids_b) {
  if (score_a != score_b) return score_a > score_b;
  return ids_a < ids_b;
}

namespace {

struct Beam {
  std::vector<int> ids;
  double log_prob = 0.0;
  AttentionMatrix attention;
};

struct Candidate {
  int parent;
  int id;
  double score;
};

// Row-wise log-softmax in double.
template <typename T>
std::vector<double> log_probs(const T* row, int cols) {
  double mx = row[0];
  for (int c = 1; c < cols; ++c) mx = std::max(mx, static_cast<double>(row[c]));
  double total = 0;
  for (int c = 0; c < cols; ++c) total += std::exp(static_cast<double>(row[c]) - mx);
  const double lse = mx + std::log(total);
  std::vector<double> out(static_cast<size_t>(cols));
  for (int c = 0; c < cols; ++c) out[static_cast<size_t>(c)] = static_cast<double>(row[c]) - lse;
  return out;
}

}  // namespace

template <typename T>
std::vector<Hypothesis> beam_search(ad::ParameterStore<T>& params, const model::ModelConfig& config,
                                    const text::CharAlphabet& alphabet, const text::EncodedSequence& seq,
                                    const BeamConfig& beam) {
  beam.validate();
  const int steps = seq.predict_count();
  if (steps == 0) throw std::invalid_argument("nothing to predict: the input has no '?'");

  ad::Graph<T> g(ad::Mode::kInference);
  const text::EncodedSequence* one[] = {&seq};
  model::EncoderOutput enc = model::encode(g, params, config, one);
  model::DecoderState state = model::initial_state(g, config, enc);

  std::vector<Beam> beams(1);
  for (int j = 0; j < steps; ++j) {
    std::vector<int> prev;
    for (const Beam& b : beams) prev.push_back(b.ids.empty() ? text::CharAlphabet::kStartId : b.ids.back());
    model::StepOutput out = model::decode_step(g, params, config, enc, state, prev);
    const ad::Tensor<T>& logits = g.value(out.logits);
    const ad::Tensor<T>& attention = g.value(out.attention);

    std::vector<Candidate> cands;
    cands.reserve(beams.size() * static_cast<size_t>(config.alphabet_size));
    for (size_t k = 0; k < beams.size(); ++k) {
      const std::vector<double> lp = log_probs(logits.row(static_cast<int>(k)), logits.cols());
      for (int c = 0; c < config.alphabet_size; ++c) {
        if (!text::CharAlphabet::is_output_id(c)) continue;
        cands.push_back({static_cast<int>(k), c, beams[k].log_prob + lp[static_cast<size_t>(c)]});
      }
    }
    // Comparing (parent prefix, id) is the same as comparing whole id
    // sequences, since all prefixes have equal length.
    auto better = [&](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      const auto& pa = beams[static_cast<size_t>(a.parent)].ids;
      const auto& pb = beams[static_cast<size_t>(b.parent)].ids;
      if (pa != pb) return pa < pb;
      return a.id < b.id;
    };
    const size_t keep = std::min(cands.size(), static_cast<size_t>(beam.beam_width));
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(), better);
    cands.resize(keep);

    std::vector<Beam> next;
    std::vector<int> parents;
    for (const Candidate& c : cands) {
      const Beam& parent = beams[static_cast<size_t>(c.parent)];
      Beam b{parent.ids, c.score, parent.attention};
      b.ids.push_back(c.id);
      const T* row = attention.row(c.parent);
      b.attention.emplace_back(row, row + attention.cols());
      next.push_back(std::move(b));
      parents.push_back(c.parent);
    }
    beams = std::move(next);
    state = model::select_rows(g, out.state, parents);
  }

  std::vector<Hypothesis> result;
  for (size_t i = 0; i < beams.size() && static_cast<int>(i) < beam.top_k; ++i) {
    Hypothesis h;
    h.ids = std::move(beams[i].ids);
    h.text = text::decode(h.ids, alphabet);
    h.log_prob = beams[i].log_prob;
    h.attention = std::move(beams[i].attention);
    result.push_back(std::move(h));
  }
  return result;
}

std::vector<Hypothesis> beam_search(model::Seq2SeqModel& model, const text::EncodedSequence& seq,
                                    const BeamConfig& beam) {
  return beam_search(model.params, model.config, model.alphabet, seq, beam);
}

std::vector<std::vector<double>> scale_attention_for_viz(const AttentionMatrix& attention,
                                                         const std::vector<uint8_t>& predict_mask) {
  std::vector<std::vector<double>> out;
  for (const auto& row : attention) {
    if (row.size() != predict_mask.size()) throw std::invalid_argument("attention row and mask lengths differ");
    std::vector<double> scaled(row.size(), 0.0);
    for (uint8_t region : {uint8_t{0}, uint8_t{1}}) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (size_t i = 0; i < row.size(); ++i) {
        if ((predict_mask[i] != 0) != (region != 0)) continue;
        lo = std::min(lo, static_cast<double>(row[i]));
        hi = std::max(hi, static_cast<double>(row[i]));
      }
      if (!(hi > lo)) continue;  // empty or constant region stays 0
      for (size_t i = 0; i < row.size(); ++i) {
        if ((predict_mask[i] != 0) != (region != 0)) continue;
        scaled[i] = std::clamp((row[i] - lo) / (hi - lo), 0.0, 1.0);
      }
    }
    out.push_back(std::move(scaled));
  }
  return out;
}

nlohmann::json hypothesis_json(const Hypothesis& h, const std::vector<std::vector<double>>& attention) {
  return {{"text", text::encode_utf8(h.text)}, {"log_prob", h.log_prob}, {"attention", attention}};
}

template std::vector<Hypothesis> beam_search<float>(ad::ParameterStore<float>&, const model::ModelConfig&,
                                                    const text::CharAlphabet&, const text::EncodedSequence&,
                                                    const BeamConfig&);
template std::vector<Hypothesis> beam_search<double>(ad::ParameterStore<double>&, const model::ModelConfig&,
                                                     const text::CharAlphabet&, const text::EncodedSequence&,
                                                     const BeamConfig&);

}  // namespace lacuna::decode
