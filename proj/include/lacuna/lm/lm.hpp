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


#ifndef LACUNA_LM_LM_HPP_
#define LACUNA_LM_LM_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lacuna/autodiff/graph.hpp"
#include "lacuna/autodiff/parameters.hpp"
#include "lacuna/autodiff/rng.hpp"
#include "lacuna/corpus/records.hpp"
#include "lacuna/decode/beam.hpp"
#include "lacuna/decode/restorer.hpp"
#include "lacuna/model/checkpoint.hpp"
#include "lacuna/text/alphabet.hpp"

// Character-level recurrent language model used as a restoration baseline.
namespace lacuna::lm {

struct LmConfig {
  int layers = 2;
  int hidden = 1024;
  int embedding = 1024;
  double learning_rate = 2e-3;
  double decay = 0.95;  // learning-rate factor when validation loss stalls
  double clip = 5.0;
  double dropout = 0.2;
  int alphabet_size = 0;

  void validate() const;
  friend bool operator==(const LmConfig&, const LmConfig&) = default;
};

nlohmann::json to_json(const LmConfig& c);
LmConfig lm_config_from_json(const nlohmann::json& j);

// embed [A,E]; l{i}/{wx,wh,b} with gates ordered i,f,g,o; out/{w [H,A],b}.
std::vector<std::pair<std::string, ad::Shape>> lm_parameter_manifest(const LmConfig& config);

template <typename T>
ad::ParameterStore<T> init_lm_parameters(const LmConfig& config, ad::Rng& rng);

// Mean over windows of the mean next-character cross-entropy. Each window
// is a sequence of char ids; the model reads start-of-text then the window
// shifted by one. '-' is an ordinary symbol here.
template <typename T>
ad::Var lm_loss(ad::Graph<T>& g, ad::ParameterStore<T>& params, const LmConfig& config,
                std::span<const std::vector<int>> windows);

struct LmModel {
  LmConfig config;
  text::CharAlphabet alphabet;
  ad::ParameterStore<float> params;

  static LmModel create(LmConfig config, text::CharAlphabet alphabet, uint64_t seed);
  std::vector<int> encode(std::u32string_view text) const;  // throws text::EncodeError
};

nlohmann::json lm_checkpoint_header(const LmModel& model);
std::vector<model::NamedTensor> lm_checkpoint_tensors(const LmModel& model);
void save_lm(const std::filesystem::path& path, const LmModel& model);
LmModel load_lm(const std::filesystem::path& path);
LmModel lm_from_checkpoint(const model::CheckpointContents& contents);

// Sum of log p(c_t | c_<t) over `ids`, computed in double.
double lm_log_prob(const LmModel& model, std::span<const int> ids);
// exp of the per-character negative log-likelihood over the records, each
// cut to its first `max_length` characters.
double perplexity(const LmModel& model, std::span<const corpus::CleanRecord> records, size_t max_length = 1000);

// Ranked fills for the single '?' run in `text`. Fill prefixes are grown by
// beam search on the left context; the surviving beam is then rescored by
// running each candidate on through the right context, so log_prob is the
// log-probability of the whole completed text. With beam_width >= |V|^L the
// ranking is exact. Hypotheses carry no attention.
std::vector<decode::Hypothesis> lm_restore(const LmModel& model, std::u32string_view text,
                                           const decode::BeamConfig& beam);

class LmRestorer : public decode::Restorer {
 public:
  explicit LmRestorer(const LmModel& model) : model_(model) {}
  std::vector<decode::Hypothesis> restore(std::u32string_view text, const decode::BeamConfig& beam) const override {
    return lm_restore(model_, text, beam);
  }
  const text::CharAlphabet& alphabet() const override { return model_.alphabet; }

 private:
  const LmModel& model_;
};

}  // namespace lacuna::lm

#endif  // LACUNA_LM_LM_HPP_
