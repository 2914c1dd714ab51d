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


#ifndef LACUNA_MODEL_MODEL_HPP_
#define LACUNA_MODEL_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lacuna/autodiff/parameters.hpp"
#include "lacuna/model/checkpoint.hpp"
#include "lacuna/model/config.hpp"
#include "lacuna/text/alphabet.hpp"
#include "lacuna/text/vocab.hpp"

namespace lacuna::model {

// A restoration model with everything needed to encode raw text.
// Inference never writes to `params`, so one instance may serve many
// threads; training needs exclusive access.
struct Seq2SeqModel {
  ModelConfig config;
  text::CharAlphabet alphabet;
  text::WordVocab vocab;  // empty unless the variant reads words
  ad::ParameterStore<float> params;

  // Fills in alphabet/vocab sizes, validates and initializes from `seed`.
  static Seq2SeqModel create(ModelConfig config, text::CharAlphabet alphabet, text::WordVocab vocab, uint64_t seed);

  text::EncodedSequence encode(std::u32string_view text) const;
};

nlohmann::json checkpoint_header(const Seq2SeqModel& model);
std::vector<NamedTensor> checkpoint_tensors(const Seq2SeqModel& model);

void save_model(const std::filesystem::path& path, const Seq2SeqModel& model);
Seq2SeqModel load_model(const std::filesystem::path& path);
Seq2SeqModel model_from_checkpoint(const CheckpointContents& contents);

}  // namespace lacuna::model

#endif  // LACUNA_MODEL_MODEL_HPP_
