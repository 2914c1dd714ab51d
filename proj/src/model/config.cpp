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


#include "lacuna/model/config.hpp"

#include <stdexcept>

namespace lacuna::model {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kUni:
      return "uni";
    case Variant::kBi:
      return "bi";
    case Variant::kBiWord:
      return "bi-word";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "uni") return Variant::kUni;
  if (name == "bi") return Variant::kBi;
  if (name == "bi-word" || name == "biword" || name == "bi_word") return Variant::kBiWord;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (expected uni, bi or bi-word)");
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* field) {
    if (v <= 0) throw std::invalid_argument(std::string("model config: ") + field + " must be positive");
  };
  positive(layers, "layers");
  positive(hidden, "hidden");
  positive(char_embedding, "char_embedding");
  if (alphabet_size <= 6) throw std::invalid_argument("model config: alphabet_size must exceed the reserved symbols");
  if (uses_words()) {
    positive(word_embedding, "word_embedding");
    if (vocab_size < 2) throw std::invalid_argument("model config: bi-word needs a word vocabulary");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("model config: dropout must lie in [0, 1)");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {
      {"variant", variant_name(c.variant)},
      {"layers", c.layers},
      {"hidden", c.hidden},
      {"char_embedding", c.char_embedding},
      {"word_embedding", c.word_embedding},
      {"dropout", c.dropout},
      {"alphabet_size", c.alphabet_size},
      {"vocab_size", c.vocab_size},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.layers = j.at("layers").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.char_embedding = j.at("char_embedding").get<int>();
  c.word_embedding = j.value("word_embedding", c.word_embedding);
  c.dropout = j.at("dropout").get<double>();
  c.alphabet_size = j.at("alphabet_size").get<int>();
  c.vocab_size = j.value("vocab_size", 0);
  c.validate();
  return c;
}

}  // namespace lacuna::model
