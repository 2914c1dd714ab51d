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


#ifndef LACUNA_MODEL_CONFIG_HPP_
#define LACUNA_MODEL_CONFIG_HPP_

#include <string>
#include <string_view>

#include "json.hpp"

namespace lacuna::model {

enum class Variant { kUni, kBi, kBiWord };

// "uni", "bi", "bi-word".
std::string variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct ModelConfig {
  Variant variant = Variant::kBiWord;
  int layers = 2;
  int hidden = 512;
  int char_embedding = 128;
  int word_embedding = 128;  // Bi-Word only
  double dropout = 0.2;
  int alphabet_size = 0;
  int vocab_size = 0;  // Bi-Word only

  int directions() const { return variant == Variant::kUni ? 1 : 2; }
  bool uses_words() const { return variant == Variant::kBiWord; }
  int encoder_input() const { return char_embedding + (uses_words() ? word_embedding : 0); }
  // Per-position width of the encoder output: directions are concatenated.
  int encoder_width() const { return hidden * directions(); }

  // Throws std::invalid_argument describing the first bad field.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace lacuna::model

#endif  // LACUNA_MODEL_CONFIG_HPP_
