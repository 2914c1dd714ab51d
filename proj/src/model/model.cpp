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


#include "lacuna/model/model.hpp"

#include "lacuna/autodiff/rng.hpp"
#include "lacuna/model/seq2seq.hpp"

namespace lacuna::model {

Seq2SeqModel Seq2SeqModel::create(ModelConfig config, text::CharAlphabet alphabet, text::WordVocab vocab,
                                  uint64_t seed) {
  config.alphabet_size = alphabet.size();
  config.vocab_size = config.uses_words() ? vocab.size() : 0;
  config.validate();
  ad::Rng rng(seed);
  Seq2SeqModel m{config, std::move(alphabet), config.uses_words() ? std::move(vocab) : text::WordVocab(),
                 init_parameters<float>(config, rng)};
  return m;
}

text::EncodedSequence Seq2SeqModel::encode(std::u32string_view text) const {
  return text::encode(text, alphabet, config.uses_words() ? &vocab : nullptr);
}

nlohmann::json checkpoint_header(const Seq2SeqModel& model) {
  nlohmann::json h = {
      {"kind", "seq2seq"},
      {"config", to_json(model.config)},
      {"alphabet", model.alphabet.to_tsv()},
  };
  if (model.config.uses_words()) h["vocab"] = model.vocab.to_tsv();
  return h;
}

std::vector<NamedTensor> checkpoint_tensors(const Seq2SeqModel& model) {
  std::vector<NamedTensor> out;
  for (const auto& p : model.params) out.push_back({p.name, &p.value});
  return out;
}

void save_model(const std::filesystem::path& path, const Seq2SeqModel& model) {
  write_checkpoint(path, checkpoint_header(model), checkpoint_tensors(model));
}

Seq2SeqModel model_from_checkpoint(const CheckpointContents& contents) {
  const auto& h = contents.header;
  if (h.value("kind", "") != "seq2seq") throw CheckpointError("checkpoint does not hold a restoration model");
  Seq2SeqModel m;
  m.config = model_config_from_json(h.at("config"));
  m.alphabet = text::CharAlphabet::from_tsv(h.at("alphabet").get<std::string>());
  if (m.config.uses_words()) m.vocab = text::WordVocab::from_tsv(h.at("vocab").get<std::string>());
  if (m.alphabet.size() != m.config.alphabet_size ||
      (m.config.uses_words() && m.vocab.size() != m.config.vocab_size)) {
    throw CheckpointError("checkpoint alphabet or vocabulary disagrees with its config");
  }
  for (const auto& [name, shape] : parameter_manifest(m.config)) m.params.add(name, shape);
  load_into(m.params, contents.tensors);
  return m;
}

Seq2SeqModel load_model(const std::filesystem::path& path) { return model_from_checkpoint(read_checkpoint(path)); }

}  // namespace lacuna::model
