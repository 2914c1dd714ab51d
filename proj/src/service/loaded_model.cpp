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


#include "lacuna/service/loaded_model.hpp"

#include "lacuna/model/checkpoint.hpp"

namespace lacuna::service {

LoadedModel load_any_model(const std::filesystem::path& path) {
  auto contents = model::read_checkpoint(path);
  LoadedModel out;
  out.kind = contents.header.value("kind", "");
  out.id = path.filename().string();
  if (out.kind == "seq2seq") {
    out.seq2seq = std::make_unique<model::Seq2SeqModel>(model::model_from_checkpoint(contents));
    out.restorer = std::make_unique<decode::Seq2SeqRestorer>(*out.seq2seq);
  } else if (out.kind == "lm") {
    out.lm = std::make_unique<lm::LmModel>(lm::lm_from_checkpoint(contents));
    out.restorer = std::make_unique<lm::LmRestorer>(*out.lm);
  } else {
    throw model::CheckpointError(path.string() + ": unknown checkpoint kind '" + out.kind + "'");
  }
  return out;
}

}  // namespace lacuna::service
