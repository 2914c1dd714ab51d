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


#ifndef LACUNA_SERVICE_LOADED_MODEL_HPP_
#define LACUNA_SERVICE_LOADED_MODEL_HPP_

#include <filesystem>
#include <memory>
#include <string>

#include "lacuna/decode/restorer.hpp"
#include "lacuna/lm/lm.hpp"
#include "lacuna/model/model.hpp"

namespace lacuna::service {

// Either kind of checkpoint, behind the common Restorer interface.
struct LoadedModel {
  std::string kind;  // "seq2seq" or "lm"
  std::string id;    // checkpoint file name
  std::unique_ptr<model::Seq2SeqModel> seq2seq;
  std::unique_ptr<lm::LmModel> lm;
  std::unique_ptr<decode::Restorer> restorer;
};

// Dispatches on the checkpoint header's "kind".
LoadedModel load_any_model(const std::filesystem::path& path);

}  // namespace lacuna::service

#endif  // LACUNA_SERVICE_LOADED_MODEL_HPP_
