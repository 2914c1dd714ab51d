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


#ifndef LACUNA_MODEL_CHECKPOINT_HPP_
#define LACUNA_MODEL_CHECKPOINT_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lacuna/autodiff/parameters.hpp"
#include "lacuna/autodiff/tensor.hpp"

namespace lacuna::model {

// File layout:
//   PYML1\n
//   one line of JSON: caller metadata plus "tensors": [{name, shape}, ...]\n
//   float32 little-endian values of each tensor in manifest order.
inline constexpr char kCheckpointMagic[] = "PYML1";

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedTensor {
  std::string name;
  const ad::Tensor<float>* tensor = nullptr;
};

// Writes atomically (temporary file, then rename). `header` must be an
// object and must not already contain "tensors".
void write_checkpoint(const std::filesystem::path& path, nlohmann::json header,
                      const std::vector<NamedTensor>& tensors);

struct CheckpointContents {
  nlohmann::json header;  // without the "tensors" manifest
  ad::ParameterStore<float> tensors;
};

CheckpointContents read_checkpoint(const std::filesystem::path& path);

// Header only, without reading tensor data.
nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

// Copies each tensor in `store` from `source`, checking names and shapes.
void load_into(ad::ParameterStore<float>& store, const ad::ParameterStore<float>& source);

}  // namespace lacuna::model

#endif  // LACUNA_MODEL_CHECKPOINT_HPP_
