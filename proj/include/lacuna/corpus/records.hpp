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

#ifndef LACUNA_CORPUS_RECORDS_HPP_
#define LACUNA_CORPUS_RECORDS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace lacuna::corpus {

enum class Split { kTrain, kValid, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct RawRecord {
  uint64_t id = 0;
  std::string raw_text;  // UTF-8, may carry editorial annotations
  std::map<std::string, std::string> metadata;
};

// One normalized inscription. `text` is UTF-8 over the standardized
// alphabet, with '-' marking one missing character.
struct CleanRecord {
  uint64_t id = 0;
  std::string text;
  Split split = Split::kTrain;

  friend bool operator==(const CleanRecord&, const CleanRecord&) = default;
};

}  // namespace lacuna::corpus

#endif  // LACUNA_CORPUS_RECORDS_HPP_
