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


#ifndef LACUNA_TRAIN_SAMPLING_HPP_
#define LACUNA_TRAIN_SAMPLING_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "lacuna/autodiff/rng.hpp"

namespace lacuna::train {

struct SamplingBounds {
  int min_context = 100;
  int max_context = 1000;
  int min_target = 1;
  int max_target = 10;

  void validate() const;
};

// A context window with one span to restore.
struct TrainingExample {
  std::u32string context;  // original characters, unmasked
  int gap_start = 0;
  int gap_length = 0;

  std::u32string target() const { return context.substr(static_cast<size_t>(gap_start), static_cast<size_t>(gap_length)); }
  // The model input: the span replaced by '?'.
  std::u32string masked() const;
};

// Uniform span [start, start+len) of `text` with len in [min_len, max_len]
// that avoids '-'. Draws are retried; if they keep hitting damage the span
// shrinks towards a single legible character. nullopt only when the text
// has no legible character at all.
std::optional<std::pair<int, int>> sample_gap(std::u32string_view text, ad::Rng& rng, int min_len, int max_len);

// Context length uniform in [min_context, min(max_context, record length)],
// placed uniformly inside the record, then a gap sampled inside it. nullopt
// (skip the record) when the record is shorter than min_context or no
// legible character exists.
std::optional<TrainingExample> sample_training_example(std::u32string_view record, ad::Rng& rng,
                                                       const SamplingBounds& bounds = {});

}  // namespace lacuna::train

#endif  // LACUNA_TRAIN_SAMPLING_HPP_
