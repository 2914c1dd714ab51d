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


#include "lacuna/decode/restorer.hpp"

#include <algorithm>
#include <stdexcept>

namespace lacuna::decode {

std::vector<Hypothesis> Seq2SeqRestorer::restore(std::u32string_view text, const BeamConfig& beam) const {
  find_single_gap(text);
  return beam_search(model_, model_.encode(text), beam);
}

std::pair<size_t, size_t> context_window(size_t text_length, size_t gap_start, size_t gap_length,
                                         size_t max_context) {
  if (gap_start + gap_length > text_length) throw std::out_of_range("gap extends past the text");
  if (max_context < gap_length) throw std::invalid_argument("context shorter than the gap");
  if (text_length <= max_context) return {0, text_length};
  const size_t spare = max_context - gap_length;
  const size_t left = spare / 2;
  size_t begin = gap_start >= left ? gap_start - left : 0;
  begin = std::min(begin, text_length - max_context);
  return {begin, begin + max_context};
}

std::pair<size_t, size_t> find_single_gap(std::u32string_view text) {
  const size_t start = text.find(text::kPredictChar);
  if (start == std::u32string_view::npos) throw std::invalid_argument("text has no '?' gap");
  size_t end = start;
  while (end < text.size() && text[end] == text::kPredictChar) ++end;
  if (text.find(text::kPredictChar, end) != std::u32string_view::npos) {
    throw std::invalid_argument("text has more than one '?' gap");
  }
  return {start, end - start};
}

}  // namespace lacuna::decode
