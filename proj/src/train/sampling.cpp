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


#include "lacuna/train/sampling.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "lacuna/text/alphabet.hpp"

namespace lacuna::train {

namespace {

constexpr int kAttempts = 64;

bool legible(std::u32string_view text, int start, int len) {
  for (int i = start; i < start + len; ++i) {
    if (text[static_cast<size_t>(i)] == text::kMissingChar) return false;
  }
  return true;
}

}  // namespace

void SamplingBounds::validate() const {
  if (min_target < 1 || max_target < min_target) throw std::invalid_argument("bad target length bounds");
  if (min_context < 1 || max_context < min_context) throw std::invalid_argument("bad context length bounds");
  if (min_context <= max_target) throw std::invalid_argument("context must be longer than the longest target");
}

std::u32string TrainingExample::masked() const {
  std::u32string out = context;
  std::fill_n(out.begin() + gap_start, gap_length, text::kPredictChar);
  return out;
}

std::optional<std::pair<int, int>> sample_gap(std::u32string_view text, ad::Rng& rng, int min_len, int max_len) {
  const int n = static_cast<int>(text.size());
  if (n == 0 || min_len < 1) return std::nullopt;
  max_len = std::min(max_len, n);
  min_len = std::min(min_len, max_len);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const int len = static_cast<int>(rng.uniform_int(min_len, max_len));
    const int start = static_cast<int>(rng.uniform_int(0, n - len));
    if (legible(text, start, len)) return std::make_pair(start, len);
  }
  // Heavily damaged text: pick among legible positions directly.
  std::vector<int> clean;
  for (int i = 0; i < n; ++i) {
    if (text[static_cast<size_t>(i)] != text::kMissingChar) clean.push_back(i);
  }
  if (clean.empty()) return std::nullopt;
  const int start = clean[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(clean.size()) - 1))];
  int len = 1;
  const int want = static_cast<int>(rng.uniform_int(min_len, max_len));
  while (len < want && start + len < n && text[static_cast<size_t>(start + len)] != text::kMissingChar) ++len;
  return std::make_pair(start, len);
}

std::optional<TrainingExample> sample_training_example(std::u32string_view record, ad::Rng& rng,
                                                       const SamplingBounds& bounds) {
  bounds.validate();
  const int n = static_cast<int>(record.size());
  if (n < bounds.min_context) return std::nullopt;
  const int ctx = static_cast<int>(rng.uniform_int(bounds.min_context, std::min(bounds.max_context, n)));
  const int begin = static_cast<int>(rng.uniform_int(0, n - ctx));
  TrainingExample ex;
  ex.context = std::u32string(record.substr(static_cast<size_t>(begin), static_cast<size_t>(ctx)));
  auto gap = sample_gap(ex.context, rng, bounds.min_target, bounds.max_target);
  if (!gap) return std::nullopt;
  ex.gap_start = gap->first;
  ex.gap_length = gap->second;
  return ex;
}

}  // namespace lacuna::train
