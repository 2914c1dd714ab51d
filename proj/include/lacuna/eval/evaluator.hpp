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


#ifndef LACUNA_EVAL_EVALUATOR_HPP_
#define LACUNA_EVAL_EVALUATOR_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lacuna/corpus/records.hpp"
#include "lacuna/decode/beam.hpp"
#include "lacuna/decode/restorer.hpp"

namespace lacuna::eval {

// Unit-cost edit distance between code point sequences.
size_t levenshtein(std::u32string_view a, std::u32string_view b);

// Edit distance over target length. Throws std::invalid_argument on an
// empty target. Callers strip diacritics first.
double cer(std::u32string_view prediction, std::u32string_view target);

// Whether the diacritics-stripped target equals one of the first k
// hypothesis texts (also stripped).
bool top_k_hit(std::span<const decode::Hypothesis> hypotheses, std::u32string_view target, int k = 20);

// 1-based rank of the target among the hypotheses, compared as in top_k_hit.
std::optional<int> target_rank(std::span<const decode::Hypothesis> hypotheses, std::u32string_view target);

struct ExampleResult {
  uint64_t id = 0;
  std::u32string target;
  std::u32string prediction;  // top hypothesis
  std::optional<int> rank;
  size_t edits = 0;
};

struct EvalResult {
  double cer = 0.0;   // total edits / total target characters
  double top_k = 0.0; // hits / examples
  size_t examples = 0;
  size_t total_edits = 0;
  size_t total_target_chars = 0;
  size_t hits = 0;
  std::vector<ExampleResult> records;  // in input order
};

struct EvalOptions {
  uint64_t seed = 0;
  int max_context = 1000;
  int min_target = 1;
  int max_target = 10;
  int k = 20;
  decode::BeamConfig beam;
  size_t limit = 0;  // 0 evaluates every record
};

// The gap evaluated for a record: a deterministic function of (seed, id,
// text), reused by every context length so sweeps compare like with like.
std::optional<std::pair<int, int>> evaluation_gap(const corpus::CleanRecord& record, const EvalOptions& options);

// One gap per record, context min(max_context, record length) centred on
// it, ranked by beam search. Records run in parallel; results are
// identical to a serial run.
EvalResult evaluate(const decode::Restorer& restorer, std::span<const corpus::CleanRecord> records,
                    const EvalOptions& options = {});

struct SweepPoint {
  int context = 0;
  EvalResult result;
};

inline const std::vector<int> kDefaultSweep = {20, 50, 100, 200, 500, 1000};

// evaluate() with the window truncated to each length. Throws
// std::invalid_argument if a length cannot fit the longest gap plus one
// character.
std::vector<SweepPoint> context_sweep(const decode::Restorer& restorer, std::span<const corpus::CleanRecord> records,
                                      const std::vector<int>& lengths, const EvalOptions& options = {});

struct GapRestoration {
  size_t start = 0;
  size_t length = 0;
  std::vector<decode::Hypothesis> hypotheses;
};

struct FullRestoration {
  std::u32string text;
  std::vector<GapRestoration> gaps;
};

// Fills every run of '-' from left to right, committing each gap's top
// hypothesis before moving on so later gaps see earlier fills.
FullRestoration restore_full_text(const decode::Restorer& restorer, std::u32string_view text,
                                  const decode::BeamConfig& beam, int max_context = 1000);

nlohmann::json summary_json(const EvalResult& result);

}  // namespace lacuna::eval

#endif  // LACUNA_EVAL_EVALUATOR_HPP_
