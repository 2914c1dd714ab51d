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


#include "lacuna/eval/evaluator.hpp"

#include <algorithm>
#include <stdexcept>

#include "lacuna/autodiff/rng.hpp"
#include "lacuna/text/alphabet.hpp"
#include "lacuna/text/unicode.hpp"
#include "lacuna/text/utf8.hpp"
#include "lacuna/train/sampling.hpp"

namespace lacuna::eval {

size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double cer(std::u32string_view prediction, std::u32string_view target) {
  if (target.empty()) throw std::invalid_argument("cer: empty target");
  return static_cast<double>(levenshtein(prediction, target)) / static_cast<double>(target.size());
}

std::optional<int> target_rank(std::span<const decode::Hypothesis> hypotheses, std::u32string_view target) {
  const std::u32string want = text::strip_diacritics(target);
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    if (text::strip_diacritics(hypotheses[i].text) == want) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

bool top_k_hit(std::span<const decode::Hypothesis> hypotheses, std::u32string_view target, int k) {
  const auto rank = target_rank(hypotheses.first(std::min(hypotheses.size(), static_cast<size_t>(std::max(k, 0)))),
                                target);
  return rank.has_value();
}

std::optional<std::pair<int, int>> evaluation_gap(const corpus::CleanRecord& record, const EvalOptions& options) {
  const std::u32string text = text::decode_utf8(record.text);
  ad::Rng rng = ad::Rng(options.seed).fork(record.id);
  return train::sample_gap(text, rng, options.min_target, options.max_target);
}

namespace {

ExampleResult run_one(const decode::Restorer& restorer, const corpus::CleanRecord& record, std::pair<int, int> gap,
                      int context, const EvalOptions& options) {
  const std::u32string text = text::decode_utf8(record.text);
  const auto [begin, end] = decode::context_window(text.size(), static_cast<size_t>(gap.first),
                                                   static_cast<size_t>(gap.second), static_cast<size_t>(context));
  std::u32string input = text.substr(begin, end - begin);
  const size_t local = static_cast<size_t>(gap.first) - begin;
  ExampleResult r;
  r.id = record.id;
  r.target = text::strip_diacritics(input.substr(local, static_cast<size_t>(gap.second)));
  std::fill_n(input.begin() + static_cast<std::ptrdiff_t>(local), gap.second, text::kPredictChar);
  const auto hyps = restorer.restore(input, options.beam);
  r.prediction = hyps.empty() ? std::u32string() : text::strip_diacritics(hyps.front().text);
  const auto rank = target_rank(hyps, r.target);
  if (rank && *rank <= options.k) r.rank = rank;
  r.edits = levenshtein(r.prediction, r.target);
  return r;
}

EvalResult run(const decode::Restorer& restorer, std::span<const corpus::CleanRecord> records, int context,
               const EvalOptions& options) {
  const size_t n = options.limit == 0 ? records.size() : std::min(records.size(), options.limit);
  std::vector<std::optional<ExampleResult>> slots(n);
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < n; ++i) {
    try {
      const auto gap = evaluation_gap(records[i], options);
      if (gap) slots[i] = run_one(restorer, records[i], *gap, std::min(context, options.max_context), options);
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = "record " + std::to_string(records[i].id) + ": " + e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  EvalResult out;
  for (auto& s : slots) {
    if (!s) continue;
    out.total_edits += s->edits;
    out.total_target_chars += s->target.size();
    out.hits += s->rank.has_value();
    out.records.push_back(std::move(*s));
  }
  out.examples = out.records.size();
  if (out.examples > 0) {
    out.cer = static_cast<double>(out.total_edits) / static_cast<double>(out.total_target_chars);
    out.top_k = static_cast<double>(out.hits) / static_cast<double>(out.examples);
  }
  return out;
}

}  // namespace

EvalResult evaluate(const decode::Restorer& restorer, std::span<const corpus::CleanRecord> records,
                    const EvalOptions& options) {
  return run(restorer, records, options.max_context, options);
}

std::vector<SweepPoint> context_sweep(const decode::Restorer& restorer, std::span<const corpus::CleanRecord> records,
                                      const std::vector<int>& lengths, const EvalOptions& options) {
  for (int len : lengths) {
    if (len < options.max_target + 1) {
      throw std::invalid_argument("context length " + std::to_string(len) + " cannot hold a gap of " +
                                  std::to_string(options.max_target) + " plus context");
    }
  }
  EvalOptions opts = options;
  opts.max_context = std::max(options.max_context, lengths.empty() ? 0 : *std::max_element(lengths.begin(), lengths.end()));
  std::vector<SweepPoint> out;
  for (int len : lengths) out.push_back({len, run(restorer, records, len, opts)});
  return out;
}

FullRestoration restore_full_text(const decode::Restorer& restorer, std::u32string_view text,
                                  const decode::BeamConfig& beam, int max_context) {
  FullRestoration out;
  out.text = std::u32string(text);
  size_t pos = 0;
  while ((pos = out.text.find(text::kMissingChar, pos)) != std::u32string::npos) {
    size_t end = pos;
    while (end < out.text.size() && out.text[end] == text::kMissingChar) ++end;
    const size_t len = end - pos;
    const auto [begin, stop] = decode::context_window(out.text.size(), pos, len,
                                                      std::max(static_cast<size_t>(max_context), len + 1));
    std::u32string input = out.text.substr(begin, stop - begin);
    std::fill_n(input.begin() + static_cast<std::ptrdiff_t>(pos - begin), len, text::kPredictChar);
    GapRestoration gap{pos, len, restorer.restore(input, beam)};
    if (gap.hypotheses.empty()) throw std::runtime_error("restorer returned no hypotheses");
    out.text.replace(pos, len, gap.hypotheses.front().text);
    out.gaps.push_back(std::move(gap));
    pos = end;
  }
  return out;
}

nlohmann::json summary_json(const EvalResult& result) {
  return {{"cer", result.cer},
          {"top_k", result.top_k},
          {"examples", result.examples},
          {"edits", result.total_edits},
          {"target_chars", result.total_target_chars},
          {"hits", result.hits}};
}

}  // namespace lacuna::eval
