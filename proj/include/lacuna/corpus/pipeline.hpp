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

#ifndef LACUNA_CORPUS_PIPELINE_HPP_
#define LACUNA_CORPUS_PIPELINE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lacuna/corpus/records.hpp"
#include "lacuna/text/alphabet.hpp"

namespace lacuna::corpus {

inline constexpr size_t kMinRecordLength = 100;

// Cleaning stages, applied in this order.
enum class Stage {
  kDecode,           // raw bytes to codepoints; also lacuna annotation parsing
  kNumerals,         // numeral runs -> '0'
  kEditorialSymbols, // Leiden brackets and marks
  kNotes,            // human comments and non-Greek notes
  kLacunae,          // {N} -> N hyphens
  kLowercase,
  kSpacing,
  kAlphabetFilter,
  kLengthFilter,
};

std::string_view stage_name(Stage stage);

struct CodepointRange {
  char32_t lo;
  char32_t hi;
  bool contains(char32_t cp) const { return cp >= lo && cp <= hi; }
};

// Everything the raw markup leaves open is configurable here.
struct NormalizerConfig {
  // Each maximal run of these becomes a single '0'.
  std::vector<CodepointRange> numeral_ranges = {
      {U'0', U'9'},
      {0x10140, 0x1018E},  // Greek acrophonic and other ancient numbers
      {0x2160, 0x2188},    // Roman numerals
  };
  // A Greek letter run closed (suffix) or opened (prefix) by one of these
  // signs is an alphabetic numeral and is replaced as a whole.
  std::u32string numeral_suffix_signs = U"\u0374\u02B9";  // keraia and its NFC form
  std::u32string numeral_prefix_signs = U"\u0375";
  // Editorial symbols stripped around characters (content kept).
  std::u32string editorial_symbols = U"[]()<>\u27E6\u27E7\u27E8\u27E9\u2E22\u2E23\u2E24\u2E25"
                                    U"\u230A\u230B\u2039\u203A|\u0323";
  // Human comments, delimiter pairs; content dropped.
  std::vector<std::pair<std::u32string, std::u32string>> comment_delimiters = {
      {U"/*", U"*/"},
      {U"\u00AB", U"\u00BB"},
  };
  // Whitespace-delimited tokens containing a Latin letter are dropped as
  // non-Greek notes (e.g. "vac.").
  bool drop_latin_tokens = true;
  // Punctuation whose duplicate runs collapse and whose leading space is removed.
  std::u32string punctuation = U".,\u00B7\u0387;:";
};

enum class DiscardReason {
  kMalformedAnnotation,
  kInvalidEncoding,
  kNonGreek,
  kTooShort,
};

std::string_view discard_reason_name(DiscardReason reason);

struct Discarded {
  DiscardReason reason;
  Stage stage;
  std::string detail;
};

// Per-stage counters. discarded() + kept == input_records.
struct NormalizationReport {
  int64_t input_records = 0;
  int64_t kept = 0;
  int64_t numerals_replaced = 0;
  int64_t annotations_stripped = 0;
  int64_t comments_dropped = 0;
  int64_t notes_dropped = 0;
  int64_t lacunae_expanded = 0;
  int64_t characters_filtered = 0;
  int64_t discarded_malformed = 0;
  int64_t discarded_encoding = 0;
  int64_t discarded_non_greek = 0;
  int64_t discarded_length = 0;

  int64_t discarded() const {
    return discarded_malformed + discarded_encoding + discarded_non_greek + discarded_length;
  }
  // Associative merge for parallel reduction.
  NormalizationReport& operator+=(const NormalizationReport& other);
  friend bool operator==(const NormalizationReport&, const NormalizationReport&) = default;
};

using NormalizeResult = std::variant<CleanRecord, Discarded>;

// Runs every cleaning stage on one record. Counters for this record are added
// to `report` when non-null (input_records and kept included).
NormalizeResult normalize_record(const RawRecord& raw, const text::CharAlphabet& alphabet,
                                 const NormalizerConfig& config = {},
                                 NormalizationReport* report = nullptr);

// Only the final character sequence; used for golden and idempotence tests.
NormalizeResult normalize_text(uint64_t id, std::string_view raw_text,
                               const text::CharAlphabet& alphabet,
                               const NormalizerConfig& config = {},
                               NormalizationReport* report = nullptr);

// Last decimal digit 3 -> test, 4 -> valid, anything else -> train.
Split assign_split(uint64_t id);

struct SplitCounts {
  int64_t inscriptions = 0;
  int64_t words = 0;       // whitespace-delimited tokens
  int64_t characters = 0;  // non-space characters, '-' included
  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

struct CorpusManifest {
  std::array<SplitCounts, 3> splits{};  // indexed by Split
  std::string alphabet_fingerprint;

  SplitCounts& at(Split s) { return splits[static_cast<size_t>(s)]; }
  const SplitCounts& at(Split s) const { return splits[static_cast<size_t>(s)]; }
  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

void count_record(const CleanRecord& record, SplitCounts& counts);
CorpusManifest compute_manifest(const std::vector<CleanRecord>& records,
                                const text::CharAlphabet& alphabet);

struct BuildResult {
  CorpusManifest manifest;
  NormalizationReport report;
};

// Raw interchange: every regular file in `raw_dir` (sorted by name), one
// record per line as id<TAB>raw_text. Emits train.jsonl, valid.jsonl,
// test.jsonl and manifest.json into `out_dir`, records sorted by id.
BuildResult build_corpus(const std::filesystem::path& raw_dir, const std::filesystem::path& out_dir,
                         const text::CharAlphabet& alphabet, const NormalizerConfig& config = {});

std::vector<RawRecord> read_raw_file(const std::filesystem::path& path);

std::string to_jsonl(const std::vector<CleanRecord>& records);
std::vector<CleanRecord> read_split(const std::filesystem::path& dir, Split split);
void write_split(const std::filesystem::path& dir, Split split, const std::vector<CleanRecord>& records);

std::string manifest_to_json(const CorpusManifest& manifest, const NormalizationReport* report);
CorpusManifest manifest_from_json(std::string_view json);
CorpusManifest read_manifest(const std::filesystem::path& dir);

}  // namespace lacuna::corpus

#endif  // LACUNA_CORPUS_PIPELINE_HPP_
