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

#ifndef LACUNA_TEXT_ALPHABET_HPP_
#define LACUNA_TEXT_ALPHABET_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lacuna/corpus/records.hpp"

namespace lacuna::text {

inline constexpr char32_t kMissingChar = U'-';
inline constexpr char32_t kPredictChar = U'?';
inline constexpr char32_t kNumeralChar = U'0';
inline constexpr char32_t kSpaceChar = U' ';
// Private-use codepoints; never produced by the corpus pipeline.
inline constexpr char32_t kStartChar = 0xE000;
inline constexpr char32_t kPadChar = 0xE001;

// Ordered character inventory. The first six indices are reserved and fixed:
//   0 pad, 1 start-of-output, 2 '?', 3 '-', 4 space, 5 '0'.
// Remaining symbols follow in construction order.
class CharAlphabet {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kStartId = 1;
  static constexpr int kPredictId = 2;
  static constexpr int kMissingId = 3;
  static constexpr int kSpaceId = 4;
  static constexpr int kNumeralId = 5;
  static constexpr int kReservedCount = 6;

  // Reserved symbols only.
  CharAlphabet();

  // Reserved symbols followed by `symbols`; reserved entries inside `symbols`
  // are skipped. Throws std::invalid_argument on duplicates.
  static CharAlphabet with_symbols(std::u32string_view symbols);

  // Lowercase Greek (monotonic and polytonic), space and common punctuation.
  static CharAlphabet greek_default();

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<char32_t>& symbols() const { return symbols_; }
  char32_t symbol(int id) const { return symbols_.at(static_cast<size_t>(id)); }

  std::optional<int> find(char32_t cp) const;
  bool contains(char32_t cp) const { return index_.contains(cp); }
  // Throws std::out_of_range naming the codepoint.
  int id_of(char32_t cp) const;

  // Symbols that may occur in clean corpus text: everything except '?',
  // start and pad.
  bool is_text_symbol(char32_t cp) const;
  // Symbols a decoder may emit: excludes '?', '-', start and pad.
  static bool is_output_id(int id) { return id >= kSpaceId; }

  // FNV-1a over the ordered codepoint list, hex encoded.
  std::string fingerprint() const;

  // Line format: index<TAB>hex codepoint, e.g. "6\t03B1".
  std::string to_tsv() const;
  static CharAlphabet from_tsv(std::string_view tsv);
  void save(const std::filesystem::path& path) const;
  static CharAlphabet load(const std::filesystem::path& path);

  friend bool operator==(const CharAlphabet& a, const CharAlphabet& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  void push(char32_t cp);

  std::vector<char32_t> symbols_;
  std::unordered_map<char32_t, int> index_;
};

// Every character with corpus frequency >= min_count, ordered by descending
// frequency then ascending codepoint, after the reserved block. Throws
// std::invalid_argument on an empty corpus.
CharAlphabet build_char_alphabet(std::span<const corpus::CleanRecord> corpus, int min_count = 1);

}  // namespace lacuna::text

#endif  // LACUNA_TEXT_ALPHABET_HPP_
