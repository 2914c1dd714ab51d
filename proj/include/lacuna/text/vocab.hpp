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

#ifndef LACUNA_TEXT_VOCAB_HPP_
#define LACUNA_TEXT_VOCAB_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lacuna/corpus/records.hpp"
#include "lacuna/text/alphabet.hpp"

namespace lacuna::text {

inline constexpr size_t kDefaultWordCap = 100000;

// Capped word list. Index 0 is the no-word entry used for spaces, index 1
// is unk (unknown or damaged words); real words start at 2.
class WordVocab {
 public:
  static constexpr int kNoWordId = 0;
  static constexpr int kUnkId = 1;
  static constexpr int kReservedCount = 2;

  WordVocab() = default;

  // `words` in index order with their corpus counts. Throws on duplicates or
  // on words containing '-', '?' or whitespace.
  static WordVocab from_entries(std::vector<std::pair<std::u32string, int64_t>> words);

  int size() const { return kReservedCount + static_cast<int>(words_.size()); }
  // unk for unknown words and for any word containing '-' or '?'.
  int lookup(std::u32string_view word) const;
  const std::u32string& word(int id) const;
  int64_t count(int id) const;

  // Line format: index<TAB>word<TAB>count, real words only.
  std::string to_tsv() const;
  static WordVocab from_tsv(std::string_view tsv);
  void save(const std::filesystem::path& path) const;
  static WordVocab load(const std::filesystem::path& path);

  friend bool operator==(const WordVocab& a, const WordVocab& b) { return a.words_ == b.words_; }

 private:
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::u32string_view s) const { return std::hash<std::u32string_view>{}(s); }
  };

  std::vector<std::pair<std::u32string, int64_t>> words_;
  std::unordered_map<std::u32string, int, Hash, std::equal_to<>> index_;
};

// Top `cap` whitespace-delimited words by frequency, ties broken by
// codepoint order. Damaged words (containing '-') are not counted.
WordVocab build_word_vocab(std::span<const corpus::CleanRecord> corpus, size_t cap = kDefaultWordCap);

class EncodeError : public std::invalid_argument {
 public:
  EncodeError(const std::string& what, size_t position, char32_t symbol)
      : std::invalid_argument(what), position_(position), symbol_(symbol) {}
  size_t position() const { return position_; }
  char32_t symbol() const { return symbol_; }

 private:
  size_t position_;
  char32_t symbol_;
};

// Aligned per-character streams.
struct EncodedSequence {
  std::vector<int> char_ids;
  std::vector<int> word_ids;
  std::vector<uint8_t> predict_mask;

  size_t size() const { return char_ids.size(); }
  int predict_count() const;
  friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;
};

// With a null `vocab` every non-space position gets unk.
EncodedSequence encode(std::u32string_view text, const CharAlphabet& alphabet, const WordVocab* vocab);
EncodedSequence encode(std::string_view utf8, const CharAlphabet& alphabet, const WordVocab* vocab);

std::u32string decode(std::span<const int> char_ids, const CharAlphabet& alphabet);

// Whitespace-delimited words of `text`.
std::vector<std::u32string_view> split_words(std::u32string_view text);

}  // namespace lacuna::text

#endif  // LACUNA_TEXT_VOCAB_HPP_
