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

#include "lacuna/text/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "lacuna/text/unicode.hpp"
#include "lacuna/text/utf8.hpp"

namespace lacuna::text {

namespace {

bool is_damaged(std::u32string_view word) {
  return word.find(kMissingChar) != std::u32string_view::npos ||
         word.find(kPredictChar) != std::u32string_view::npos;
}

}  // namespace

std::vector<std::u32string_view> split_words(std::u32string_view text) {
  std::vector<std::u32string_view> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_whitespace(text[i])) ++i;
    size_t j = i;
    while (j < text.size() && !is_whitespace(text[j])) ++j;
    if (j > i) words.push_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

WordVocab WordVocab::from_entries(std::vector<std::pair<std::u32string, int64_t>> words) {
  WordVocab vocab;
  vocab.words_ = std::move(words);
  for (size_t i = 0; i < vocab.words_.size(); ++i) {
    const auto& w = vocab.words_[i].first;
    if (w.empty() || is_damaged(w) ||
        std::any_of(w.begin(), w.end(), [](char32_t c) { return is_whitespace(c); })) {
      throw std::invalid_argument("invalid vocabulary word '" + encode_utf8(w) + "'");
    }
    if (!vocab.index_.emplace(w, kReservedCount + static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate vocabulary word '" + encode_utf8(w) + "'");
    }
  }
  return vocab;
}

int WordVocab::lookup(std::u32string_view word) const {
  if (is_damaged(word)) return kUnkId;
  auto it = index_.find(word);
  return it == index_.end() ? kUnkId : it->second;
}

const std::u32string& WordVocab::word(int id) const {
  static const std::u32string kNoWord = U"<no-word>";
  static const std::u32string kUnk = U"<unk>";
  if (id == kNoWordId) return kNoWord;
  if (id == kUnkId) return kUnk;
  return words_.at(static_cast<size_t>(id - kReservedCount)).first;
}

int64_t WordVocab::count(int id) const {
  if (id < kReservedCount) return 0;
  return words_.at(static_cast<size_t>(id - kReservedCount)).second;
}

std::string WordVocab::to_tsv() const {
  std::string out;
  for (size_t i = 0; i < words_.size(); ++i) {
    out += std::to_string(kReservedCount + i);
    out += '\t';
    out += encode_utf8(words_[i].first);
    out += '\t';
    out += std::to_string(words_[i].second);
    out += '\n';
  }
  return out;
}

WordVocab WordVocab::from_tsv(std::string_view tsv) {
  std::vector<std::pair<std::u32string, int64_t>> entries;
  std::istringstream in{std::string(tsv)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw std::invalid_argument("vocab line " + std::to_string(line_no) + ": expected 3 fields");
    }
    long index = 0;
    int64_t count = 0;
    auto r1 = std::from_chars(line.data(), line.data() + t1, index);
    auto r2 = std::from_chars(line.data() + t2 + 1, line.data() + line.size(), count);
    if (r1.ec != std::errc() || r2.ec != std::errc()) {
      throw std::invalid_argument("vocab line " + std::to_string(line_no) + ": malformed number");
    }
    if (index != kReservedCount + static_cast<long>(entries.size())) {
      throw std::invalid_argument("vocab line " + std::to_string(line_no) + ": index out of order");
    }
    entries.emplace_back(decode_utf8(std::string_view(line).substr(t1 + 1, t2 - t1 - 1)), count);
  }
  return from_entries(std::move(entries));
}

void WordVocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_tsv();
}

WordVocab WordVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_tsv(buf.str());
}

WordVocab build_word_vocab(std::span<const corpus::CleanRecord> corpus, size_t cap) {
  std::map<std::u32string, int64_t> counts;
  for (const auto& record : corpus) {
    const std::u32string text = decode_utf8(record.text);
    for (auto word : split_words(text)) {
      if (!is_damaged(word)) ++counts[std::u32string(word)];
    }
  }
  std::vector<std::pair<std::u32string, int64_t>> ranked(counts.begin(), counts.end());
  // std::map iteration is already lexicographic; a stable sort keeps it for ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > cap) ranked.resize(cap);
  return WordVocab::from_entries(std::move(ranked));
}

int EncodedSequence::predict_count() const {
  return static_cast<int>(std::count(predict_mask.begin(), predict_mask.end(), uint8_t{1}));
}

EncodedSequence encode(std::u32string_view text, const CharAlphabet& alphabet, const WordVocab* vocab) {
  EncodedSequence seq;
  seq.char_ids.resize(text.size());
  seq.word_ids.resize(text.size(), WordVocab::kNoWordId);
  seq.predict_mask.resize(text.size(), 0);
  for (size_t i = 0; i < text.size(); ++i) {
    const char32_t cp = text[i];
    const auto id = alphabet.find(cp);
    if (!id || cp == kStartChar || cp == kPadChar) {
      throw EncodeError("character " + codepoint_hex(cp) + " ('" + encode_utf8(cp) +
                            "') at position " + std::to_string(i) + " is not in the alphabet",
                        i, cp);
    }
    seq.char_ids[i] = *id;
    seq.predict_mask[i] = cp == kPredictChar ? 1 : 0;
  }
  size_t i = 0;
  while (i < text.size()) {
    if (is_whitespace(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && !is_whitespace(text[j])) ++j;
    const int word_id = vocab ? vocab->lookup(text.substr(i, j - i)) : WordVocab::kUnkId;
    std::fill(seq.word_ids.begin() + static_cast<long>(i), seq.word_ids.begin() + static_cast<long>(j),
              word_id);
    i = j;
  }
  return seq;
}

EncodedSequence encode(std::string_view utf8, const CharAlphabet& alphabet, const WordVocab* vocab) {
  return encode(std::u32string_view(decode_utf8(utf8)), alphabet, vocab);
}

std::u32string decode(std::span<const int> char_ids, const CharAlphabet& alphabet) {
  std::u32string out;
  out.reserve(char_ids.size());
  for (int id : char_ids) out.push_back(alphabet.symbol(id));
  return out;
}

}  // namespace lacuna::text
