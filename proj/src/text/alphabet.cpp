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

#include "lacuna/text/alphabet.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lacuna/text/unicode.hpp"
#include "lacuna/text/utf8.hpp"

namespace lacuna::text {

namespace {

constexpr char32_t kReserved[CharAlphabet::kReservedCount] = {
    kPadChar, kStartChar, kPredictChar, kMissingChar, kSpaceChar, kNumeralChar};

bool is_reserved(char32_t cp) {
  return std::find(std::begin(kReserved), std::end(kReserved), cp) != std::end(kReserved);
}

}  // namespace

CharAlphabet::CharAlphabet() {
  for (char32_t cp : kReserved) push(cp);
}

void CharAlphabet::push(char32_t cp) {
  if (index_.contains(cp)) {
    throw std::invalid_argument("duplicate alphabet symbol " + codepoint_hex(cp));
  }
  index_.emplace(cp, static_cast<int>(symbols_.size()));
  symbols_.push_back(cp);
}

CharAlphabet CharAlphabet::with_symbols(std::u32string_view symbols) {
  CharAlphabet alphabet;
  for (char32_t cp : symbols) {
    if (is_reserved(cp)) continue;
    alphabet.push(cp);
  }
  return alphabet;
}

CharAlphabet CharAlphabet::greek_default() {
  std::u32string symbols;
  for (char32_t cp = 0x03B1; cp <= 0x03C9; ++cp) symbols.push_back(cp);
  for (char32_t cp : {0x03AC, 0x03AD, 0x03AE, 0x03AF, 0x03CC, 0x03CD, 0x03CE, 0x03CA, 0x03CB,
                      0x0390, 0x03B0, 0x03DD, 0x03DB, 0x03D9, 0x03E1, 0x03F2, 0x0371, 0x0373,
                      0x0377}) {
    symbols.push_back(cp);
  }
  for (char32_t cp = 0x1F00; cp <= 0x1FFF; ++cp) {
    if (is_greek_letter(cp) && to_lower(cp) == cp) symbols.push_back(cp);
  }
  for (char32_t cp : {U'.', U',', U'·', U';', U':', U'\''}) symbols.push_back(cp);
  return with_symbols(symbols);
}

std::optional<int> CharAlphabet::find(char32_t cp) const {
  auto it = index_.find(cp);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CharAlphabet::id_of(char32_t cp) const {
  auto it = index_.find(cp);
  if (it == index_.end()) {
    throw std::out_of_range("symbol " + codepoint_hex(cp) + " is not in the alphabet");
  }
  return it->second;
}

bool CharAlphabet::is_text_symbol(char32_t cp) const {
  if (cp == kPredictChar || cp == kStartChar || cp == kPadChar) return false;
  return contains(cp);
}

std::string CharAlphabet::fingerprint() const {
  uint64_t hash = 1469598103934665603ull;
  for (char32_t cp : symbols_) {
    for (int shift = 0; shift < 32; shift += 8) {
      hash ^= (cp >> shift) & 0xFF;
      hash *= 1099511628211ull;
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string CharAlphabet::to_tsv() const {
  std::string out;
  char buf[32];
  for (size_t i = 0; i < symbols_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu\t%04X\n", i, static_cast<unsigned>(symbols_[i]));
    out += buf;
  }
  return out;
}

CharAlphabet CharAlphabet::from_tsv(std::string_view tsv) {
  std::map<long, char32_t> by_index;
  std::istringstream in{std::string(tsv)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::invalid_argument("alphabet line " + std::to_string(line_no) + ": missing tab");
    }
    long index = 0;
    unsigned cp = 0;
    std::string hex = line.substr(tab + 1);
    if (hex.rfind("U+", 0) == 0) hex = hex.substr(2);
    auto r1 = std::from_chars(line.data(), line.data() + tab, index);
    auto r2 = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != hex.data() + hex.size()) {
      throw std::invalid_argument("alphabet line " + std::to_string(line_no) + ": malformed");
    }
    if (!by_index.emplace(index, static_cast<char32_t>(cp)).second) {
      throw std::invalid_argument("alphabet line " + std::to_string(line_no) + ": duplicate index");
    }
  }
  CharAlphabet alphabet;
  long expected = 0;
  for (const auto& [index, cp] : by_index) {
    if (index != expected++) throw std::invalid_argument("alphabet indices are not contiguous");
    if (index < kReservedCount) {
      if (cp != kReserved[index]) {
        throw std::invalid_argument("alphabet reserved index " + std::to_string(index) +
                                    " holds " + codepoint_hex(cp));
      }
      continue;
    }
    if (is_reserved(cp)) throw std::invalid_argument("reserved symbol outside reserved block");
    alphabet.push(cp);
  }
  return alphabet;
}

void CharAlphabet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_tsv();
}

CharAlphabet CharAlphabet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_tsv(buf.str());
}

CharAlphabet build_char_alphabet(std::span<const corpus::CleanRecord> corpus, int min_count) {
  if (corpus.empty()) throw std::invalid_argument("cannot build an alphabet from an empty corpus");
  std::map<char32_t, long> counts;
  for (const auto& record : corpus) {
    for (char32_t cp : decode_utf8(record.text)) ++counts[cp];
  }
  std::vector<std::pair<char32_t, long>> ranked;
  for (const auto& [cp, n] : counts) {
    if (n >= min_count && !is_reserved(cp)) ranked.emplace_back(cp, n);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::u32string symbols;
  symbols.reserve(ranked.size());
  for (const auto& entry : ranked) symbols.push_back(entry.first);
  return CharAlphabet::with_symbols(symbols);
}

}  // namespace lacuna::text
