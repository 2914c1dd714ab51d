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

#include "lacuna/text/unicode.hpp"

#include <algorithm>
#include <iterator>

#include "lacuna/text/utf8.hpp"

namespace lacuna::text {

namespace {

struct LowerEntry {
  char32_t from;
  char32_t to;
};

struct MarkRange {
  char32_t lo;
  char32_t hi;
};

struct StripEntry {
  char32_t from;
  int length;
  char32_t to[3];
};

#include "unicode_tables.inc"

}  // namespace

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
  }
  const auto* end = std::end(kLowerTable);
  const auto* it = std::lower_bound(std::begin(kLowerTable), end, cp,
                                    [](const LowerEntry& e, char32_t c) { return e.from < c; });
  return (it != end && it->from == cp) ? it->to : cp;
}

std::u32string to_lower(std::u32string_view text) {
  std::u32string out(text);
  for (auto& cp : out) cp = to_lower(cp);
  return out;
}

bool is_nonspacing_mark(char32_t cp) {
  if (cp < 0x300) return false;
  const auto* end = std::end(kMarkRanges);
  const auto* it = std::upper_bound(std::begin(kMarkRanges), end, cp,
                                    [](char32_t c, const MarkRange& r) { return c < r.lo; });
  if (it == std::begin(kMarkRanges)) return false;
  --it;
  return cp >= it->lo && cp <= it->hi;
}

bool is_greek(char32_t cp) {
  return (cp >= 0x0370 && cp <= 0x03FF) || (cp >= 0x1F00 && cp <= 0x1FFF);
}

bool is_greek_letter(char32_t cp) {
  if (cp >= 0x0391 && cp <= 0x03A9) return cp != 0x03A2;
  if (cp >= 0x03AC && cp <= 0x03CE) return true;
  if (cp >= 0x03D0 && cp <= 0x03FF) return true;  // archaic letters, lunate sigma
  if (cp == 0x0386 || (cp >= 0x0388 && cp <= 0x038F) || cp == 0x0390) return cp != 0x038B && cp != 0x038D;
  if (cp >= 0x1F00 && cp <= 0x1FFF) {
    // Greek Extended interleaves spacing accents with letters.
    static constexpr char32_t kSpacingAccents[] = {0x1FBD, 0x1FBF, 0x1FC0, 0x1FC1, 0x1FCD,
                                                   0x1FCE, 0x1FCF, 0x1FDD, 0x1FDE, 0x1FDF,
                                                   0x1FED, 0x1FEE, 0x1FEF, 0x1FFD, 0x1FFE};
    return std::find(std::begin(kSpacingAccents), std::end(kSpacingAccents), cp) ==
           std::end(kSpacingAccents);
  }
  return false;
}

bool is_latin_letter(char32_t cp) {
  if ((cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z')) return true;
  if (cp >= 0x00C0 && cp <= 0x024F) return cp != 0x00D7 && cp != 0x00F7;
  return cp >= 0x1E00 && cp <= 0x1EFF;
}

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x00A0:
    case 0x2009:
    case 0x200A:
    case 0x202F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x2008;
  }
}

std::u32string strip_diacritics(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0xC0) {
      out.push_back(cp);
      continue;
    }
    if (is_nonspacing_mark(cp)) continue;
    const auto* end = std::end(kStripTable);
    const auto* it = std::lower_bound(std::begin(kStripTable), end, cp,
                                      [](const StripEntry& e, char32_t c) { return e.from < c; });
    if (it != end && it->from == cp) {
      out.append(it->to, it->to + it->length);
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

std::string strip_diacritics(std::string_view utf8) {
  return encode_utf8(strip_diacritics(decode_utf8(utf8)));
}

}  // namespace lacuna::text
