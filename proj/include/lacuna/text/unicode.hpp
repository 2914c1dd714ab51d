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

#ifndef LACUNA_TEXT_UNICODE_HPP_
#define LACUNA_TEXT_UNICODE_HPP_

#include <string>
#include <string_view>

namespace lacuna::text {

// Simple (one-to-one) lowercase mapping from the Unicode character database.
char32_t to_lower(char32_t cp);
std::u32string to_lower(std::u32string_view text);

// General category Mn.
bool is_nonspacing_mark(char32_t cp);

// Greek and Coptic or Greek Extended block, letters and marks alike.
bool is_greek(char32_t cp);
bool is_greek_letter(char32_t cp);
bool is_latin_letter(char32_t cp);
bool is_whitespace(char32_t cp);

// Canonical decomposition, removal of every nonspacing mark, then
// recomposition. Idempotent.
std::u32string strip_diacritics(std::u32string_view text);
std::string strip_diacritics(std::string_view utf8);

}  // namespace lacuna::text

#endif  // LACUNA_TEXT_UNICODE_HPP_
