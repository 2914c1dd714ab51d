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

#ifndef LACUNA_TEXT_UTF8_HPP_
#define LACUNA_TEXT_UTF8_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lacuna::text {

class Utf8Error : public std::runtime_error {
 public:
  Utf8Error(const std::string& what, size_t byte_offset)
      : std::runtime_error(what), byte_offset_(byte_offset) {}
  size_t byte_offset() const { return byte_offset_; }

 private:
  size_t byte_offset_;
};

// Strict decoder: rejects overlong forms, surrogates and truncated sequences.
std::u32string decode_utf8(std::string_view bytes);
std::optional<std::u32string> try_decode_utf8(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view text);
std::string encode_utf8(char32_t cp);

// "U+03B1" style rendering used in error messages and alphabet files.
std::string codepoint_hex(char32_t cp);

}  // namespace lacuna::text

#endif  // LACUNA_TEXT_UTF8_HPP_
