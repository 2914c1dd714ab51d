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

#include <doctest.h>

#include <random>

#include "lacuna/text/alphabet.hpp"
#include "lacuna/text/unicode.hpp"
#include "lacuna/text/utf8.hpp"
#include "lacuna/text/vocab.hpp"

using namespace lacuna;
using namespace lacuna::text;

namespace {

std::vector<corpus::CleanRecord> records(std::initializer_list<const char*> texts) {
  std::vector<corpus::CleanRecord> out;
  uint64_t id = 0;
  for (const char* t : texts) out.push_back({id++, t, corpus::Split::kTrain});
  return out;
}

}  // namespace

TEST_CASE("utf8 round trip and rejection") {
  const std::string s = "μηδέν ἄγαν \xF0\x90\x85\x80";
  CHECK(encode_utf8(decode_utf8(s)) == s);
  CHECK_THROWS_AS(decode_utf8("\xC0\xAF"), Utf8Error);   // overlong
  CHECK_THROWS_AS(decode_utf8("\xED\xA0\x80"), Utf8Error);  // surrogate
  CHECK_THROWS_AS(decode_utf8("\xCE"), Utf8Error);       // truncated
  CHECK_FALSE(try_decode_utf8("\xFF").has_value());
}

TEST_CASE("strip_diacritics matches canonical decomposition tables") {
  // Expected values computed with Python unicodedata (NFD, drop Mn, NFC).
  CHECK(strip_diacritics(std::string_view("ἄγαν")) == "αγαν");
  CHECK(strip_diacritics(std::string_view("αγαν")) == "αγαν");
  CHECK(strip_diacritics(std::string_view("μηδέν ἄγαν")) == "μηδεν αγαν");
  CHECK(strip_diacritics(std::string_view("ἀπολλοδώρου")) == "απολλοδωρου");
  CHECK(strip_diacritics(std::string_view("ᾧ τῆς Ἀθηνᾶς ῥήτωρ")) == "ω της Αθηνας ρητωρ");
  CHECK(strip_diacritics(std::string_view("ΐΰϊϋ")) == "ιυιυ");
  CHECK(strip_diacritics(std::string_view("ᾼ ᾳ")) == "Α α");
  // Already decomposed input.
  CHECK(strip_diacritics(std::string_view("α\xCC\x81\xCC\x93β")) == "αβ");
}

TEST_CASE("strip_diacritics is idempotent and never adds base letters") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(0x1F00, 0x1FFF);
  std::uniform_int_distribution<int> plain(0x3B1, 0x3C9);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string s;
    for (int i = 0; i < 40; ++i) {
      s.push_back(static_cast<char32_t>(i % 3 == 0 ? pick(rng) : plain(rng)));
      if (i % 7 == 0) s.push_back(0x0301);
    }
    const auto once = strip_diacritics(s);
    CHECK(strip_diacritics(once) == once);
    size_t marks = 0;
    for (char32_t c : s) marks += is_nonspacing_mark(c) ? 1 : 0;
    CHECK(once.size() == s.size() - marks);
    for (char32_t c : once) CHECK_FALSE(is_nonspacing_mark(c));
  }
}

TEST_CASE("lowercase covers Greek") {
  CHECK(to_lower(U'Α') == U'α');
  CHECK(to_lower(U'Ἀ') == U'ἀ');
  CHECK(to_lower(U'Σ') == U'σ');
  CHECK(to_lower(U'-') == U'-');
}

TEST_CASE("alphabet reserved block and bijection") {
  CharAlphabet a = CharAlphabet::with_symbols(U"αβ");
  CHECK(a.size() == CharAlphabet::kReservedCount + 2);
  CHECK(a.id_of(U'?') == CharAlphabet::kPredictId);
  CHECK(a.id_of(U'-') == CharAlphabet::kMissingId);
  CHECK(a.id_of(U' ') == CharAlphabet::kSpaceId);
  CHECK(a.id_of(U'0') == CharAlphabet::kNumeralId);
  for (int i = 0; i < a.size(); ++i) CHECK(a.id_of(a.symbol(i)) == i);
  CHECK_THROWS_AS(CharAlphabet::with_symbols(U"αα"), std::invalid_argument);
  CHECK_THROWS_AS(a.id_of(U'γ'), std::out_of_range);
  CHECK(CharAlphabet::from_tsv(a.to_tsv()) == a);
  CHECK(CharAlphabet::from_tsv(a.to_tsv()).fingerprint() == a.fingerprint());
  CHECK(CharAlphabet::with_symbols(U"βα").fingerprint() != a.fingerprint());
}

TEST_CASE("build_char_alphabet ordering") {
  SUBCASE("reserved plus corpus symbols") {
    auto a = build_char_alphabet(records({"αβ αβ"}));
    CHECK(a.size() == CharAlphabet::kReservedCount + 2);
    CHECK(a.contains(U'α'));
    CHECK(a.contains(U'β'));
  }
  SUBCASE("frequency then codepoint") {
    auto a = build_char_alphabet(records({"γββαα δ"}));
    CHECK(a.symbol(6) == U'α');  // ties on count 2 go by codepoint
    CHECK(a.symbol(7) == U'β');
    CHECK(a.symbol(8) == U'γ');
    CHECK(a.symbol(9) == U'δ');
  }
  SUBCASE("min_count") {
    auto a = build_char_alphabet(records({"ααβ"}), 2);
    CHECK(a.contains(U'α'));
    CHECK_FALSE(a.contains(U'β'));
  }
  CHECK_THROWS_AS(build_char_alphabet({}), std::invalid_argument);
}

TEST_CASE("build_word_vocab") {
  auto v = build_word_vocab(records({"α β β"}));
  CHECK(v.size() == 4);
  CHECK(v.word(2) == U"β");
  CHECK(v.word(3) == U"α");
  CHECK(v.count(2) == 2);

  auto capped = build_word_vocab(records({"α β β"}), 1);
  CHECK(capped.size() == 3);
  CHECK(capped.lookup(U"β") == 2);
  CHECK(capped.lookup(U"α") == WordVocab::kUnkId);

  auto damaged = build_word_vocab(records({"ἄ--ν ἄ--ν μηδέν"}));
  CHECK(damaged.size() == 3);
  CHECK(damaged.lookup(U"ἄ--ν") == WordVocab::kUnkId);

  auto ties = build_word_vocab(records({"γ β α"}));
  CHECK(ties.word(2) == U"α");
  CHECK(ties.word(4) == U"γ");
  CHECK(WordVocab::from_tsv(ties.to_tsv()) == ties);
}

TEST_CASE("vocab cap holds for random corpora") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::string text;
    for (int w = 0; w < 200; ++w) {
      const int len = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < len; ++k) text += encode_utf8(static_cast<char32_t>(0x3B1 + rng() % 5));
      text += ' ';
    }
    const size_t cap = 1 + rng() % 30;
    auto v = build_word_vocab(records({text.c_str()}), cap);
    CHECK(static_cast<size_t>(v.size()) <= cap + 2);
  }
}

TEST_CASE("encode aligns the three streams") {
  auto corpus = records({"μηδέν ἄγαν μηδέν"});
  auto alphabet = build_char_alphabet(corpus);
  auto vocab = build_word_vocab(corpus);

  const std::u32string text = U"μηδέν ἄ??ν";
  auto seq = encode(text, alphabet, &vocab);
  REQUIRE(seq.size() == text.size());
  CHECK(seq.word_ids.size() == seq.size());
  CHECK(seq.predict_mask.size() == seq.size());
  const int medden = vocab.lookup(U"μηδέν");
  CHECK(medden >= WordVocab::kReservedCount);
  for (int i = 0; i < 5; ++i) CHECK(seq.word_ids[i] == medden);
  CHECK(seq.word_ids[5] == WordVocab::kNoWordId);
  for (int i = 6; i < 10; ++i) CHECK(seq.word_ids[i] == WordVocab::kUnkId);
  CHECK(seq.predict_count() == 2);
  CHECK(seq.predict_mask[7] == 1);
  CHECK(seq.predict_mask[8] == 1);
  CHECK(seq.char_ids[7] == CharAlphabet::kPredictId);
  CHECK(decode(seq.char_ids, alphabet) == text);

  auto plain = encode(std::u32string_view(U"μηδέν"), alphabet, &vocab);
  CHECK(plain.predict_count() == 0);

  auto space = encode(std::u32string_view(U" "), alphabet, &vocab);
  CHECK(space.word_ids == std::vector<int>{WordVocab::kNoWordId});

  try {
    encode(std::u32string_view(U"μηx"), alphabet, &vocab);
    FAIL("expected EncodeError");
  } catch (const EncodeError& e) {
    CHECK(e.position() == 2);
    CHECK(e.symbol() == U'x');
  }
}

TEST_CASE("word spans carry a constant word id") {
  auto corpus = records({"αβ γδ αβ εζη"});
  auto alphabet = build_char_alphabet(corpus);
  auto vocab = build_word_vocab(corpus);
  std::mt19937 rng(11);
  const std::u32string pool = U"αβγδεζη -?";
  for (int trial = 0; trial < 200; ++trial) {
    std::u32string t;
    for (int i = 0; i < 30; ++i) t.push_back(pool[rng() % pool.size()]);
    auto seq = encode(t, alphabet, &vocab);
    CHECK(decode(seq.char_ids, alphabet) == t);
    for (size_t i = 1; i < t.size(); ++i) {
      if (t[i] != U' ' && t[i - 1] != U' ') CHECK(seq.word_ids[i] == seq.word_ids[i - 1]);
      if (t[i] == U' ') CHECK(seq.word_ids[i] == WordVocab::kNoWordId);
    }
  }
}
