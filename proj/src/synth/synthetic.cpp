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


#include "lacuna/synth/synthetic.hpp"

#include <set>
#include <stdexcept>

#include "lacuna/text/utf8.hpp"

namespace lacuna::synth {

namespace {

constexpr std::u32string_view kLetters = U"αβγδεζηθικλμνξοπρσςτυφχψω";
constexpr std::u32string_view kConsonants = U"βγδθκλμνπρστφχ";
constexpr std::u32string_view kVowels = U"αειοηωυ";

// Formulaic words for the dedication templates.
const std::vector<std::u32string> kFiller = {
    U"ο",        U"δημος",     U"ανεθηκεν",  U"αρετης",    U"ενεκεν",     U"και",
    U"ευνοιας",  U"της",       U"εις",       U"εαυτον",    U"θεοις",      U"ανδριαντα",
    U"στεφανωι", U"χρυσωι",    U"επι",       U"αρχοντος",  U"ιερεως",     U"βουλη",
    U"εδοξεν",   U"τωι",       U"δημωι",     U"στρατηγος", U"γραμματευς", U"εποιησεν",
    U"μνημης",   U"χαριν",     U"αγαθηι",    U"τυχηι",     U"ψηφισμα",    U"πολις",
};
// Words that introduce a personal name.
const std::vector<std::u32string> kCue = {U"υπερ", U"του", U"υιου", U"θυγατρος", U"πατρος"};

template <typename C>
const auto& pick(ad::Rng& rng, const C& items) {
  return items[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(items.size()) - 1))];
}

std::u32string random_word(ad::Rng& rng, int min_len, int max_len) {
  const int len = static_cast<int>(rng.uniform_int(min_len, max_len));
  std::u32string w;
  for (int i = 0; i < len; ++i) w += (i % 2 == 0 ? pick(rng, kConsonants) : pick(rng, kVowels));
  return w;
}

void append_fillers(std::u32string& out, ad::Rng& rng, int count) {
  for (int i = 0; i < count; ++i) {
    out += pick(rng, kFiller);
    out += U' ';
  }
}

}  // namespace

std::u32string NameCopyGenerator::name() {
  // Stems of 5 to 9 letters, alternating so they stay pronounceable.
  const int stem = static_cast<int>(rng_.uniform_int(5, 9));
  std::u32string n;
  bool consonant = rng_.bernoulli(0.5);
  for (int i = 0; i < stem; ++i) {
    n += consonant ? pick(rng_, kConsonants) : pick(rng_, kVowels);
    // Occasional double consonant, as in -λλ-.
    if (!consonant || i + 1 >= stem || !rng_.bernoulli(0.15)) consonant = !consonant;
  }
  // The stem must end on a consonant before the ending.
  if (kVowels.find(n.back()) != std::u32string_view::npos) n.back() = pick(rng_, kConsonants);
  return n + U"ου";
}

NameText NameCopyGenerator::make() {
  NameText t;
  t.name = name();
  std::u32string& s = t.text;
  append_fillers(s, rng_, static_cast<int>(rng_.uniform_int(0, 3)));
  s += pick(rng_, kCue);
  s += U' ';
  t.first_start = static_cast<int>(s.size());
  s += t.name;
  s += U' ';
  append_fillers(s, rng_, static_cast<int>(rng_.uniform_int(2, 6)));
  s += pick(rng_, kCue);
  s += U' ';
  t.gap_start = static_cast<int>(s.size());
  t.gap_length = static_cast<int>(t.name.size()) - 2;  // the stem
  s += t.name;
  const int tail = static_cast<int>(rng_.uniform_int(0, 3));
  for (int i = 0; i < tail; ++i) {
    s += U' ';
    s += pick(rng_, kFiller);
  }
  return t;
}

NameText NameCopyGenerator::substitute_first(const NameText& t, const std::u32string& other) {
  if (other.size() != t.name.size()) throw std::invalid_argument("substitute name must keep the length");
  NameText out = t;
  out.text.replace(static_cast<size_t>(t.first_start), other.size(), other);
  return out;
}

text::CharAlphabet NameCopyGenerator::alphabet() { return text::CharAlphabet::with_symbols(kLetters); }

text::WordVocab NameCopyGenerator::vocabulary() {
  std::vector<std::pair<std::u32string, int64_t>> words;
  for (const auto& w : kFiller) words.emplace_back(w, 1);
  for (const auto& w : kCue) words.emplace_back(w, 1);
  return text::WordVocab::from_entries(std::move(words));
}

PairCorpus::PairCorpus(PairCorpusOptions options) : options_(options) {
  if (options.left_words < 1 || options.right_words < 1 || options.min_length < 16 ||
      options.max_length < options.min_length) {
    throw std::invalid_argument("bad pair corpus options");
  }
  ad::Rng rng(options.seed);
  std::set<std::u32string> seen;
  auto fresh = [&](int lo, int hi) {
    for (;;) {
      auto w = random_word(rng, lo, hi);
      if (seen.insert(w).second) return w;
    }
  };
  for (int i = 0; i < options.left_words; ++i) left_.push_back(fresh(3, 5));
  for (int i = 0; i < options.right_words; ++i) right_.push_back(fresh(4, 6));
  for (int i = 0; i < options.right_words; ++i) {
    map_.push_back(static_cast<int>(rng.uniform_int(0, options.left_words - 1)));
  }
}

std::vector<corpus::CleanRecord> PairCorpus::records(size_t count, uint64_t stream, uint64_t first_id) const {
  ad::Rng rng = ad::Rng(options_.seed).fork(stream + 1);
  std::vector<corpus::CleanRecord> out;
  out.reserve(count);
  for (size_t r = 0; r < count; ++r) {
    const size_t target = static_cast<size_t>(rng.uniform_int(options_.min_length, options_.max_length));
    std::u32string s;
    for (;;) {
      const int b = static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(right_.size()) - 1));
      std::u32string pair = left_[static_cast<size_t>(map_[static_cast<size_t>(b)])];
      pair += U' ';
      pair += right_[static_cast<size_t>(b)];
      pair += U'.';
      const size_t extra = pair.size() + (s.empty() ? 0 : 1);
      if (!s.empty() && s.size() + extra > target) break;
      if (!s.empty()) s += U' ';
      s += pair;
    }
    out.push_back({first_id + r, text::encode_utf8(s), corpus::Split::kTrain});
  }
  return out;
}

text::CharAlphabet PairCorpus::alphabet() {
  std::u32string symbols(kLetters);
  symbols += U'.';
  return text::CharAlphabet::with_symbols(symbols);
}

}  // namespace lacuna::synth
