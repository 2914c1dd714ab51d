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


#ifndef LACUNA_SYNTH_SYNTHETIC_HPP_
#define LACUNA_SYNTH_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lacuna/autodiff/rng.hpp"
#include "lacuna/corpus/records.hpp"
#include "lacuna/text/alphabet.hpp"
#include "lacuna/text/vocab.hpp"

// Generated corpora with known structure, used to check that the models
// learn what they should.
namespace lacuna::synth {

// Dedications in which a personal name occurs twice; the second occurrence
// is the gap. The name can only be recovered by copying from the first.
struct NameText {
  std::u32string text;
  std::u32string name;  // full genitive form, e.g. "...ου"
  int first_start = 0;  // first occurrence
  int gap_start = 0;    // second occurrence, stem only
  int gap_length = 0;
};

class NameCopyGenerator {
 public:
  explicit NameCopyGenerator(uint64_t seed) : rng_(seed) {}

  // Random syllabic name stem of 5-9 letters plus the ending "ου".
  std::u32string name();
  NameText make();
  // The text with only the first occurrence replaced by `other`, a name of
  // the same length.
  static NameText substitute_first(const NameText& t, const std::u32string& other);

  static text::CharAlphabet alphabet();
  // Template words; names are deliberately absent so they read as unknown.
  static text::WordVocab vocabulary();

 private:
  ad::Rng rng_;
};

// Records made of pairs "a b." where a = h(b) for a fixed many-to-one map
// h from a large lexicon to a small one. Filling a damaged `a` needs the
// identity of the word to its right; `b` is only loosely constrained.
struct PairCorpusOptions {
  uint64_t seed = 0;          // lexicons and map
  int left_words = 40;        // size of the image of h
  int right_words = 300;
  int min_length = 130;       // characters per record
  int max_length = 170;
};

class PairCorpus {
 public:
  explicit PairCorpus(PairCorpusOptions options);

  // Records with ids first_id, first_id+1, ...; `stream` selects an
  // independent sample.
  std::vector<corpus::CleanRecord> records(size_t count, uint64_t stream, uint64_t first_id = 0) const;
  static text::CharAlphabet alphabet();

 private:
  PairCorpusOptions options_;
  std::vector<std::u32string> left_;
  std::vector<std::u32string> right_;
  std::vector<int> map_;  // right index -> left index
};

}  // namespace lacuna::synth

#endif  // LACUNA_SYNTH_SYNTHETIC_HPP_
