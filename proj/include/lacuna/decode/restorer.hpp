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


#ifndef LACUNA_DECODE_RESTORER_HPP_
#define LACUNA_DECODE_RESTORER_HPP_

#include <string_view>
#include <utility>
#include <vector>

#include "lacuna/decode/beam.hpp"
#include "lacuna/model/model.hpp"
#include "lacuna/text/alphabet.hpp"

namespace lacuna::decode {

// Anything that proposes ranked fills for one '?' gap. Implementations must
// be safe to call from several threads at once.
class Restorer {
 public:
  virtual ~Restorer() = default;
  // `text` holds exactly one contiguous run of '?'.
  virtual std::vector<Hypothesis> restore(std::u32string_view text, const BeamConfig& beam) const = 0;
  virtual const text::CharAlphabet& alphabet() const = 0;
};

class Seq2SeqRestorer : public Restorer {
 public:
  // The model must outlive the restorer and stay unmodified while in use.
  explicit Seq2SeqRestorer(model::Seq2SeqModel& model) : model_(model) {}

  std::vector<Hypothesis> restore(std::u32string_view text, const BeamConfig& beam) const override;
  const text::CharAlphabet& alphabet() const override { return model_.alphabet; }

 private:
  model::Seq2SeqModel& model_;
};

// [begin, end) of a window of at most `max_context` characters around the
// span [gap_start, gap_start + gap_length), centred where the text allows.
std::pair<size_t, size_t> context_window(size_t text_length, size_t gap_start, size_t gap_length,
                                         size_t max_context);

// Location of the single '?' run; throws std::invalid_argument if there is
// none or more than one.
std::pair<size_t, size_t> find_single_gap(std::u32string_view text);

}  // namespace lacuna::decode

#endif  // LACUNA_DECODE_RESTORER_HPP_
