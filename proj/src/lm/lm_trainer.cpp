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


#include "lacuna/lm/lm_trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "lacuna/autodiff/graph.hpp"
#include "lacuna/text/utf8.hpp"
#include "lacuna/train/trainer.hpp"

namespace lacuna::lm {

void LmTrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (max_steps < 0) throw std::invalid_argument("max steps must not be negative");
  if (validate_every < 1) throw std::invalid_argument("validation cadence must be positive");
  if (min_window < 1 || max_window < min_window) throw std::invalid_argument("bad window bounds");
}

LmTrainer::LmTrainer(LmModel model, LmTrainConfig config)
    : model_(std::move(model)), config_(config), rng_(config.seed) {
  config_.validate();
  model_.config.validate();
  adam_ = ad::make_adam_state(model_.params, {.learning_rate = model_.config.learning_rate});
}

void LmTrainer::decay() { adam_.config.learning_rate *= model_.config.decay; }

std::vector<std::vector<int>> LmTrainer::sample_batch(std::span<const corpus::CleanRecord> records) {
  if (records.empty()) throw std::invalid_argument("cannot sample from an empty corpus");
  std::vector<std::vector<int>> batch;
  size_t misses = 0;
  while (static_cast<int>(batch.size()) < config_.batch_size) {
    const auto& rec = records[static_cast<size_t>(rng_.uniform_int(0, static_cast<int64_t>(records.size()) - 1))];
    const auto text = text::decode_utf8(rec.text);
    if (text.empty()) {
      if (++misses > 100 * records.size() + 1000) throw std::invalid_argument("corpus has only empty records");
      continue;
    }
    const int n = static_cast<int>(text.size());
    const int hi = std::min(config_.max_window, n);
    const int lo = std::min(config_.min_window, hi);
    const int len = static_cast<int>(rng_.uniform_int(lo, hi));
    const int start = static_cast<int>(rng_.uniform_int(0, n - len));
    batch.push_back(model_.encode(std::u32string_view(text).substr(static_cast<size_t>(start), static_cast<size_t>(len))));
  }
  return batch;
}

double LmTrainer::train_step(std::span<const std::vector<int>> batch) {
  try {
    model_.params.zero_grad();
    ad::Graph<float> g(ad::Mode::kTraining, &rng_);
    ad::Var loss = lm_loss(g, model_.params, model_.config, batch);
    g.backward(loss);
    ad::clip_global_norm(model_.params, model_.config.clip);
    ad::adam_step(model_.params, adam_);
    ++step_;
    return g.value(loss).data[0];
  } catch (const ad::NonFiniteError& e) {
    throw train::TrainingError("non-finite value at step " + std::to_string(step_ + 1) + ": " + e.what());
  }
}

LmFitResult fit_lm(LmTrainer& trainer, std::span<const corpus::CleanRecord> train,
                   std::span<const corpus::CleanRecord> valid, const std::filesystem::path& out, std::ostream* log) {
  LmFitResult result;
  const auto& cfg = trainer.config();
  if (cfg.validation_limit > 0 && valid.size() > cfg.validation_limit) valid = valid.first(cfg.validation_limit);
  std::filesystem::path last = out;
  last += ".last";

  auto checkpoint = [&]() {
    double ppl = 0.0;
    bool improved = true;
    if (!valid.empty()) {
      ppl = perplexity(trainer.model(), valid, static_cast<size_t>(cfg.max_window));
      result.validation.emplace_back(trainer.step(), ppl);
      improved = ppl < result.best_perplexity;
      if (!improved) trainer.decay();
    }
    if (improved) {
      result.best_perplexity = ppl;
      result.best_step = trainer.step();
      save_lm(out, trainer.model());
    }
    save_lm(last, trainer.model());
    if (log != nullptr) {
      nlohmann::json line = {{"step", trainer.step()}, {"checkpoint", true}, {"learning_rate", trainer.learning_rate()}};
      if (!valid.empty()) line["valid_perplexity"] = ppl;
      *log << line.dump() << '\n' << std::flush;
    }
  };

  checkpoint();
  while (trainer.step() < cfg.max_steps) {
    const double loss = trainer.train_step(trainer.sample_batch(train));
    result.losses.push_back(loss);
    if (log != nullptr) *log << nlohmann::json{{"step", trainer.step()}, {"loss", loss}}.dump() << '\n';
    if (trainer.step() % cfg.validate_every == 0 || trainer.step() == cfg.max_steps) checkpoint();
  }
  result.final_learning_rate = trainer.learning_rate();
  return result;
}

}  // namespace lacuna::lm
