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


#ifndef LACUNA_LM_LM_TRAINER_HPP_
#define LACUNA_LM_LM_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

#include "lacuna/autodiff/optim.hpp"
#include "lacuna/autodiff/rng.hpp"
#include "lacuna/corpus/records.hpp"
#include "lacuna/lm/lm.hpp"

namespace lacuna::lm {

struct LmTrainConfig {
  int batch_size = 32;
  int64_t max_steps = 10000;
  int64_t validate_every = 1000;
  uint64_t seed = 0;
  int min_window = 100;  // characters per training window
  int max_window = 1000;
  size_t validation_limit = 200;  // records, 0 = all

  void validate() const;
};

class LmTrainer {
 public:
  LmTrainer(LmModel model, LmTrainConfig config);

  LmModel& model() { return model_; }
  const LmTrainConfig& config() const { return config_; }
  int64_t step() const { return step_; }
  double learning_rate() const { return adam_.config.learning_rate; }
  // Multiplies the learning rate by the model's decay factor.
  void decay();

  // Windows of length uniform in [min_window, min(max_window, length)]
  // (whole record if shorter), from records drawn with replacement.
  std::vector<std::vector<int>> sample_batch(std::span<const corpus::CleanRecord> records);
  // Returns the batch loss. Non-finite values raise train::TrainingError
  // naming the step.
  double train_step(std::span<const std::vector<int>> batch);

 private:
  LmModel model_;
  LmTrainConfig config_;
  ad::AdamState<float> adam_;
  ad::Rng rng_;
  int64_t step_ = 0;
};

struct LmFitResult {
  std::vector<double> losses;
  std::vector<std::pair<int64_t, double>> validation;  // (step, perplexity)
  int64_t best_step = 0;
  double best_perplexity = 1e300;
  double final_learning_rate = 0.0;
};

// Trains for max_steps. Validation perplexity is measured at step 0, every
// validate_every steps and at the end; when it fails to improve on the best
// so far the learning rate decays. The best model goes to `out`, the latest
// to `out` + ".last".
LmFitResult fit_lm(LmTrainer& trainer, std::span<const corpus::CleanRecord> train,
                   std::span<const corpus::CleanRecord> valid, const std::filesystem::path& out, std::ostream* log);

}  // namespace lacuna::lm

#endif  // LACUNA_LM_LM_TRAINER_HPP_
