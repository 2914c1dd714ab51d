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


#ifndef LACUNA_TRAIN_TRAINER_HPP_
#define LACUNA_TRAIN_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"
#include "lacuna/autodiff/optim.hpp"
#include "lacuna/autodiff/rng.hpp"
#include "lacuna/corpus/records.hpp"
#include "lacuna/decode/beam.hpp"
#include "lacuna/model/model.hpp"
#include "lacuna/train/sampling.hpp"

namespace lacuna::train {

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 1e-3;
  double clip = 5.0;
  double scheduled_sampling = 0.5;
  int64_t max_steps = 10000;
  int64_t checkpoint_every = 1000;
  uint64_t seed = 0;
  size_t validation_limit = 200;  // records scored per validation pass, 0 = all
  decode::BeamConfig validation_beam;
  SamplingBounds bounds;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);

struct StepStats {
  int64_t step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;      // after clipping
  double raw_grad_norm = 0.0;  // before clipping
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owns a model and its optimizer state during training. One random stream
// drives example sampling, dropout and scheduled sampling, so (corpus,
// config, seed) fix every step.
class Trainer {
 public:
  Trainer(model::Seq2SeqModel model, TrainConfig config);

  const TrainConfig& config() const { return config_; }
  model::Seq2SeqModel& model() { return model_; }
  const model::Seq2SeqModel& model() const { return model_; }
  int64_t step() const { return step_; }
  ad::Rng& rng() { return rng_; }

  // batch_size examples from records drawn uniformly with replacement.
  std::vector<TrainingExample> sample_batch(std::span<const corpus::CleanRecord> records);

  // forward_loss -> backward -> clip -> Adam. Throws TrainingError naming
  // the step if anything goes non-finite.
  StepStats train_step(std::span<const TrainingExample> batch);

  // Model plus optimizer moments, step counter and random state.
  void save_checkpoint(const std::filesystem::path& path) const;
  static Trainer resume(const std::filesystem::path& path, TrainConfig config);

 private:
  model::Seq2SeqModel model_;
  TrainConfig config_;
  ad::AdamState<float> adam_;
  ad::Rng rng_;
  int64_t step_ = 0;
};

struct ValidationPoint {
  int64_t step = 0;
  double cer = 0.0;
  double top_k = 0.0;
};

struct FitResult {
  std::vector<StepStats> steps;
  std::vector<ValidationPoint> validation;
  int64_t best_step = 0;
  double best_cer = 1e300;
};

// Trains for config.max_steps steps. Validates at step 0, every
// checkpoint_every steps and at the end; the best-CER model is written to
// `out` and the latest full training state to `out` + ".last". With no
// validation records the latest model is also the best. Progress goes to
// `log` as one JSON object per line.
FitResult fit(Trainer& trainer, std::span<const corpus::CleanRecord> train,
              std::span<const corpus::CleanRecord> valid, const std::filesystem::path& out, std::ostream* log);

}  // namespace lacuna::train

#endif  // LACUNA_TRAIN_TRAINER_HPP_
