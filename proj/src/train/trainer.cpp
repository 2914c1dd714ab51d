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


#include "lacuna/train/trainer.hpp"

#include <stdexcept>
#include <string>

#include "lacuna/autodiff/graph.hpp"
#include "lacuna/decode/restorer.hpp"
#include "lacuna/eval/evaluator.hpp"
#include "lacuna/model/checkpoint.hpp"
#include "lacuna/model/seq2seq.hpp"
#include "lacuna/text/utf8.hpp"

namespace lacuna::train {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (!(clip > 0)) throw std::invalid_argument("clip must be positive");
  if (!(scheduled_sampling >= 0 && scheduled_sampling <= 1)) {
    throw std::invalid_argument("scheduled sampling probability must lie in [0, 1]");
  }
  if (max_steps < 0) throw std::invalid_argument("max steps must not be negative");
  if (checkpoint_every < 1) throw std::invalid_argument("checkpoint cadence must be positive");
  validation_beam.validate();
  bounds.validate();
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"clip", c.clip},
          {"scheduled_sampling", c.scheduled_sampling},
          {"max_steps", c.max_steps},
          {"checkpoint_every", c.checkpoint_every},
          {"seed", c.seed}};
}

Trainer::Trainer(model::Seq2SeqModel model, TrainConfig config)
    : model_(std::move(model)), config_(config), rng_(config.seed) {
  config_.validate();
  adam_ = ad::make_adam_state(model_.params, {.learning_rate = config_.learning_rate});
}

std::vector<TrainingExample> Trainer::sample_batch(std::span<const corpus::CleanRecord> records) {
  if (records.empty()) throw std::invalid_argument("cannot sample from an empty corpus");
  std::vector<TrainingExample> batch;
  size_t misses = 0;
  while (static_cast<int>(batch.size()) < config_.batch_size) {
    const auto& rec = records[static_cast<size_t>(rng_.uniform_int(0, static_cast<int64_t>(records.size()) - 1))];
    auto ex = sample_training_example(text::decode_utf8(rec.text), rng_, config_.bounds);
    if (ex) {
      batch.push_back(std::move(*ex));
    } else if (++misses > 100 * records.size() + 1000) {
      throw std::invalid_argument("no record in the corpus yields a training example");
    }
  }
  return batch;
}

StepStats Trainer::train_step(std::span<const TrainingExample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  std::vector<text::EncodedSequence> inputs;
  inputs.reserve(batch.size());
  std::vector<model::LossExample> examples;
  for (const auto& ex : batch) {
    inputs.push_back(model_.encode(ex.masked()));
    std::vector<int> target;
    for (char32_t c : ex.target()) target.push_back(model_.alphabet.id_of(c));
    examples.push_back({nullptr, std::move(target)});
  }
  for (size_t i = 0; i < inputs.size(); ++i) examples[i].input = &inputs[i];

  StepStats stats;
  stats.step = step_ + 1;
  try {
    model_.params.zero_grad();
    ad::Graph<float> g(ad::Mode::kTraining, &rng_);
    ad::Var loss = model::forward_loss(g, model_.params, model_.config, examples, config_.scheduled_sampling, &rng_);
    g.backward(loss);
    stats.loss = g.value(loss).data[0];
    stats.raw_grad_norm = ad::clip_global_norm(model_.params, config_.clip);
    stats.grad_norm = std::min(stats.raw_grad_norm, config_.clip);
    ad::adam_step(model_.params, adam_);
  } catch (const ad::NonFiniteError& e) {
    throw TrainingError("non-finite value at step " + std::to_string(stats.step) + ": " + e.what());
  }
  ++step_;
  return stats;
}

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  nlohmann::json header = model::checkpoint_header(model_);
  header["trainer"] = {{"step", step_},
                       {"rng", rng_.state()},
                       {"adam_step", adam_.step},
                       {"config", to_json(config_)}};
  auto tensors = model::checkpoint_tensors(model_);
  for (size_t i = 0; i < model_.params.size(); ++i) {
    tensors.push_back({"adam/m/" + model_.params[i].name, &adam_.m[i]});
    tensors.push_back({"adam/v/" + model_.params[i].name, &adam_.v[i]});
  }
  model::write_checkpoint(path, header, tensors);
}

Trainer Trainer::resume(const std::filesystem::path& path, TrainConfig config) {
  auto contents = model::read_checkpoint(path);
  Trainer t(model::model_from_checkpoint(contents), config);
  if (!contents.header.contains("trainer")) return t;
  const auto& state = contents.header["trainer"];
  t.step_ = state.at("step").get<int64_t>();
  t.rng_.set_state(state.at("rng").get<std::string>());
  t.adam_.step = state.at("adam_step").get<int64_t>();
  for (size_t i = 0; i < t.model_.params.size(); ++i) {
    const auto& name = t.model_.params[i].name;
    if (contents.tensors.contains("adam/m/" + name)) t.adam_.m[i] = contents.tensors.get("adam/m/" + name).value;
    if (contents.tensors.contains("adam/v/" + name)) t.adam_.v[i] = contents.tensors.get("adam/v/" + name).value;
  }
  return t;
}

FitResult fit(Trainer& trainer, std::span<const corpus::CleanRecord> train, std::span<const corpus::CleanRecord> valid,
              const std::filesystem::path& out, std::ostream* log) {
  FitResult result;
  const TrainConfig& cfg = trainer.config();
  std::filesystem::path last = out;
  last += ".last";
  eval::EvalOptions eval_options;
  eval_options.beam = cfg.validation_beam;
  eval_options.limit = cfg.validation_limit;
  eval_options.max_context = cfg.bounds.max_context;
  eval_options.min_target = cfg.bounds.min_target;
  eval_options.max_target = cfg.bounds.max_target;

  auto checkpoint = [&]() {
    ValidationPoint point{trainer.step(), 0.0, 0.0};
    bool improved = true;
    if (!valid.empty()) {
      decode::Seq2SeqRestorer restorer(trainer.model());
      const auto r = eval::evaluate(restorer, valid, eval_options);
      point.cer = r.cer;
      point.top_k = r.top_k;
      improved = r.cer < result.best_cer;
      result.validation.push_back(point);
    }
    if (improved) {
      result.best_cer = point.cer;
      result.best_step = point.step;
      model::save_model(out, trainer.model());
    }
    trainer.save_checkpoint(last);
    if (log != nullptr) {
      nlohmann::json line = {{"step", point.step}, {"checkpoint", true}, {"best_step", result.best_step}};
      if (!valid.empty()) {
        line["valid_cer"] = point.cer;
        line["valid_top_k"] = point.top_k;
      }
      *log << line.dump() << '\n' << std::flush;
    }
  };

  checkpoint();
  while (trainer.step() < cfg.max_steps) {
    const auto batch = trainer.sample_batch(train);
    const StepStats s = trainer.train_step(batch);
    result.steps.push_back(s);
    if (log != nullptr) {
      *log << nlohmann::json{{"step", s.step}, {"loss", s.loss}, {"grad_norm", s.grad_norm}}.dump() << '\n';
    }
    if (s.step % cfg.checkpoint_every == 0 || s.step == cfg.max_steps) checkpoint();
  }
  return result;
}

}  // namespace lacuna::train
