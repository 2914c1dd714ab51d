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


#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "../unit/oracles.hpp"
#include "../unit/test_util.hpp"
#include "criteria.hpp"
#include "httplib.h"
#include "lacuna/autodiff/graph.hpp"
#include "lacuna/corpus/pipeline.hpp"
#include "lacuna/decode/beam.hpp"
#include "lacuna/eval/evaluator.hpp"
#include "lacuna/lm/lm.hpp"
#include "lacuna/model/model.hpp"
#include "lacuna/model/seq2seq.hpp"
#include "lacuna/service/service.hpp"
#include "lacuna/text/unicode.hpp"
#include "lacuna/text/utf8.hpp"
#include "lacuna/train/trainer.hpp"

namespace lacuna::acceptance {

namespace {

using ad::Graph;
using ad::Mode;
using ad::Rng;
using ad::Tensor;
using ad::Var;
using text::CharAlphabet;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- 1. gradients ---------------------------------------------------------

Tensor<double> random_tensor(ad::Shape shape, uint64_t seed, double lo = -1, double hi = 1) {
  Tensor<double> t(std::move(shape));
  Rng r(seed);
  for (double& v : t.data) v = r.uniform(lo, hi);
  return t;
}

// Collapses any output to a scalar with fixed random weights so every
// output coordinate contributes a distinct amount.
Var to_scalar(Graph<double>& g, Var y) {
  const auto& v = g.value(y);
  if (v.size() == 1) return y;
  return g.sum(g.mul(y, g.constant(random_tensor(v.shape, 4242 + v.size()))));
}

using InputFn = std::function<Var(Graph<double>&, Var)>;

// Central differences against backward() for one input tensor. Each
// evaluation gets a freshly seeded random stream so dropout masks repeat.
double input_gradient_error(const InputFn& f, const Tensor<double>& x, bool training) {
  const double h = 1e-5;
  auto value_at = [&](const Tensor<double>& point) {
    Rng r(99);
    Graph<double> g(training ? Mode::kTraining : Mode::kInference, &r);
    g.set_grad_enabled(false);
    return g.value(to_scalar(g, f(g, g.constant(point)))).data[0];
  };
  Rng r(99);
  Graph<double> g(training ? Mode::kTraining : Mode::kInference, &r);
  g.set_grad_enabled(true);
  Var in = g.input(x, true);
  g.backward(to_scalar(g, f(g, in)));
  const Tensor<double> analytic = g.grad(in);
  double worst = 0;
  Tensor<double> probe = x;
  for (size_t i = 0; i < x.size(); ++i) {
    probe.data[i] = x.data[i] + h;
    const double up = value_at(probe);
    probe.data[i] = x.data[i] - h;
    const double down = value_at(probe);
    probe.data[i] = x.data[i];
    const double numeric = (up - down) / (2 * h);
    const double a = analytic.data[i];
    worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
  }
  return worst;
}

double loss_gradient_error(model::Variant variant) {
  model::ModelConfig c;
  c.variant = variant;
  c.layers = 2;
  c.hidden = 3;
  c.char_embedding = 3;
  c.word_embedding = 2;
  c.dropout = 0.0;
  const auto alphabet = CharAlphabet::with_symbols(U"αβγ");
  const auto vocab = text::WordVocab::from_entries({{U"αβ", 2}, {U"γ", 1}});
  c.alphabet_size = alphabet.size();
  c.vocab_size = c.uses_words() ? vocab.size() : 0;
  Rng rng(17);
  auto params = model::init_parameters<double>(c, rng);
  // Spread the biases away from their initial constants.
  for (auto& p : params) {
    for (double& v : p.value.data) v += rng.uniform(-0.3, 0.3);
  }
  const auto seq = text::encode(U"α?β", alphabet, c.uses_words() ? &vocab : nullptr);
  std::vector<model::LossExample> batch{{&seq, {alphabet.id_of(U'γ')}}};
  auto loss_value = [&]() {
    Graph<double> g(Mode::kInference);
    return g.value(model::forward_loss(g, params, c, batch, 0.0, nullptr)).data[0];
  };
  params.zero_grad();
  {
    Graph<double> g(Mode::kInference);
    g.set_grad_enabled(true);
    g.backward(model::forward_loss(g, params, c, batch, 0.0, nullptr));
  }
  const double h = 1e-5;
  double worst = 0;
  for (auto& p : params) {
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double x = p.value.data[i];
      p.value.data[i] = x + h;
      const double up = loss_value();
      p.value.data[i] = x - h;
      const double down = loss_value();
      p.value.data[i] = x;
      const double numeric = (up - down) / (2 * h);
      const double a = p.grad.data[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  }
  return worst;
}

Outcome gradient_correctness() {
  const auto A = random_tensor({3, 4}, 1), B = random_tensor({4, 5}, 2), C = random_tensor({3, 4}, 3);
  const auto row = random_tensor({1, 4}, 4);
  const auto gates = random_tensor({2, 8}, 5, -2, 2), cell = random_tensor({2, 2}, 6);
  const auto memory = random_tensor({2 * 5, 4}, 7), query = random_tensor({2, 4}, 8);
  const auto shared = random_tensor({5, 4}, 9), weights = random_tensor({2, 5}, 10, 0, 1);
  std::vector<std::pair<std::string, std::function<double()>>> checks = {
      {"matmul/a", [&] { return input_gradient_error([&](auto& g, Var x) { return g.matmul(x, g.constant(B)); }, A, false); }},
      {"matmul/b", [&] { return input_gradient_error([&](auto& g, Var x) { return g.matmul(g.constant(A), x); }, B, false); }},
      {"add", [&] { return input_gradient_error([&](auto& g, Var x) { return g.add(x, g.constant(C)); }, A, false); }},
      {"add/bias", [&] { return input_gradient_error([&](auto& g, Var x) { return g.add(g.constant(A), x); }, row, false); }},
      {"mul", [&] { return input_gradient_error([&](auto& g, Var x) { return g.mul(x, g.constant(C)); }, A, false); }},
      {"scale", [&] { return input_gradient_error([&](auto& g, Var x) { return g.scale(x, -1.7); }, A, false); }},
      {"concat_cols", [&] {
         return input_gradient_error([&](auto& g, Var x) { std::vector<Var> p{g.constant(C), x, x}; return g.concat_cols(p); }, A, false);
       }},
      {"concat_rows", [&] {
         return input_gradient_error([&](auto& g, Var x) { std::vector<Var> p{x, g.constant(C)}; return g.concat_rows(p); }, A, false);
       }},
      {"slice_cols", [&] { return input_gradient_error([&](auto& g, Var x) { return g.slice_cols(x, 1, 3); }, A, false); }},
      {"slice_rows", [&] { return input_gradient_error([&](auto& g, Var x) { return g.slice_rows(x, 1, 3); }, A, false); }},
      {"gather_rows", [&] { return input_gradient_error([&](auto& g, Var x) { return g.gather_rows(x, {2, 0, 2, 1}); }, A, false); }},
      {"sigmoid", [&] { return input_gradient_error([&](auto& g, Var x) { return g.sigmoid(x); }, A, false); }},
      {"tanh", [&] { return input_gradient_error([&](auto& g, Var x) { return g.tanh(x); }, A, false); }},
      {"softmax", [&] { return input_gradient_error([&](auto& g, Var x) { return g.softmax(x); }, A, false); }},
      {"softmax/lengths", [&] { return input_gradient_error([&](auto& g, Var x) { return g.softmax(x, {4, 2, 1}); }, A, false); }},
      {"log_softmax", [&] { return input_gradient_error([&](auto& g, Var x) { return g.log_softmax(x); }, A, false); }},
      {"dropout", [&] { return input_gradient_error([&](auto& g, Var x) { return g.dropout(x, 0.4); }, A, true); }},
      {"cross_entropy", [&] { return input_gradient_error([&](auto& g, Var x) { return g.cross_entropy(x, {1, 3, 0}); }, A, false); }},
      {"cross_entropy/weights", [&] {
         return input_gradient_error([&](auto& g, Var x) { return g.cross_entropy(x, {1, 3, 0}, {0.5, 0.0, 2.0}); }, A, false);
       }},
      {"sum", [&] { return input_gradient_error([&](auto& g, Var x) { return g.sum(x); }, A, false); }},
      {"lstm_cell/gates", [&] { return input_gradient_error([&](auto& g, Var x) { return g.lstm_cell(x, g.constant(cell)); }, gates, false); }},
      {"lstm_cell/cell", [&] { return input_gradient_error([&](auto& g, Var x) { return g.lstm_cell(g.constant(gates), x); }, cell, false); }},
      {"attention_scores/memory", [&] {
         return input_gradient_error([&](auto& g, Var x) { return g.attention_scores(x, g.constant(query), 5); }, memory, false);
       }},
      {"attention_scores/query", [&] {
         return input_gradient_error([&](auto& g, Var x) { return g.attention_scores(g.constant(memory), x, 5); }, query, false);
       }},
      {"attention_scores/shared", [&] {
         return input_gradient_error([&](auto& g, Var x) { return g.attention_scores(x, g.constant(query), 5); }, shared, false);
       }},
      {"attention_context/weights", [&] {
         return input_gradient_error([&](auto& g, Var x) { return g.attention_context(x, g.constant(memory), 5); }, weights, false);
       }},
      {"attention_context/memory", [&] {
         return input_gradient_error([&](auto& g, Var x) { return g.attention_context(g.constant(weights), x, 5); }, memory, false);
       }},
      {"attention_context/shared", [&] {
         return input_gradient_error([&](auto& g, Var x) { return g.attention_context(g.constant(weights), x, 5); }, shared, false);
       }},
      {"loss/bi-word", [] { return loss_gradient_error(model::Variant::kBiWord); }},
      {"loss/bi", [] { return loss_gradient_error(model::Variant::kBi); }},
      {"loss/uni", [] { return loss_gradient_error(model::Variant::kUni); }},
  };
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::string where;
  for (const auto& [name, run] : checks) {
    const double e = run();
    if (e >= worst) {
      worst = e;
      where = name;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-4 && secs < 120,
          std::to_string(checks.size()) + " checks, max relative error " + fmt("%.2e", worst) + " (" + where +
              "), limit 1e-4, " + fmt("%.1fs", secs) + " of 120s"};
}

// ---- 2. beam oracle -------------------------------------------------------

std::u32string random_words(Rng& rng, std::u32string_view letters, int length) {
  std::u32string s;
  while (static_cast<int>(s.size()) < length) {
    if (!s.empty()) s += U' ';
    const int w = static_cast<int>(rng.uniform_int(1, 4));
    for (int i = 0; i < w; ++i) s += letters[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(letters.size()) - 1))];
  }
  s.resize(static_cast<size_t>(length));
  if (s.back() == U' ') s.back() = letters[0];
  return s;
}

std::vector<corpus::CleanRecord> word_records(uint64_t seed, std::u32string_view letters, int count, int length) {
  Rng rng(seed);
  std::vector<corpus::CleanRecord> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({static_cast<uint64_t>(i), text::encode_utf8(random_words(rng, letters, length)), corpus::Split::kTrain});
  }
  return out;
}

Outcome beam_oracle() {
  const std::u32string letters = U"αβγδ";
  const auto alphabet = CharAlphabet::with_symbols(letters);
  int outputs = 0;
  for (int id = 0; id < alphabet.size(); ++id) outputs += CharAlphabet::is_output_id(id);
  const auto records = word_records(3, letters, 200, 40);
  model::ModelConfig c;
  c.variant = model::Variant::kBiWord;
  c.layers = 1;
  c.hidden = 16;
  c.char_embedding = 8;
  c.word_embedding = 4;
  c.dropout = 0.0;
  train::TrainConfig tc;
  tc.batch_size = 16;
  tc.learning_rate = 1e-2;
  tc.bounds = {8, 24, 1, 3};
  train::Trainer trainer(model::Seq2SeqModel::create(c, alphabet, text::build_word_vocab(records), 1), tc);
  double first = 0, last = 0;
  for (int s = 0; s < 300; ++s) {
    const double l = trainer.train_step(trainer.sample_batch(records)).loss;
    if (s < 20) first += l / 20;
    if (s >= 280) last += l / 20;
  }
  auto& m = trainer.model();

  Rng rng(2024);
  int fixtures = 0, mismatched = 0, near_ties = 0;
  double worst_lp = 0;
  for (; fixtures < 100; ++fixtures) {
    const int len = static_cast<int>(rng.uniform_int(6, 20));
    std::u32string t = random_words(rng, letters, len);
    const int L = static_cast<int>(rng.uniform_int(1, 3));
    const int start = static_cast<int>(rng.uniform_int(0, len - L));
    for (int i = 0; i < L; ++i) t[static_cast<size_t>(start + i)] = text::kPredictChar;
    const auto seq = m.encode(t);
    const auto expected = testing::exhaustive_ranking(m.params, m.config, seq);
    decode::BeamConfig beam;
    beam.beam_width = static_cast<int>(std::pow(outputs, L));
    beam.top_k = beam.beam_width;
    const auto got = decode::beam_search(m, seq, beam);
    bool ok = got.size() == expected.size();
    for (size_t i = 0; ok && i < got.size(); ++i) {
      worst_lp = std::max(worst_lp, std::abs(got[i].log_prob - expected[i].log_prob));
      if (got[i].ids != expected[i].ids) {
        // Allowed only where the oracle itself cannot separate the two.
        const bool tie = (i > 0 && std::abs(expected[i].log_prob - expected[i - 1].log_prob) < 1e-9) ||
                         (i + 1 < got.size() && std::abs(expected[i].log_prob - expected[i + 1].log_prob) < 1e-9);
        if (tie) {
          ++near_ties;
        } else {
          ok = false;
        }
      }
    }
    if (!ok || worst_lp > 1e-9) ++mismatched;
  }
  return {mismatched == 0 && last < first,
          std::to_string(fixtures) + " fixtures, |V|=" + std::to_string(outputs) + ", L<=3, " +
              std::to_string(mismatched) + " mismatches, max |dlogp| " + fmt("%.1e", worst_lp) + ", near ties " +
              std::to_string(near_ties) + ", toy loss " + fmt("%.3f", first) + " -> " + fmt("%.3f", last)};
}

// ---- 3. pipeline ----------------------------------------------------------

Outcome pipeline_determinism() {
  const auto greek = CharAlphabet::greek_default();
  std::string suffix;
  while (text::decode_utf8(suffix).size() < 100) suffix += " ο δημος ανεθηκεν";
  auto clean_text = [&](const corpus::NormalizeResult& r) -> std::optional<std::string> {
    if (auto* c = std::get_if<corpus::CleanRecord>(&r)) return c->text;
    return std::nullopt;
  };

  std::ifstream in(testing::data_path("normalize_golden.tsv"));
  std::map<std::string, int> per_stage;
  int golden = 0, golden_bad = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string stage, raw, expected;
    std::getline(fields, stage, '\t');
    std::getline(fields, raw, '\t');
    std::getline(fields, expected, '\t');
    ++golden;
    ++per_stage[stage];
    if (clean_text(corpus::normalize_text(1, raw + suffix, greek)) != expected + suffix) ++golden_bad;
  }
  // Length filter: 99 characters dropped, 100 kept.
  std::u32string base(99, U'α');
  const bool short_dropped = !clean_text(corpus::normalize_text(1, text::encode_utf8(base), greek));
  base += U'β';
  const bool long_kept = clean_text(corpus::normalize_text(1, text::encode_utf8(base), greek)).has_value();

  std::mt19937_64 rng(777);
  int fuzzed = 0, kept = 0, not_idempotent = 0;
  for (; fuzzed < 1000; ++fuzzed) {
    int hyphens = 0;
    const std::string raw = testing::fuzz_raw_text(rng, &hyphens);
    const auto once = clean_text(corpus::normalize_text(static_cast<uint64_t>(fuzzed), raw, greek));
    if (!once) continue;
    ++kept;
    if (clean_text(corpus::normalize_text(static_cast<uint64_t>(fuzzed), *once, greek)) != once) ++not_idempotent;
  }

  int split_errors = 0;
  for (uint64_t id = 0; id < 10000; ++id) {
    const char d = std::to_string(id).back();
    const auto expected = d == '3' ? corpus::Split::kTest : d == '4' ? corpus::Split::kValid : corpus::Split::kTrain;
    split_errors += corpus::assign_split(id) != expected;
  }
  const bool pass = golden > 0 && golden_bad == 0 && per_stage.size() == 7 && short_dropped && long_kept &&
                    not_idempotent == 0 && kept > 0 && split_errors == 0;
  return {pass, std::to_string(golden) + " golden cases over " + std::to_string(per_stage.size()) +
                    " stages (" + std::to_string(golden_bad) + " wrong), length boundary " +
                    (short_dropped && long_kept ? "ok" : "wrong") + ", " + std::to_string(not_idempotent) +
                    " non-idempotent of " + std::to_string(kept) + " kept/" + std::to_string(fuzzed) +
                    " fuzzed, " + std::to_string(split_errors) + " split errors on ids 0-9999"};
}

// ---- 4. metrics -----------------------------------------------------------

Outcome metric_suite() {
  int failures = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    failures += !ok;
  };
  auto near = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  expect(near(eval::cer(U"αβγ", U"αβγ"), 0.0));
  expect(near(eval::cer(U"αβδ", U"αβγ"), 1.0 / 3));
  expect(near(eval::cer(U"αβ", U"αβγ"), 1.0 / 3));
  expect(near(eval::cer(text::strip_diacritics(U"ἀβγ"), U"αβγ"), 0.0));  // stripped as the evaluator does
  try {
    eval::cer(U"α", U"");
    expect(false);
  } catch (const std::invalid_argument&) {
    expect(true);
  }
  std::vector<decode::Hypothesis> hyps;
  for (int i = 0; i < 25; ++i) {
    decode::Hypothesis h;
    h.text = std::u32string(1, U'α') + std::u32string(1, static_cast<char32_t>(U'α' + i));
    h.log_prob = -i;
    hyps.push_back(h);
  }
  auto target_at = [&](int rank) { return hyps[static_cast<size_t>(rank - 1)].text; };
  expect(eval::top_k_hit(hyps, target_at(1), 20));
  expect(eval::top_k_hit(hyps, target_at(20), 20));
  expect(!eval::top_k_hit(hyps, target_at(21), 20));
  expect(eval::target_rank(hyps, target_at(21)) == 21);
  expect(!eval::top_k_hit(hyps, U"ωω", 20));
  // Diacritics on either side do not matter for a hit.
  hyps[4].text = U"ἀβ";
  expect(eval::top_k_hit(hyps, U"αβ", 20));
  return {failures == 0, std::to_string(checks - failures) + "/" + std::to_string(checks) +
                             " metric checks (CER examples, rank 1/20/21 boundary, accents)"};
}

// ---- 8. checkpoints -------------------------------------------------------

Outcome checkpoint_round_trip() {
  testing::TempDir dir;
  const std::u32string letters = U"αβγδεζηθ";
  const auto records = word_records(8, letters, 100, 60);
  model::ModelConfig c;
  c.hidden = 24;
  c.char_embedding = 12;
  c.word_embedding = 8;
  train::TrainConfig tc;
  tc.batch_size = 8;
  tc.bounds = {20, 60, 1, 10};
  train::Trainer trainer(model::Seq2SeqModel::create(c, CharAlphabet::with_symbols(letters),
                                                      text::build_word_vocab(records), 8),
                         tc);
  for (int s = 0; s < 5; ++s) trainer.train_step(trainer.sample_batch(records));
  auto& before = trainer.model();
  model::save_model(dir.path() / "m.ckpt", before);
  auto after = model::load_model(dir.path() / "m.ckpt");

  lm::LmConfig lc;
  lc.hidden = 16;
  lc.embedding = 8;
  const auto lm_before = lm::LmModel::create(lc, CharAlphabet::with_symbols(letters), 3);
  lm::save_lm(dir.path() / "lm.ckpt", lm_before);
  const auto lm_after = lm::load_lm(dir.path() / "lm.ckpt");

  Rng rng(123);
  int differing = 0, inputs = 0;
  for (; inputs < 100; ++inputs) {
    const int len = static_cast<int>(rng.uniform_int(5, 60));
    std::u32string t = random_words(rng, letters, len);
    const int L = static_cast<int>(rng.uniform_int(1, std::min(10, len)));
    const int start = static_cast<int>(rng.uniform_int(0, len - L));
    std::vector<int> target;
    for (int i = 0; i < L; ++i) {
      target.push_back(before.alphabet.id_of(t[static_cast<size_t>(start + i)]));
      t[static_cast<size_t>(start + i)] = text::kPredictChar;
    }
    const auto a = model::teacher_forced_logits(before.params, before.config, before.encode(t), target);
    const auto b = model::teacher_forced_logits(after.params, after.config, after.encode(t), target);
    const bool same = a.shape == b.shape && std::memcmp(a.data.data(), b.data.data(), a.size() * sizeof(float)) == 0;
    const auto ids = lm_before.encode(random_words(rng, letters, len));
    const double x = lm::lm_log_prob(lm_before, ids), y = lm::lm_log_prob(lm_after, ids);
    differing += !same || std::memcmp(&x, &y, sizeof x) != 0;
  }
  const bool config_same = after.config == before.config && after.alphabet == before.alphabet &&
                           after.vocab == before.vocab && lm_after.config == lm_before.config;
  return {differing == 0 && config_same, std::to_string(inputs - differing) + "/" + std::to_string(inputs) +
                                             " inputs bit-identical (seq2seq logits and LM log-probabilities)"};
}

// ---- 9. training determinism ----------------------------------------------

Outcome training_determinism() {
  const std::u32string letters = U"αβγδεζ";
  const auto records = word_records(9, letters, 200, 120);
  auto trace = [&](uint64_t seed) {
    model::ModelConfig c;
    c.hidden = 16;
    c.char_embedding = 8;
    c.word_embedding = 4;
    train::TrainConfig tc;
    tc.batch_size = 4;
    tc.seed = seed;
    train::Trainer t(model::Seq2SeqModel::create(c, CharAlphabet::with_symbols(letters),
                                                  text::build_word_vocab(records), seed),
                     tc);
    std::vector<double> losses;
    for (int s = 0; s < 200; ++s) {
      const auto st = t.train_step(t.sample_batch(records));
      losses.push_back(st.loss);
      losses.push_back(st.raw_grad_norm);
    }
    return losses;
  };
  const auto a = trace(5), b = trace(5), other = trace(6);
  return {a == b && a != other, std::string("200-step loss and gradient-norm traces ") +
                                    (a == b ? "identical" : "differ") + " for equal seeds, " +
                                    (a != other ? "distinct" : "identical") + " for another seed"};
}

// ---- 10. service ----------------------------------------------------------

class LiveServer {
 public:
  LiveServer(const std::filesystem::path& dir, const decode::Restorer& restorer, const std::string& model_id) {
    store_ = std::make_unique<service::SessionStore>(dir, restorer.alphabet(), model_id);
    service::ServiceOptions opts;
    opts.model_id = model_id;
    opts.model_kind = "seq2seq";
    service_ = std::make_unique<service::RestorationService>(restorer, *store_, opts);
    service_->install(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  int port() const { return port_; }

 private:
  httplib::Server server_;
  std::unique_ptr<service::SessionStore> store_;
  std::unique_ptr<service::RestorationService> service_;
  std::thread thread_;
  int port_ = 0;
};

Outcome service_contract() {
  const std::u32string letters = U"αβγδεζ";
  const auto records = word_records(10, letters, 100, 60);
  model::ModelConfig c;
  c.hidden = 16;
  c.char_embedding = 8;
  c.word_embedding = 4;
  c.layers = 1;
  train::TrainConfig tc;
  tc.batch_size = 8;
  tc.bounds = {20, 60, 1, 10};
  train::Trainer trainer(model::Seq2SeqModel::create(c, CharAlphabet::with_symbols(letters),
                                                      text::build_word_vocab(records), 10),
                         tc);
  for (int s = 0; s < 30; ++s) trainer.train_step(trainer.sample_batch(records));
  decode::Seq2SeqRestorer restorer(trainer.model());
  testing::TempDir dir;
  std::vector<std::string> problems;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  using nlohmann::json;
  auto post = [](httplib::Client& cl, const std::string& path, const json& body) {
    return cl.Post(path, body.dump(), "application/json");
  };

  std::string id;
  json before_restart;
  {
    LiveServer server(dir.path(), restorer, "stub");
    httplib::Client cl("127.0.0.1", server.port());
    cl.set_read_timeout(120);
    auto created = post(cl, "/v1/sessions", {{"text", "αβγ δε----ζα βγ ---δ εζ"}});
    require(created && created->status == 201, "create");
    if (!problems.empty()) return {false, "session creation failed"};
    id = json::parse(created->body)["id"];
    const std::string base = "/v1/sessions/" + id;
    const json span = {{"start", 6}, {"length", 4}};
    auto p1 = post(cl, base + "/propose", span);
    auto p2 = post(cl, base + "/propose", span);
    require(p1 && p2 && p1->status == 200 && p1->body == p2->body, "propose is not idempotent");
    const json hyps = json::parse(p1->body)["hypotheses"];
    require(hyps.size() == 20, "expected 20 hypotheses");
    auto unchanged = cl.Get(base);
    require(json::parse(unchanged->body)["history"].empty(), "propose mutated the session");

    auto wrong = post(cl, base + "/accept", {{"start", 6}, {"length", 4}, {"text", "αβγ"}});
    require(wrong && wrong->status == 400, "length mismatch accepted");
    auto ok = post(cl, base + "/accept",
                   {{"start", 6}, {"length", 4}, {"text", hyps[0]["text"]}, {"log_prob", hyps[0]["log_prob"]}});
    require(ok && ok->status == 200, "accept of the top hypothesis failed");
    auto human = post(cl, base + "/accept", {{"start", 16}, {"length", 3}, {"text", "ζζζ"}});
    require(human && human->status == 200, "override accept failed");
    before_restart = json::parse(cl.Get(base)->body);
  }
  // A new process view: fresh store and server over the same directory.
  LiveServer server(dir.path(), restorer, "stub");
  httplib::Client cl("127.0.0.1", server.port());
  auto got = cl.Get("/v1/sessions/" + id);
  require(got && got->status == 200, "session lost across restart");
  json after = got ? json::parse(got->body) : json();
  require(after == before_restart, "session differs after restart");
  std::vector<service::HistoryEntry> history;
  for (const auto& e : after["history"]) {
    history.push_back({e["start"].get<size_t>(), e["length"].get<size_t>(),
                       text::decode_utf8(e["text"].get<std::string>()), std::nullopt, ""});
  }
  const auto replayed = service::replay(text::decode_utf8(after["initial_text"].get<std::string>()), history);
  require(text::encode_utf8(replayed) == after["text"].get<std::string>(), "history replay differs from text");
  std::string detail = problems.empty() ? "replay after restart, idempotent propose, length check: all hold"
                                        : "violations:";
  for (const auto& p : problems) detail += " [" + p + "]";
  return {problems.empty(), detail};
}

}  // namespace

std::vector<Criterion> contract_criteria() {
  return {
      {1, "gradient correctness", gradient_correctness},
      {2, "beam oracle equivalence", beam_oracle},
      {3, "pipeline determinism and idempotence", pipeline_determinism},
      {4, "metric unit suite", metric_suite},
      {8, "checkpoint round trip", checkpoint_round_trip},
      {9, "training determinism", training_determinism},
      {10, "service contract", service_contract},
  };
}

}  // namespace lacuna::acceptance
