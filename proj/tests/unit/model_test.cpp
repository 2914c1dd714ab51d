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
#include <string>

#include "doctest.h"
#include "lacuna/autodiff/gradcheck.hpp"
#include "lacuna/autodiff/optim.hpp"
#include "lacuna/model/model.hpp"
#include "lacuna/model/seq2seq.hpp"
#include "test_util.hpp"

namespace lacuna::model {
namespace {

using text::CharAlphabet;
using text::WordVocab;

CharAlphabet toy_alphabet() { return CharAlphabet::with_symbols(U"αβγδε"); }

WordVocab toy_vocab() { return WordVocab::from_entries({{U"αβ", 3}, {U"γδ", 2}, {U"ε", 1}}); }

ModelConfig toy_config(Variant v, int hidden = 3) {
  ModelConfig c;
  c.variant = v;
  c.hidden = hidden;
  c.char_embedding = 3;
  c.word_embedding = 2;
  c.dropout = 0.0;
  c.alphabet_size = toy_alphabet().size();
  c.vocab_size = v == Variant::kBiWord ? toy_vocab().size() : 0;
  return c;
}

text::EncodedSequence toy_encode(std::u32string_view s, const ModelConfig& c) {
  const WordVocab vocab = toy_vocab();
  return text::encode(s, toy_alphabet(), c.uses_words() ? &vocab : nullptr);
}

TEST_CASE("manifest shapes per variant") {
  ModelConfig c;
  c.alphabet_size = 40;
  c.vocab_size = 1000;
  auto find = [](const auto& m, const std::string& name) {
    for (const auto& [n, s] : m) {
      if (n == name) return s;
    }
    return Shape{};
  };
  c.variant = Variant::kBi;
  auto bi = parameter_manifest(c);
  CHECK(c.encoder_width() == 1024);
  CHECK(find(bi, "attn/w") == Shape{1024, 512});
  CHECK(find(bi, "enc/l1/bwd/wx") == Shape{1024, 2048});
  CHECK(find(bi, "embed/word").empty());
  c.variant = Variant::kUni;
  auto uni = parameter_manifest(c);
  CHECK(c.encoder_width() == 512);
  CHECK(find(uni, "enc/l0/bwd/wx").empty());
  c.variant = Variant::kBiWord;
  auto bw = parameter_manifest(c);
  CHECK(find(bw, "embed/word") == Shape{1000, 128});
  CHECK(find(bw, "enc/l0/fwd/wx") == Shape{256, 2048});

  // Decoder entries are identical across variants.
  auto decoder = [](const auto& m) {
    std::vector<std::pair<std::string, Shape>> out;
    for (const auto& e : m) {
      if (e.first.rfind("dec/", 0) == 0 || e.first.rfind("out/", 0) == 0) out.push_back(e);
    }
    return out;
  };
  CHECK(decoder(bi) == decoder(bw));
  CHECK(decoder(uni).size() == decoder(bi).size());
}

TEST_CASE("initialization is seeded and bounded") {
  ModelConfig c = toy_config(Variant::kBiWord);
  ad::Rng a(3), b(3), d(4);
  auto p1 = init_parameters<float>(c, a);
  auto p2 = init_parameters<float>(c, b);
  auto p3 = init_parameters<float>(c, d);
  CHECK(p1.size() == parameter_manifest(c).size());
  bool differs = false;
  for (size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i].value == p2[i].value);
    differs = differs || p1[i].value != p3[i].value;
    const double k = 1.0 / std::sqrt(static_cast<double>(p1[i].value.shape[0]));
    for (float v : p1[i].value.data) CHECK(std::abs(v) <= std::max(k, 1.0) + 1e-6);
  }
  CHECK(differs);
}

TEST_CASE("full Bi-Word loss on a three character input passes finite differences") {
  ModelConfig c = toy_config(Variant::kBiWord);
  ad::Rng rng(11);
  auto params = init_parameters<double>(c, rng);
  // Perturb biases too so every coordinate is exercised away from zero.
  for (auto& p : params) {
    for (double& v : p.value.data) v += rng.uniform(-0.1, 0.1);
  }
  const auto seq = toy_encode(U"α?β", c);
  REQUIRE(seq.size() == 3);
  const LossExample ex{&seq, {toy_alphabet().id_of(U'γ')}};
  auto result = ad::finite_difference_check(params, [&](ad::Graph<double>& g) {
    return forward_loss(g, params, c, std::span(&ex, 1), 0.0, nullptr);
  });
  INFO("worst " << result.where << " analytic " << result.analytic << " numeric " << result.numeric);
  CHECK(result.max_rel_error <= 1e-4);
  CHECK(result.coordinates == params.scalar_count());
}

TEST_CASE("batched loss with padding matches per-example losses") {
  for (Variant v : {Variant::kUni, Variant::kBi, Variant::kBiWord}) {
    ModelConfig c = toy_config(v, 4);
    ad::Rng rng(5);
    auto params = init_parameters<double>(c, rng);
    const auto s1 = toy_encode(U"αβ γ??δ", c);
    const auto s2 = toy_encode(U"?ε", c);
    const LossExample batch[] = {{&s1, {6, 7}}, {&s2, {8}}};
    ad::Graph<double> g;
    const double joint = g.value(forward_loss(g, params, c, batch, 0.0, nullptr)).data[0];
    double separate = 0;
    for (const auto& ex : batch) {
      ad::Graph<double> one;
      separate += one.value(forward_loss(one, params, c, std::span(&ex, 1), 0.0, nullptr)).data[0] / 2;
    }
    CHECK(joint == doctest::Approx(separate).epsilon(1e-12));
  }
}

TEST_CASE("batched gradients pass finite differences for every variant") {
  for (Variant v : {Variant::kUni, Variant::kBi}) {
    ModelConfig c = toy_config(v, 2);
    c.layers = 2;
    ad::Rng rng(9);
    auto params = init_parameters<double>(c, rng);
    const auto s1 = toy_encode(U"αβ?", c);
    const auto s2 = toy_encode(U"??", c);
    const LossExample batch[] = {{&s1, {6}}, {&s2, {8, 9}}};
    auto result = ad::finite_difference_check(params, [&](ad::Graph<double>& g) {
      return forward_loss(g, params, c, batch, 0.0, nullptr);
    });
    INFO(variant_name(v) << " worst " << result.where);
    CHECK(result.max_rel_error <= 1e-4);
  }
}

TEST_CASE("encoder and attention shapes") {
  ModelConfig c = toy_config(Variant::kBi, 4);
  ad::Rng rng(2);
  auto params = init_parameters<float>(c, rng);
  const auto seq = toy_encode(U"αβγ-?δ", c);
  ad::Graph<float> g;
  const text::EncodedSequence* one[] = {&seq};
  EncoderOutput enc = encode(g, params, c, one);
  CHECK(g.value(enc.memory).shape == Shape{6, 8});
  DecoderState s = initial_state(g, c, enc);
  // Several rows sharing one encoded sequence, as in beam search.
  s = select_rows(g, s, {0, 0, 0});
  StepOutput step = decode_step(g, params, c, enc, s, {1, 6, 7});
  CHECK(g.value(step.logits).shape == Shape{3, c.alphabet_size});
  for (int r = 0; r < 3; ++r) {
    double total = 0;
    for (int t = 0; t < 6; ++t) total += g.value(step.attention).at(r, t);
    CHECK(std::abs(total - 1.0) <= 1e-6);
  }

  const auto single = toy_encode(U"?", c);
  ad::Graph<float> g1;
  const text::EncodedSequence* s1[] = {&single};
  EncoderOutput e1 = encode(g1, params, c, s1);
  StepOutput st = decode_step(g1, params, c, e1, initial_state(g1, c, e1), {1});
  CHECK(g1.value(st.attention).data == std::vector<float>{1.0f});
}

TEST_CASE("bidirectional symmetry under reversal") {
  ModelConfig c = toy_config(Variant::kBi, 3);
  c.layers = 1;
  ad::Rng rng(21);
  auto params = init_parameters<double>(c, rng);
  auto swapped = params.cast<double>();
  for (const char* part : {"/wx", "/wh", "/b"}) {
    swapped.get(std::string("enc/l0/fwd") + part).value = params.get(std::string("enc/l0/bwd") + part).value;
    swapped.get(std::string("enc/l0/bwd") + part).value = params.get(std::string("enc/l0/fwd") + part).value;
  }
  const auto fwd = toy_encode(U"αβγ δε", c);
  const auto rev = toy_encode(U"εδ γβα", c);
  ad::Graph<double> g;
  const text::EncodedSequence* a[] = {&fwd};
  const text::EncodedSequence* b[] = {&rev};
  const auto& m1 = g.value(encode(g, params, c, a).memory);
  const auto& m2 = g.value(encode(g, swapped, c, b).memory);
  const int T = 6, H = 3;
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < H; ++j) {
      CHECK(m1.at(t, j) == doctest::Approx(m2.at(T - 1 - t, H + j)).epsilon(1e-12));
      CHECK(m1.at(t, H + j) == doctest::Approx(m2.at(T - 1 - t, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("word stream sees unk at a damaged word") {
  ModelConfig c = toy_config(Variant::kBiWord);
  const auto seq = toy_encode(U"αβ γ?", c);
  CHECK(seq.word_ids[0] != WordVocab::kUnkId);
  CHECK(seq.word_ids[3] == WordVocab::kUnkId);
  CHECK(seq.word_ids[4] == WordVocab::kUnkId);
}

TEST_CASE("loss contract") {
  ModelConfig c = toy_config(Variant::kBi, 8);
  ad::Rng rng(1);
  auto params = init_parameters<float>(c, rng);
  // Zero output weights give uniform predictions.
  for (float& v : params.get("out/proj/w").value.data) v = 0;
  const auto seq = toy_encode(U"αβ??γ", c);
  const LossExample ex{&seq, {6, 7}};
  ad::Graph<float> g;
  const float loss = g.value(forward_loss(g, params, c, std::span(&ex, 1), 0.0, nullptr)).data[0];
  CHECK(loss == doctest::Approx(std::log(static_cast<double>(c.alphabet_size))).epsilon(1e-5));

  const LossExample bad{&seq, {6}};
  ad::Graph<float> g2;
  CHECK_THROWS_AS(forward_loss(g2, params, c, std::span(&bad, 1), 0.0, nullptr), std::invalid_argument);
  const auto out_of_range = text::EncodedSequence{{99}, {0}, {1}};
  const LossExample oor{&out_of_range, {6}};
  CHECK_THROWS_AS(forward_loss(g2, params, c, std::span(&oor, 1), 0.0, nullptr), std::out_of_range);
}

TEST_CASE("overfitting one example, then greedy rollout reproduces it") {
  ModelConfig c = toy_config(Variant::kBiWord, 16);
  c.char_embedding = 8;
  CharAlphabet alphabet = toy_alphabet();
  ad::Rng rng(7);
  auto params = init_parameters<float>(c, rng);
  auto opt = ad::make_adam_state(params, {.learning_rate = 0.01});
  const auto seq = toy_encode(U"αβ γ???ε", c);
  const std::vector<int> target = {alphabet.id_of(U'δ'), alphabet.id_of(U'α'), alphabet.id_of(U'ε')};
  const LossExample ex{&seq, target};
  float loss = 1e9f;
  for (int step = 0; step < 300 && loss >= 0.01f; ++step) {
    params.zero_grad();
    ad::Graph<float> g(ad::Mode::kTraining, &rng);
    Var l = forward_loss(g, params, c, std::span(&ex, 1), 0.5, &rng);
    g.backward(l);
    ad::clip_global_norm(params, 5.0);
    ad::adam_step(params, opt);
    loss = g.value(l).data[0];
  }
  CHECK(loss < 0.01f);
  CHECK(greedy_decode(params, c, seq) == target);
  const auto logits = teacher_forced_logits(params, c, seq, target);
  CHECK(logits.shape == Shape{3, c.alphabet_size});
}

TEST_CASE("checkpoint round trip is bit exact") {
  testing::TempDir dir;
  ModelConfig c = toy_config(Variant::kBiWord, 5);
  auto model = Seq2SeqModel::create(c, toy_alphabet(), toy_vocab(), 17);
  const auto path = dir.path() / "m.ckpt";
  save_model(path, model);
  auto loaded = load_model(path);
  CHECK(loaded.config == model.config);
  CHECK(loaded.alphabet == model.alphabet);
  CHECK(loaded.vocab == model.vocab);
  for (size_t i = 0; i < model.params.size(); ++i) {
    CHECK(loaded.params[i].name == model.params[i].name);
    CHECK(loaded.params[i].value == model.params[i].value);
  }
  const std::string bytes = testing::read_file(path);
  CHECK(bytes.rfind("PYML1\n", 0) == 0);

  std::string truncated = bytes.substr(0, bytes.size() - 3);
  {
    std::ofstream out(dir.path() / "bad.ckpt", std::ios::binary);
    out << truncated;
  }
  CHECK_THROWS_AS(load_model(dir.path() / "bad.ckpt"), CheckpointError);
  {
    std::ofstream out(dir.path() / "magic.ckpt", std::ios::binary);
    out << "PYML2\n{}\n";
  }
  CHECK_THROWS_AS(load_model(dir.path() / "magic.ckpt"), CheckpointError);
}

}  // namespace
}  // namespace lacuna::model
