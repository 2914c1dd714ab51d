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


#include "lacuna/lm/lm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lacuna/text/utf8.hpp"
#include "lacuna/text/vocab.hpp"

namespace lacuna::lm {

using ad::Graph;
using ad::ParameterStore;
using ad::Shape;
using ad::Tensor;
using ad::Var;
using text::CharAlphabet;

void LmConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("lm: layers must be positive");
  if (hidden < 1) throw std::invalid_argument("lm: hidden size must be positive");
  if (embedding < 1) throw std::invalid_argument("lm: embedding size must be positive");
  if (!(learning_rate > 0)) throw std::invalid_argument("lm: learning rate must be positive");
  if (!(decay > 0 && decay <= 1)) throw std::invalid_argument("lm: decay must lie in (0, 1]");
  if (!(clip > 0)) throw std::invalid_argument("lm: clip must be positive");
  if (!(dropout >= 0 && dropout < 1)) throw std::invalid_argument("lm: dropout must lie in [0, 1)");
  if (alphabet_size <= CharAlphabet::kReservedCount) {
    throw std::invalid_argument("lm: alphabet needs symbols beyond the reserved block");
  }
}

nlohmann::json to_json(const LmConfig& c) {
  return {{"layers", c.layers},       {"hidden", c.hidden}, {"embedding", c.embedding},
          {"learning_rate", c.learning_rate}, {"decay", c.decay}, {"clip", c.clip},
          {"dropout", c.dropout},     {"alphabet_size", c.alphabet_size}};
}

LmConfig lm_config_from_json(const nlohmann::json& j) {
  LmConfig c;
  c.layers = j.at("layers").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.embedding = j.at("embedding").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.decay = j.at("decay").get<double>();
  c.clip = j.at("clip").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.alphabet_size = j.at("alphabet_size").get<int>();
  c.validate();
  return c;
}

std::vector<std::pair<std::string, Shape>> lm_parameter_manifest(const LmConfig& c) {
  std::vector<std::pair<std::string, Shape>> m;
  m.push_back({"embed", {c.alphabet_size, c.embedding}});
  for (int l = 0; l < c.layers; ++l) {
    const std::string p = "l" + std::to_string(l) + "/";
    m.push_back({p + "wx", {l == 0 ? c.embedding : c.hidden, 4 * c.hidden}});
    m.push_back({p + "wh", {c.hidden, 4 * c.hidden}});
    m.push_back({p + "b", {1, 4 * c.hidden}});
  }
  m.push_back({"out/w", {c.hidden, c.alphabet_size}});
  m.push_back({"out/b", {1, c.alphabet_size}});
  return m;
}

template <typename T>
ParameterStore<T> init_lm_parameters(const LmConfig& config, ad::Rng& rng) {
  config.validate();
  ParameterStore<T> store;
  for (auto& [name, shape] : lm_parameter_manifest(config)) {
    auto& p = store.add(name, shape);
    if (name.ends_with("/b")) {
      if (name != "out/b") {
        for (int j = config.hidden; j < 2 * config.hidden; ++j) p.value.data[static_cast<size_t>(j)] = T(1);
      }
      continue;
    }
    const double k = 1.0 / std::sqrt(static_cast<double>(shape[0]));
    for (T& v : p.value.data) v = static_cast<T>(rng.uniform(-k, k));
  }
  return store;
}

namespace {

// One step of the stacked LSTM; `state` holds (h|c) per layer and is
// replaced. Returns the top hidden state after dropout.
template <typename T>
Var step(Graph<T>& g, ParameterStore<T>& params, const LmConfig& c, std::vector<Var>& state,
         const std::vector<int>& ids) {
  Var x = g.dropout(g.gather_rows(g.param(params.get("embed")), ids), c.dropout);
  const int H = c.hidden;
  for (int l = 0; l < c.layers; ++l) {
    const std::string p = "l" + std::to_string(l) + "/";
    Var& s = state[static_cast<size_t>(l)];
    Var gates = g.add(g.add(g.matmul(x, g.param(params.get(p + "wx"))),
                            g.matmul(g.slice_cols(s, 0, H), g.param(params.get(p + "wh")))),
                      g.param(params.get(p + "b")));
    s = g.lstm_cell(gates, g.slice_cols(s, H, 2 * H));
    x = g.dropout(g.slice_cols(s, 0, H), c.dropout);
  }
  return x;
}

template <typename T>
Var project(Graph<T>& g, ParameterStore<T>& params, Var h) {
  return g.add(g.matmul(h, g.param(params.get("out/w"))), g.param(params.get("out/b")));
}

template <typename T>
std::vector<Var> zero_state(Graph<T>& g, const LmConfig& c, int batch) {
  std::vector<Var> s;
  for (int l = 0; l < c.layers; ++l) s.push_back(g.constant(Tensor<T>(batch, 2 * c.hidden)));
  return s;
}

void check_ids(const LmConfig& c, std::span<const int> ids) {
  for (int id : ids) {
    if (id < 0 || id >= c.alphabet_size) {
      throw std::out_of_range("lm: char id " + std::to_string(id) + " outside alphabet of size " +
                              std::to_string(c.alphabet_size));
    }
  }
}

// Row-wise log-softmax in double.
std::vector<double> log_softmax_row(const float* row, int n) {
  std::vector<double> out(row, row + n);
  const double mx = *std::max_element(out.begin(), out.end());
  double z = 0;
  for (double v : out) z += std::exp(v - mx);
  const double lz = mx + std::log(z);
  for (double& v : out) v -= lz;
  return out;
}

// Inference-time recurrent state kept as plain tensors, one row per
// hypothesis, so each step can run on a small throwaway graph.
struct Rows {
  std::vector<Tensor<float>> layers;  // [n, 2H] each

  static Rows zeros(const LmConfig& c, int n) {
    Rows r;
    for (int l = 0; l < c.layers; ++l) r.layers.emplace_back(n, 2 * c.hidden);
    return r;
  }
  int size() const { return layers.front().rows(); }

  Rows select(const std::vector<int>& rows) const {
    Rows out;
    for (const auto& t : layers) {
      Tensor<float> s(static_cast<int>(rows.size()), t.cols());
      for (size_t i = 0; i < rows.size(); ++i) std::copy_n(t.row(rows[i]), t.cols(), s.row(static_cast<int>(i)));
      out.layers.push_back(std::move(s));
    }
    return out;
  }
};

// Advances every row by one input id; returns the logits [n, A].
Tensor<float> advance(const LmModel& m, Rows& state, const std::vector<int>& ids) {
  // Inference only reads the parameters.
  auto& params = const_cast<ParameterStore<float>&>(m.params);
  Graph<float> g(ad::Mode::kInference);
  std::vector<Var> s;
  for (auto& t : state.layers) s.push_back(g.constant(std::move(t)));
  Var logits = project(g, params, step(g, params, m.config, s, ids));
  for (size_t l = 0; l < s.size(); ++l) state.layers[l] = g.value(s[l]);
  return g.value(logits);
}

}  // namespace

template <typename T>
Var lm_loss(Graph<T>& g, ParameterStore<T>& params, const LmConfig& config, std::span<const std::vector<int>> windows) {
  if (windows.empty()) throw std::invalid_argument("lm_loss: empty batch");
  const int B = static_cast<int>(windows.size());
  int steps = 0;
  for (const auto& w : windows) {
    if (w.empty()) throw std::invalid_argument("lm_loss: empty window");
    check_ids(config, w);
    steps = std::max(steps, static_cast<int>(w.size()));
  }
  auto state = zero_state(g, config, B);
  std::vector<Var> outputs;
  std::vector<int> targets;
  std::vector<T> weights;
  for (int t = 0; t < steps; ++t) {
    std::vector<int> in(static_cast<size_t>(B), CharAlphabet::kPadId);
    for (int b = 0; b < B; ++b) {
      const auto& w = windows[static_cast<size_t>(b)];
      if (t < static_cast<int>(w.size())) in[static_cast<size_t>(b)] = t == 0 ? CharAlphabet::kStartId : w[static_cast<size_t>(t - 1)];
    }
    outputs.push_back(step(g, params, config, state, in));
    for (int b = 0; b < B; ++b) {
      const auto& w = windows[static_cast<size_t>(b)];
      const bool live = t < static_cast<int>(w.size());
      targets.push_back(live ? w[static_cast<size_t>(t)] : CharAlphabet::kPadId);
      weights.push_back(live ? T(1) / (static_cast<T>(w.size()) * static_cast<T>(B)) : T(0));
    }
  }
  Var logits = project(g, params, g.concat_rows(outputs));
  return g.cross_entropy(logits, std::move(targets), std::move(weights));
}

LmModel LmModel::create(LmConfig config, text::CharAlphabet alphabet, uint64_t seed) {
  config.alphabet_size = alphabet.size();
  config.validate();
  ad::Rng rng(seed);
  return LmModel{config, std::move(alphabet), init_lm_parameters<float>(config, rng)};
}

std::vector<int> LmModel::encode(std::u32string_view text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    auto id = alphabet.find(text[i]);
    if (!id || !alphabet.is_text_symbol(text[i])) {
      throw text::EncodeError("character at position " + std::to_string(i) + " is not in the alphabet", i, text[i]);
    }
    ids.push_back(*id);
  }
  return ids;
}

nlohmann::json lm_checkpoint_header(const LmModel& model) {
  return {{"kind", "lm"}, {"config", to_json(model.config)}, {"alphabet", model.alphabet.to_tsv()}};
}

std::vector<model::NamedTensor> lm_checkpoint_tensors(const LmModel& model) {
  std::vector<model::NamedTensor> out;
  for (const auto& p : model.params) out.push_back({p.name, &p.value});
  return out;
}

void save_lm(const std::filesystem::path& path, const LmModel& model) {
  model::write_checkpoint(path, lm_checkpoint_header(model), lm_checkpoint_tensors(model));
}

LmModel lm_from_checkpoint(const model::CheckpointContents& contents) {
  const auto& h = contents.header;
  if (h.value("kind", "") != "lm") throw model::CheckpointError("checkpoint does not hold a language model");
  LmModel m;
  m.config = lm_config_from_json(h.at("config"));
  m.alphabet = CharAlphabet::from_tsv(h.at("alphabet").get<std::string>());
  if (m.alphabet.size() != m.config.alphabet_size) {
    throw model::CheckpointError("checkpoint alphabet disagrees with its config");
  }
  for (const auto& [name, shape] : lm_parameter_manifest(m.config)) m.params.add(name, shape);
  model::load_into(m.params, contents.tensors);
  return m;
}

LmModel load_lm(const std::filesystem::path& path) { return lm_from_checkpoint(model::read_checkpoint(path)); }

double lm_log_prob(const LmModel& model, std::span<const int> ids) {
  check_ids(model.config, ids);
  Rows state = Rows::zeros(model.config, 1);
  int input = CharAlphabet::kStartId;
  double total = 0;
  for (int id : ids) {
    const auto logits = advance(model, state, {input});
    total += log_softmax_row(logits.row(0), logits.cols())[static_cast<size_t>(id)];
    input = id;
  }
  return total;
}

double perplexity(const LmModel& model, std::span<const corpus::CleanRecord> records, size_t max_length) {
  double nll = 0;
  size_t chars = 0;
  for (const auto& r : records) {
    auto ids = model.encode(text::decode_utf8(r.text));
    if (ids.size() > max_length) ids.resize(max_length);
    nll -= lm_log_prob(model, ids);
    chars += ids.size();
  }
  if (chars == 0) throw std::invalid_argument("perplexity: no characters");
  return std::exp(nll / static_cast<double>(chars));
}

std::vector<decode::Hypothesis> lm_restore(const LmModel& model, std::u32string_view text,
                                           const decode::BeamConfig& beam) {
  beam.validate();
  const auto [gap_start, gap_len] = decode::find_single_gap(text);
  const auto left = model.encode(text.substr(0, gap_start));
  const auto right = model.encode(text.substr(gap_start + gap_len));
  const int A = model.config.alphabet_size;

  // Left context, scored once and shared by every candidate.
  Rows state = Rows::zeros(model.config, 1);
  double left_lp = 0;
  int input = CharAlphabet::kStartId;
  for (int id : left) {
    const auto logits = advance(model, state, {input});
    left_lp += log_softmax_row(logits.row(0), A)[static_cast<size_t>(id)];
    input = id;
  }

  struct Prefix {
    std::vector<int> ids;
    double lp;
  };
  std::vector<Prefix> prefixes{{{}, left_lp}};
  std::vector<int> inputs{input};
  for (size_t step_i = 0; step_i < gap_len; ++step_i) {
    const auto logits = advance(model, state, inputs);
    struct Cand {
      int parent;
      int id;
      double lp;
    };
    std::vector<Cand> cands;
    for (int r = 0; r < logits.rows(); ++r) {
      const auto lsm = log_softmax_row(logits.row(r), A);
      for (int id = 0; id < A; ++id) {
        if (CharAlphabet::is_output_id(id)) cands.push_back({r, id, prefixes[static_cast<size_t>(r)].lp + lsm[static_cast<size_t>(id)]});
      }
    }
    auto ids_of = [&](const Cand& c) {
      auto v = prefixes[static_cast<size_t>(c.parent)].ids;
      v.push_back(c.id);
      return v;
    };
    const size_t keep = std::min(cands.size(), static_cast<size_t>(beam.beam_width));
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                      [&](const Cand& a, const Cand& b) {
                        if (a.lp != b.lp) return a.lp > b.lp;
                        return decode::ranks_before(a.lp, ids_of(a), b.lp, ids_of(b));
                      });
    cands.resize(keep);
    std::vector<Prefix> next;
    std::vector<int> rows;
    inputs.clear();
    for (const auto& c : cands) {
      next.push_back({ids_of(c), c.lp});
      rows.push_back(c.parent);
      inputs.push_back(c.id);
    }
    prefixes = std::move(next);
    state = state.select(rows);
  }

  // Right context: every survivor continues through the fixed suffix.
  for (int id : right) {
    const auto logits = advance(model, state, inputs);
    for (int r = 0; r < logits.rows(); ++r) {
      prefixes[static_cast<size_t>(r)].lp += log_softmax_row(logits.row(r), A)[static_cast<size_t>(id)];
    }
    std::fill(inputs.begin(), inputs.end(), id);
  }

  std::sort(prefixes.begin(), prefixes.end(),
            [](const Prefix& a, const Prefix& b) { return decode::ranks_before(a.lp, a.ids, b.lp, b.ids); });
  std::vector<decode::Hypothesis> out;
  for (size_t i = 0; i < prefixes.size() && static_cast<int>(i) < beam.top_k; ++i) {
    decode::Hypothesis h;
    h.ids = prefixes[i].ids;
    h.text = text::decode(h.ids, model.alphabet);
    h.log_prob = prefixes[i].lp;
    out.push_back(std::move(h));
  }
  return out;
}

#define LACUNA_INSTANTIATE(T)                                                                    \
  template ParameterStore<T> init_lm_parameters<T>(const LmConfig&, ad::Rng&);                 \
  template Var lm_loss<T>(Graph<T>&, ParameterStore<T>&, const LmConfig&, std::span<const std::vector<int>>);

LACUNA_INSTANTIATE(float)
LACUNA_INSTANTIATE(double)
#undef LACUNA_INSTANTIATE

}  // namespace lacuna::lm
