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


// Command-line front end: corpus building, training, evaluation, one-shot
// restoration and the HTTP service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "lacuna/corpus/pipeline.hpp"
#include "lacuna/eval/evaluator.hpp"
#include "lacuna/lm/lm.hpp"
#include "lacuna/lm/lm_trainer.hpp"
#include "lacuna/model/model.hpp"
#include "lacuna/service/loaded_model.hpp"
#include "lacuna/service/service.hpp"
#include "lacuna/text/utf8.hpp"
#include "lacuna/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace lacuna;

namespace {

text::CharAlphabet load_alphabet(const std::string& path, const fs::path& data_dir,
                                 const std::vector<corpus::CleanRecord>& train) {
  if (!path.empty()) return text::CharAlphabet::load(path);
  if (fs::exists(data_dir / "alphabet.tsv")) return text::CharAlphabet::load(data_dir / "alphabet.tsv");
  return text::build_char_alphabet(train);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

// ---- pipeline ------------------------------------------------------------

struct PipelineArgs {
  std::string raw, out, alphabet;
};

int run_pipeline(const PipelineArgs& a) {
  const auto alphabet = a.alphabet.empty() ? text::CharAlphabet::greek_default() : text::CharAlphabet::load(a.alphabet);
  const auto result = corpus::build_corpus(a.raw, a.out, alphabet);
  alphabet.save(fs::path(a.out) / "alphabet.tsv");
  std::cout << corpus::manifest_to_json(result.manifest, &result.report) << '\n';
  return 0;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string data, out, arch = "seq2seq", variant = "bi-word", alphabet, resume, log;
  train::TrainConfig cfg;
  std::optional<int> layers, hidden, char_embedding, word_embedding;
  std::optional<double> dropout, lr, decay;
  size_t vocab_cap = text::kDefaultWordCap;
  int validation_beam = 100;
};

int run_train(TrainArgs a) {
  const fs::path data(a.data);
  const auto train_set = corpus::read_split(data, corpus::Split::kTrain);
  const auto valid_set = corpus::read_split(data, corpus::Split::kValid);
  if (train_set.empty()) throw std::runtime_error("no training records in " + a.data);
  std::ofstream log_file;
  std::ostream* log = &std::cout;
  if (!a.log.empty()) {
    log_file.open(a.log, std::ios::app);
    log = &log_file;
  }

  if (a.arch == "lm") {
    lm::LmConfig c;
    if (a.layers) c.layers = *a.layers;
    if (a.hidden) c.hidden = *a.hidden;
    if (a.char_embedding) c.embedding = *a.char_embedding;
    if (a.dropout) c.dropout = *a.dropout;
    if (a.lr) c.learning_rate = *a.lr;
    if (a.decay) c.decay = *a.decay;
    c.clip = a.cfg.clip;
    lm::LmTrainConfig tc;
    tc.batch_size = a.cfg.batch_size;
    tc.max_steps = a.cfg.max_steps;
    tc.validate_every = a.cfg.checkpoint_every;
    tc.seed = a.cfg.seed;
    tc.min_window = a.cfg.bounds.min_context;
    tc.max_window = a.cfg.bounds.max_context;
    tc.validation_limit = a.cfg.validation_limit;
    auto model = a.resume.empty() ? lm::LmModel::create(c, load_alphabet(a.alphabet, data, train_set), a.cfg.seed)
                                  : lm::load_lm(a.resume);
    lm::LmTrainer trainer(std::move(model), tc);
    const auto r = lm::fit_lm(trainer, train_set, valid_set, a.out, log);
    std::cerr << "best validation perplexity " << r.best_perplexity << " at step " << r.best_step << '\n';
    return 0;
  }
  if (a.arch != "seq2seq") throw CLI::ValidationError("--arch", "expected seq2seq or lm");

  if (a.lr) a.cfg.learning_rate = *a.lr;
  a.cfg.validation_beam.beam_width = a.validation_beam;
  a.cfg.validation_beam.top_k = std::min(a.cfg.validation_beam.top_k, a.validation_beam);
  std::optional<train::Trainer> trainer;
  if (!a.resume.empty()) {
    trainer.emplace(train::Trainer::resume(a.resume, a.cfg));
  } else {
    model::ModelConfig mc;
    mc.variant = model::parse_variant(a.variant);
    if (a.layers) mc.layers = *a.layers;
    if (a.hidden) mc.hidden = *a.hidden;
    if (a.char_embedding) mc.char_embedding = *a.char_embedding;
    if (a.word_embedding) mc.word_embedding = *a.word_embedding;
    if (a.dropout) mc.dropout = *a.dropout;
    auto alphabet = load_alphabet(a.alphabet, data, train_set);
    auto vocab = mc.uses_words() ? text::build_word_vocab(train_set, a.vocab_cap) : text::WordVocab();
    trainer.emplace(model::Seq2SeqModel::create(mc, std::move(alphabet), std::move(vocab), a.cfg.seed), a.cfg);
  }
  const auto r = train::fit(*trainer, train_set, valid_set, a.out, log);
  std::cerr << "best validation CER " << r.best_cer << " at step " << r.best_step << '\n';
  return 0;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string model, data, split = "test", sweep, arch, table;
  eval::EvalOptions options;
  int beam = 100;
};

int run_eval(EvalArgs a) {
  auto loaded = service::load_any_model(a.model);
  if (!a.arch.empty() && a.arch != loaded.kind) {
    throw std::runtime_error("--arch " + a.arch + " but the checkpoint holds a " + loaded.kind + " model");
  }
  const auto records = corpus::read_split(a.data, corpus::parse_split(a.split));
  a.options.beam.beam_width = a.beam;
  a.options.beam.top_k = std::min(a.options.k, a.beam);
  nlohmann::json report = {{"model", loaded.id}, {"kind", loaded.kind}, {"split", a.split}};
  if (a.sweep.empty()) {
    report["result"] = eval::summary_json(eval::evaluate(*loaded.restorer, records, a.options));
  } else {
    const auto lengths = a.sweep == "default" ? eval::kDefaultSweep : parse_int_list(a.sweep);
    const auto points = eval::context_sweep(*loaded.restorer, records, lengths, a.options);
    nlohmann::json sweep = nlohmann::json::array();
    std::ofstream table;
    if (!a.table.empty()) {
      table.open(a.table);
      table << "context\tcer\ttop_k\texamples\n";
    }
    for (const auto& p : points) {
      sweep.push_back({{"context", p.context}, {"result", eval::summary_json(p.result)}});
      if (table.is_open()) {
        table << p.context << '\t' << p.result.cer << '\t' << p.result.top_k << '\t' << p.result.examples << '\n';
      }
    }
    report["sweep"] = sweep;
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

// ---- restore -------------------------------------------------------------

struct RestoreArgs {
  std::string model, text;
  int top = 20, beam = 100, max_context = 1000;
  bool json = false;
};

int run_restore(const RestoreArgs& a) {
  auto loaded = service::load_any_model(a.model);
  decode::BeamConfig beam{a.beam, std::min(a.top, a.beam)};
  const auto t = text::decode_utf8(a.text);
  if (t.find(text::kPredictChar) == std::u32string::npos) {
    // No '?': fill every '-' run left to right.
    const auto full = eval::restore_full_text(*loaded.restorer, t, beam, a.max_context);
    std::cout << text::encode_utf8(full.text) << '\n';
    return 0;
  }
  const auto [start, length] = decode::find_single_gap(t);
  const auto [begin, end] = decode::context_window(t.size(), start, length, static_cast<size_t>(a.max_context));
  const auto hyps = loaded.restorer->restore(std::u32string_view(t).substr(begin, end - begin), beam);
  if (a.json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& h : hyps) out.push_back({{"text", text::encode_utf8(h.text)}, {"log_prob", h.log_prob}});
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  for (size_t i = 0; i < hyps.size(); ++i) {
    std::cout << (i + 1) << '\t' << hyps[i].log_prob << '\t' << text::encode_utf8(hyps[i].text) << '\n';
  }
  return 0;
}

// ---- serve ---------------------------------------------------------------

struct ServeArgs {
  std::string model, data, host = "127.0.0.1", ui;
  int port = 8080;
};

httplib::Server* g_server = nullptr;

int run_serve(const ServeArgs& a) {
  auto loaded = service::load_any_model(a.model);
  service::SessionStore store(a.data, loaded.restorer->alphabet(), loaded.id);
  service::ServiceOptions opts;
  opts.model_id = loaded.id;
  opts.model_kind = loaded.kind;
  opts.ui_dir = a.ui;
  service::RestorationService svc(*loaded.restorer, store, opts);
  httplib::Server server;
  svc.install(server);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cerr << "serving " << loaded.id << " (" << loaded.kind << ") on http://" << a.host << ':' << a.port
            << " with " << store.size() << " stored sessions\n";
  if (!server.listen(a.host, a.port)) {
    std::cerr << "could not listen on " << a.host << ':' << a.port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restoration of damaged text: corpus building, training, evaluation and serving."};
  app.require_subcommand(1);

  PipelineArgs pa;
  auto* pipeline = app.add_subcommand("pipeline", "Corpus preparation");
  auto* build = pipeline->add_subcommand("build", "Normalize raw records into train/valid/test splits");
  pipeline->require_subcommand(1);
  build->add_option("--raw", pa.raw, "Directory of raw id<TAB>text files")->required()->check(CLI::ExistingDirectory);
  build->add_option("--out", pa.out, "Output directory")->required();
  build->add_option("--alphabet", pa.alphabet, "Alphabet TSV (default: built-in Greek)")->check(CLI::ExistingFile);
  build->callback([&] { std::exit(run_pipeline(pa)); });

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a restoration model or the language-model baseline");
  tr->add_option("--data", ta.data, "Corpus directory from 'pipeline build'")->required()->check(CLI::ExistingDirectory);
  tr->add_option("--out", ta.out, "Checkpoint path for the best model")->required();
  tr->add_option("--arch", ta.arch, "seq2seq or lm")->check(CLI::IsMember({"seq2seq", "lm"}));
  tr->add_option("--variant", ta.variant, "uni, bi or bi-word")->check(CLI::IsMember({"uni", "bi", "bi-word"}));
  tr->add_option("--steps", ta.cfg.max_steps, "Training steps");
  tr->add_option("--seed", ta.cfg.seed);
  tr->add_option("--batch-size", ta.cfg.batch_size);
  tr->add_option("--lr", ta.lr, "Learning rate");
  tr->add_option("--decay", ta.decay, "LM learning-rate decay on validation stall");
  tr->add_option("--clip", ta.cfg.clip, "Global gradient-norm clip");
  tr->add_option("--scheduled-sampling", ta.cfg.scheduled_sampling);
  tr->add_option("--checkpoint-every", ta.cfg.checkpoint_every, "Validation and checkpoint cadence in steps");
  tr->add_option("--validation-limit", ta.cfg.validation_limit, "Validation records per pass (0 = all)");
  tr->add_option("--validation-beam", ta.validation_beam);
  tr->add_option("--min-context", ta.cfg.bounds.min_context);
  tr->add_option("--max-context", ta.cfg.bounds.max_context);
  tr->add_option("--min-target", ta.cfg.bounds.min_target);
  tr->add_option("--max-target", ta.cfg.bounds.max_target);
  tr->add_option("--layers", ta.layers);
  tr->add_option("--hidden", ta.hidden);
  tr->add_option("--char-embedding", ta.char_embedding, "Character (or LM input) embedding size");
  tr->add_option("--word-embedding", ta.word_embedding);
  tr->add_option("--dropout", ta.dropout);
  tr->add_option("--vocab-cap", ta.vocab_cap);
  tr->add_option("--alphabet", ta.alphabet, "Alphabet TSV (default: DATA/alphabet.tsv)");
  tr->add_option("--resume", ta.resume, "Continue from a checkpoint (seq2seq: the .last file)");
  tr->add_option("--log", ta.log, "Append the JSON-lines progress log here instead of stdout");
  tr->callback([&] { std::exit(run_train(ta)); });

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Character error rate and Top-k accuracy on a split");
  ev->add_option("--model", ea.model)->required()->check(CLI::ExistingFile);
  ev->add_option("--data", ea.data)->required()->check(CLI::ExistingDirectory);
  ev->add_option("--split", ea.split)->check(CLI::IsMember({"train", "valid", "test"}));
  ev->add_option("--arch", ea.arch, "Expected checkpoint kind")->check(CLI::IsMember({"seq2seq", "lm"}));
  ev->add_option("--sweep", ea.sweep, "Comma-separated context lengths, or 'default'");
  ev->add_option("--table", ea.table, "Write the sweep as a TSV table");
  ev->add_option("--seed", ea.options.seed);
  ev->add_option("--limit", ea.options.limit, "Records to score (0 = all)");
  ev->add_option("--beam", ea.beam);
  ev->add_option("--top", ea.options.k, "k for Top-k accuracy");
  ev->add_option("--max-context", ea.options.max_context);
  ev->add_option("--min-target", ea.options.min_target);
  ev->add_option("--max-target", ea.options.max_target);
  ev->callback([&] { std::exit(run_eval(ea)); });

  RestoreArgs ra;
  auto* re = app.add_subcommand("restore", "Rank fills for one '?' gap, or fill every '-' run");
  re->add_option("--model", ra.model)->required()->check(CLI::ExistingFile);
  re->add_option("--text", ra.text)->required();
  re->add_option("--top", ra.top);
  re->add_option("--beam", ra.beam);
  re->add_option("--max-context", ra.max_context);
  re->add_flag("--json", ra.json);
  re->callback([&] { std::exit(run_restore(ra)); });

  ServeArgs sa;
  auto* sv = app.add_subcommand("serve", "HTTP restoration service");
  sv->add_option("--model", sa.model)->required()->check(CLI::ExistingFile);
  sv->add_option("--data", sa.data, "Session storage directory")->required();
  sv->add_option("--port", sa.port);
  sv->add_option("--host", sa.host);
  sv->add_option("--ui", sa.ui, "Directory of workbench assets served under /ui");
  sv->callback([&] { std::exit(run_serve(sa)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
