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


#include "lacuna/service/session_store.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>

#include "lacuna/text/utf8.hpp"

namespace lacuna::service {

namespace {

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json entry_json(const HistoryEntry& e) {
  return {{"start", e.start},
          {"length", e.length},
          {"text", text::encode_utf8(e.text)},
          {"log_prob", e.log_prob ? nlohmann::json(*e.log_prob) : nlohmann::json(nullptr)},
          {"timestamp", e.timestamp}};
}

HistoryEntry entry_from_json(const nlohmann::json& j) {
  HistoryEntry e;
  e.start = j.at("start").get<size_t>();
  e.length = j.at("length").get<size_t>();
  e.text = text::decode_utf8(j.at("text").get<std::string>());
  if (j.contains("log_prob") && !j["log_prob"].is_null()) e.log_prob = j["log_prob"].get<double>();
  e.timestamp = j.value("timestamp", "");
  return e;
}

void append_line(const std::filesystem::path& file, const nlohmann::json& line) {
  std::ofstream out(file, std::ios::app | std::ios::binary);
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw ServiceError(500, "could not write " + file.string());
}

}  // namespace

nlohmann::json to_json(const Session& s) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : s.history) history.push_back(entry_json(e));
  return {{"id", s.id},
          {"model", s.model},
          {"initial_text", text::encode_utf8(s.initial_text)},
          {"text", text::encode_utf8(s.text)},
          {"history", history}};
}

std::u32string replay(std::u32string initial, const std::vector<HistoryEntry>& history) {
  for (const auto& e : history) {
    if (e.start + e.length > initial.size() || e.text.size() != e.length) {
      throw std::invalid_argument("history entry does not fit the text");
    }
    initial.replace(e.start, e.length, e.text);
  }
  return initial;
}

void check_session_text(std::u32string_view text, const text::CharAlphabet& alphabet) {
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == text::kPredictChar) {
      throw ServiceError(400, "'?' at position " + std::to_string(i) +
                                  ": mark lacunae with '-' and choose the gap when proposing");
    }
    if (!alphabet.is_text_symbol(text[i])) {
      throw ServiceError(400, "character '" + text::encode_utf8(text[i]) + "' at position " + std::to_string(i) +
                                  " is not in the model alphabet");
    }
  }
}

void check_lacuna_span(std::u32string_view text, size_t start, size_t length) {
  if (length == 0) throw ServiceError(400, "gap length must be positive");
  if (start > text.size() || length > text.size() - start) {
    throw ServiceError(400, "gap [" + std::to_string(start) + ", " + std::to_string(start + length) +
                                ") lies outside a text of length " + std::to_string(text.size()));
  }
  for (size_t i = start; i < start + length; ++i) {
    if (text[i] != text::kMissingChar) {
      throw ServiceError(400, "position " + std::to_string(i) + " is legible; a gap may only cover '-'");
    }
  }
}

SessionStore::SessionStore(std::filesystem::path dir, text::CharAlphabet alphabet, std::string model_id)
    : dir_(std::move(dir)), alphabet_(std::move(alphabet)), model_id_(std::move(model_id)) {
  std::filesystem::create_directories(dir_);
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") load(entry.path());
  }
}

void SessionStore::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  auto slot = std::make_shared<Slot>();
  Session& s = slot->session;
  for (size_t i = 0; i < lines.size(); ++i) {
    nlohmann::json j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      // A crash mid-append can only tear the last line.
      if (i + 1 == lines.size()) break;
      throw std::runtime_error(file.string() + ": corrupt line " + std::to_string(i + 1));
    }
    const std::string type = j.value("type", "");
    if (i == 0) {
      if (type != "create") throw std::runtime_error(file.string() + ": does not start with a create record");
      s.id = j.at("id").get<std::string>();
      s.model = j.value("model", "");
      s.initial_text = text::decode_utf8(j.at("text").get<std::string>());
      s.text = s.initial_text;
    } else if (type == "accept") {
      HistoryEntry e = entry_from_json(j);
      s.text.replace(e.start, e.length, e.text);
      s.history.push_back(std::move(e));
    } else {
      throw std::runtime_error(file.string() + ": unknown record type '" + type + "'");
    }
  }
  if (s.id.empty()) return;
  sessions_[s.id] = std::move(slot);
}

std::string SessionStore::fresh_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  for (;;) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen() ^ ++counter_));
    if (!sessions_.contains(buf)) return buf;
  }
}

Session SessionStore::create(std::u32string_view text) {
  if (text.empty()) throw ServiceError(400, "text is empty");
  check_session_text(text, alphabet_);
  std::unique_lock lock(mu_);
  auto slot = std::make_shared<Slot>();
  Session& s = slot->session;
  s.id = fresh_id();
  s.model = model_id_;
  s.initial_text = std::u32string(text);
  s.text = s.initial_text;
  append_line(dir_ / (s.id + ".jsonl"), {{"type", "create"},
                                          {"id", s.id},
                                          {"model", s.model},
                                          {"text", text::encode_utf8(text)},
                                          {"timestamp", now_utc()}});
  sessions_[s.id] = slot;
  return s;
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "no session '" + id + "'");
  return it->second;
}

Session SessionStore::get(const std::string& id) const {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  return slot->session;
}

Session SessionStore::accept(const std::string& id, size_t start, size_t length, std::u32string_view fill,
                             std::optional<double> log_prob) {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  Session& s = slot->session;
  check_lacuna_span(s.text, start, length);
  if (fill.size() != length) {
    throw ServiceError(400, "restoration has " + std::to_string(fill.size()) + " characters but the gap has " +
                                std::to_string(length));
  }
  for (size_t i = 0; i < fill.size(); ++i) {
    if (!alphabet_.is_text_symbol(fill[i]) || fill[i] == text::kMissingChar) {
      throw ServiceError(400, "restoration character at offset " + std::to_string(i) + " is not a restorable symbol");
    }
  }
  HistoryEntry e{start, length, std::u32string(fill), log_prob, now_utc()};
  nlohmann::json line = entry_json(e);
  line["type"] = "accept";
  append_line(dir_ / (s.id + ".jsonl"), line);
  s.text.replace(start, length, e.text);
  s.history.push_back(std::move(e));
  return s;
}

size_t SessionStore::size() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

}  // namespace lacuna::service
