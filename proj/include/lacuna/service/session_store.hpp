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


#ifndef LACUNA_SERVICE_SESSION_STORE_HPP_
#define LACUNA_SERVICE_SESSION_STORE_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lacuna/text/alphabet.hpp"

namespace lacuna::service {

// Rejection carrying the HTTP status it maps to.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct HistoryEntry {
  size_t start = 0;
  size_t length = 0;
  std::u32string text;
  std::optional<double> log_prob;  // absent for hand-entered fills
  std::string timestamp;           // UTC, ISO 8601
};

struct Session {
  std::string id;
  std::string model;
  std::u32string initial_text;
  std::u32string text;
  std::vector<HistoryEntry> history;
};

nlohmann::json to_json(const Session& s);

// Applies `history` to `initial` in order.
std::u32string replay(std::u32string initial, const std::vector<HistoryEntry>& history);

// Throws ServiceError(400) naming the first position whose character is not
// a text symbol of `alphabet` ('?' included).
void check_session_text(std::u32string_view text, const text::CharAlphabet& alphabet);

// Throws ServiceError(400) unless [start, start+length) is non-empty, inside
// the text and made only of '-'.
void check_lacuna_span(std::u32string_view text, size_t start, size_t length);

// Sessions kept in memory and mirrored to one append-only JSON-lines file per
// session under `dir`. Reads may run concurrently; writes to a session are
// serialized by that session's lock.
class SessionStore {
 public:
  SessionStore(std::filesystem::path dir, text::CharAlphabet alphabet, std::string model_id);

  Session create(std::u32string_view text);
  Session get(const std::string& id) const;  // 404 when unknown
  Session accept(const std::string& id, size_t start, size_t length, std::u32string_view fill,
                 std::optional<double> log_prob);
  size_t size() const;

 private:
  struct Slot {
    mutable std::mutex mu;
    Session session;
  };

  std::shared_ptr<Slot> find(const std::string& id) const;
  void load(const std::filesystem::path& file);
  std::string fresh_id();

  std::filesystem::path dir_;
  text::CharAlphabet alphabet_;
  std::string model_id_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  uint64_t counter_ = 0;
};

}  // namespace lacuna::service

#endif  // LACUNA_SERVICE_SESSION_STORE_HPP_
