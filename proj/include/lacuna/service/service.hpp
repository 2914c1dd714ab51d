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


#ifndef LACUNA_SERVICE_SERVICE_HPP_
#define LACUNA_SERVICE_SERVICE_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "lacuna/decode/beam.hpp"
#include "lacuna/decode/restorer.hpp"
#include "lacuna/service/session_store.hpp"

namespace httplib {
class Server;
}

namespace lacuna::service {

struct ServiceOptions {
  size_t max_context = 1000;
  decode::BeamConfig beam;  // defaults for requests that do not choose
  int max_beam_width = 1000;
  std::string model_id;
  std::string model_kind;
  std::filesystem::path ui_dir;  // static workbench assets; optional
};

// Request handlers over JSON bodies, independent of the transport. Each
// throws ServiceError for client mistakes.
class RestorationService {
 public:
  RestorationService(const decode::Restorer& restorer, SessionStore& store, ServiceOptions options);

  nlohmann::json create_session(const nlohmann::json& body);
  nlohmann::json get_session(const std::string& id) const;
  // Read-only: marks the span as the gap on a copy of the session text.
  nlohmann::json propose(const std::string& id, const nlohmann::json& body) const;
  nlohmann::json accept(const std::string& id, const nlohmann::json& body);
  // Stateless: `text` carries its own '?' run.
  nlohmann::json restore(const nlohmann::json& body) const;
  nlohmann::json health() const;

  // Routes under /v1 plus the workbench under /ui.
  void install(httplib::Server& server);

 private:
  decode::BeamConfig beam_from(const nlohmann::json& body) const;
  nlohmann::json run(std::u32string_view masked, size_t gap_start, size_t gap_length,
                     const decode::BeamConfig& beam) const;

  const decode::Restorer& restorer_;
  SessionStore& store_;
  ServiceOptions options_;
};

}  // namespace lacuna::service

#endif  // LACUNA_SERVICE_SERVICE_HPP_
